#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "dexsim/lob.hpp"
#include "dexsim/md.hpp"
#include "dexsim/result.hpp"
#include "dexsim/rng.hpp"

namespace dexsim::agents {

enum class Strategy { GVWY, SHVR, ZIC, SNPR };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::GVWY: return "GVWY";
    case Strategy::SHVR: return "SHVR";
    case Strategy::ZIC: return "ZIC";
    case Strategy::SNPR: return "SNPR";
  }
  return "?";
}

inline Expected<Strategy> parse_strategy(const std::string& name) {
  if (name == "GVWY") return Strategy::GVWY;
  if (name == "SHVR") return Strategy::SHVR;
  if (name == "ZIC") return Strategy::ZIC;
  if (name == "SNPR") return Strategy::SNPR;
  return Error{"unknown strategy: " + name};
}

struct Assignment {
  lob::Side side = lob::Side::Bid;
  std::int64_t limit_price = 0;
  std::int64_t qty = 1;          // Remaining units to fill.
  std::int64_t issue_time_us = 0;
  std::int64_t expiry_time_us = 0;  // Next reissue or session end; drives SNPR.
};

struct MarketView {
  std::optional<md::MdSnapshot> snapshot;
  std::int64_t recv_time_us = 0;

  std::optional<std::int64_t> best_bid() const {
    if (!snapshot || snapshot->bids.empty()) return std::nullopt;
    return snapshot->bids.front().price;
  }
  std::optional<std::int64_t> best_ask() const {
    if (!snapshot || snapshot->asks.empty()) return std::nullopt;
    return snapshot->asks.front().price;
  }
};

struct OrderProposal {
  lob::Side side = lob::Side::Bid;
  std::int64_t price = 0;
  std::int64_t qty = 0;
};

struct AgentParams {
  std::int64_t p_min = 1;
  std::int64_t p_max = 1000;
  std::int64_t shave_ticks = 1;
  double snpr_lurk_fraction = 0.2;  // SNPR wakes when remaining lifetime < this.
};

struct LiveOrder {
  std::string cl_ord_id;
  std::int64_t price = 0;
  std::int64_t qty = 0;
  std::int64_t placed_time_us = 0;
};

// One robot trader: a sequential state machine owning an assignment, at most
// one live order, a profit tally, and a private RNG stream.
class Agent {
 public:
  Agent(std::string trader_id, Strategy strategy, lob::Side role, std::uint64_t seed,
        AgentParams params = {})
      : trader_id_(std::move(trader_id)),
        strategy_(strategy),
        role_(role),
        params_(params),
        rng_(seed) {}

  const std::string& trader_id() const { return trader_id_; }
  Strategy strategy() const { return strategy_; }
  lob::Side role() const { return role_; }
  std::int64_t profit() const { return profit_; }
  std::int64_t filled_qty() const { return filled_qty_; }
  const std::optional<Assignment>& assignment() const { return assignment_; }
  const std::optional<LiveOrder>& live_order() const { return live_order_; }
  bool cancel_pending() const { return cancel_pending_; }

  // Installs a new assignment, returning the stale live order that must be
  // cancelled first, if any. Same-terms reissues still replace.
  Expected<std::optional<std::string>> on_assignment(const Assignment& a) {
    if (a.side != role_)
      return Error{trader_id_ + ": assignment side does not match agent role"};
    assignment_ = a;
    if (live_order_) {
      cancel_pending_ = true;
      return std::optional<std::string>{live_order_->cl_ord_id};
    }
    return std::optional<std::string>{};
  }

  // Strategy decision for the current event. Pure in everything but the ZIC
  // RNG stream. The caller enforces the one-live-order protocol; quote()
  // returns the price the agent wants *now*, or nothing.
  std::optional<OrderProposal> quote(const MarketView& view, std::int64_t now_us) {
    if (!assignment_) return std::nullopt;
    const Assignment& a = *assignment_;
    const std::int64_t limit = a.limit_price;

    if (role_ == lob::Side::Bid ? limit < params_.p_min : limit > params_.p_max) {
      if (!warned_degenerate_) {
        std::fprintf(stderr, "[agent %s] degenerate limit %lld outside price bounds\n",
                     trader_id_.c_str(), static_cast<long long>(limit));
        warned_degenerate_ = true;
      }
      return std::nullopt;
    }

    std::optional<std::int64_t> price;
    switch (strategy_) {
      case Strategy::GVWY:
        price = limit;
        break;
      case Strategy::SHVR:
        price = shaver_price(view, limit);
        break;
      case Strategy::ZIC:
        price = (role_ == lob::Side::Bid)
                    ? rng_.uniform_int(params_.p_min, std::min(limit, params_.p_max))
                    : rng_.uniform_int(std::max(limit, params_.p_min), params_.p_max);
        break;
      case Strategy::SNPR:
        price = sniper_price(view, a, now_us);
        break;
    }
    if (!price) return std::nullopt;

    // Defense in depth: clamp into system bounds, never across the limit.
    std::int64_t p = std::clamp(*price, params_.p_min, params_.p_max);
    if (role_ == lob::Side::Bid ? p > limit : p < limit) return std::nullopt;
    return OrderProposal{role_, p, a.qty};
  }

  void on_order_placed(const std::string& cl_ord_id, std::int64_t price, std::int64_t qty,
                       std::int64_t now_us) {
    live_order_ = LiveOrder{cl_ord_id, price, qty, now_us};
  }

  Status<> on_fill(std::int64_t trade_price, std::int64_t qty) {
    if (!live_order_ || !assignment_)
      return Error{trader_id_ + ": fill with no live order/assignment"};
    if (qty > live_order_->qty)
      return Error{trader_id_ + ": fill qty exceeds live order"};
    const std::int64_t limit = assignment_->limit_price;
    profit_ += (role_ == lob::Side::Bid) ? (limit - trade_price) * qty
                                         : (trade_price - limit) * qty;
    filled_qty_ += qty;
    live_order_->qty -= qty;
    assignment_->qty -= qty;
    if (live_order_->qty == 0) {
      live_order_.reset();
      cancel_pending_ = false;
    }
    if (assignment_->qty <= 0) assignment_.reset();
    return ok_status();
  }

  void on_canceled(const std::string& cl_ord_id) {
    if (live_order_ && live_order_->cl_ord_id == cl_ord_id) {
      live_order_.reset();
      cancel_pending_ = false;
    }
  }

  void on_rejected(const std::string& cl_ord_id) { on_canceled(cl_ord_id); }

 private:
  std::optional<std::int64_t> shaver_price(const MarketView& view, std::int64_t limit) const {
    if (role_ == lob::Side::Bid) {
      auto bb = view.best_bid();
      if (!bb) return params_.p_min;
      return std::min(*bb + params_.shave_ticks, limit);
    }
    auto ba = view.best_ask();
    if (!ba) return params_.p_max;
    return std::max(*ba - params_.shave_ticks, limit);
  }

  std::optional<std::int64_t> sniper_price(const MarketView& view, const Assignment& a,
                                           std::int64_t now_us) const {
    const std::int64_t lifetime = a.expiry_time_us - a.issue_time_us;
    if (lifetime > 0) {
      const double remaining =
          static_cast<double>(a.expiry_time_us - now_us) / static_cast<double>(lifetime);
      if (remaining >= params_.snpr_lurk_fraction) return std::nullopt;
    }
    if (role_ == lob::Side::Bid) {
      auto ba = view.best_ask();
      if (ba && *ba <= a.limit_price) return *ba;  // Cross the spread, capped by L.
    } else {
      auto bb = view.best_bid();
      if (bb && *bb >= a.limit_price) return *bb;
    }
    return shaver_price(view, a.limit_price);
  }

  std::string trader_id_;
  Strategy strategy_;
  lob::Side role_;
  AgentParams params_;
  Rng rng_;
  std::optional<Assignment> assignment_;
  std::optional<LiveOrder> live_order_;
  bool cancel_pending_ = false;
  bool warned_degenerate_ = false;
  std::int64_t profit_ = 0;
  std::int64_t filled_qty_ = 0;
};

// Roster config entry: "STRATEGY:SIDE:COUNT", e.g. "GVWY:B:5".
struct RosterEntry {
  Strategy strategy = Strategy::GVWY;
  lob::Side side = lob::Side::Bid;
  int count = 0;
};

inline Expected<std::vector<RosterEntry>> parse_roster(const std::vector<std::string>& items) {
  std::vector<RosterEntry> out;
  for (const std::string& item : items) {
    std::size_t c1 = item.find(':');
    std::size_t c2 = (c1 == std::string::npos) ? std::string::npos : item.find(':', c1 + 1);
    if (c2 == std::string::npos) return Error{"bad roster entry (want STRAT:SIDE:N): " + item};
    auto strat = parse_strategy(item.substr(0, c1));
    if (!strat.ok()) return strat.error();
    std::string side_s = item.substr(c1 + 1, c2 - c1 - 1);
    lob::Side side;
    if (side_s == "B")
      side = lob::Side::Bid;
    else if (side_s == "S")
      side = lob::Side::Ask;
    else
      return Error{"bad roster side (want B or S): " + item};
    int count = 0;
    try {
      count = std::stoi(item.substr(c2 + 1));
    } catch (const std::exception&) {
      return Error{"bad roster count: " + item};
    }
    if (count < 0) return Error{"negative roster count: " + item};
    out.push_back({strat.value(), side, count});
  }
  return out;
}

}  // namespace dexsim::agents
