#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dexsim/result.hpp"

namespace dexsim::lob {

enum class Side { Bid, Ask };

inline Side opposite(Side s) { return s == Side::Bid ? Side::Ask : Side::Bid; }
inline const char* side_name(Side s) { return s == Side::Bid ? "Bid" : "Ask"; }

struct Order {
  std::uint64_t order_id = 0;
  std::string client_id;  // Owning session; the only identity allowed to cancel.
  std::string trader_id;
  Side side = Side::Bid;
  std::int64_t price = 0;  // Integer ticks; 1 tick = 1 cent.
  std::int64_t qty = 0;
  std::uint64_t arrival_seq = 0;  // Stamped by the book at admission.
};

struct Trade {
  std::uint64_t trade_id = 0;
  std::int64_t price = 0;
  std::int64_t qty = 0;
  std::uint64_t buy_order_id = 0;
  std::uint64_t sell_order_id = 0;
  std::string buyer_trader;
  std::string seller_trader;
  std::int64_t exec_time_us = 0;
};

struct Level {
  std::int64_t price = 0;
  std::int64_t qty = 0;
  bool operator==(const Level&) const = default;
};

// Anonymized book view: aggregate quantities only, no ids or trader names.
struct DepthSnapshot {
  std::vector<Level> bids;  // Best (highest) first.
  std::vector<Level> asks;  // Best (lowest) first.
  std::optional<Level> last_trade;  // price + qty of most recent trade.
  std::int64_t last_trade_time_us = 0;
  std::uint64_t cum_volume = 0;
};

enum class BookErrorKind { Rejected, NotFound, NotOwner };

struct BookError {
  BookErrorKind kind = BookErrorKind::Rejected;
  std::string message;
};

struct AddResult {
  std::vector<Trade> trades;
  std::optional<Order> remainder;  // The resting portion, if any.
};

// Price-time-priority limit order book over integer ticks. Exactly one
// logical owner may mutate a Book; snapshots are value copies.
class Book {
 public:
  explicit Book(std::int64_t max_price = 1000) : max_price_(max_price) {}

  std::int64_t max_price() const { return max_price_; }
  const std::vector<Trade>& tape() const { return tape_; }
  std::uint64_t cum_volume() const { return cum_volume_; }

  std::optional<std::int64_t> best_bid() const {
    return bids_.empty() ? std::nullopt : std::optional(bids_.begin()->first);
  }
  std::optional<std::int64_t> best_ask() const {
    return asks_.empty() ? std::nullopt : std::optional(asks_.begin()->first);
  }

  // Matches `incoming` against the opposite side while it crosses, at the
  // resting order's price, then rests any remainder. arrival_seq is assigned
  // here; the caller's value is ignored.
  Expected<AddResult, BookError> add(Order incoming, std::int64_t exec_time_us) {
    if (incoming.price < 1 || incoming.price > max_price_)
      return BookError{BookErrorKind::Rejected,
                       "price " + std::to_string(incoming.price) + " outside [1, " +
                           std::to_string(max_price_) + "]"};
    if (incoming.qty < 1)
      return BookError{BookErrorKind::Rejected, "qty must be positive"};
    if (!used_ids_.insert(incoming.order_id).second)
      return BookError{BookErrorKind::Rejected,
                       "duplicate order_id " + std::to_string(incoming.order_id)};

    incoming.arrival_seq = next_arrival_seq_++;
    AddResult result;

    if (incoming.side == Side::Bid) {
      match_against(asks_, incoming, exec_time_us, result.trades);
    } else {
      match_against(bids_, incoming, exec_time_us, result.trades);
    }

    if (incoming.qty > 0) {
      if (incoming.side == Side::Bid)
        bids_[incoming.price].push_back(incoming);
      else
        asks_[incoming.price].push_back(incoming);
      live_.emplace(incoming.order_id, std::pair(incoming.side, incoming.price));
      result.remainder = incoming;
    }
    return result;
  }

  Status<BookError> cancel(std::uint64_t order_id, const std::string& client_id) {
    auto it = live_.find(order_id);
    if (it == live_.end())
      return BookError{BookErrorKind::NotFound,
                       "unknown order_id " + std::to_string(order_id)};
    auto [side, price] = it->second;
    Status<BookError> result = (side == Side::Bid)
                                   ? cancel_in(bids_, price, order_id, client_id)
                                   : cancel_in(asks_, price, order_id, client_id);
    if (result.ok()) live_.erase(it);
    return result;
  }

  DepthSnapshot snapshot(int depth) const {
    DepthSnapshot s;
    int n = 0;
    for (const auto& [price, queue] : bids_) {
      if (n++ == depth) break;
      std::int64_t qty = 0;
      for (const auto& o : queue) qty += o.qty;
      s.bids.push_back({price, qty});
    }
    n = 0;
    for (const auto& [price, queue] : asks_) {
      if (n++ == depth) break;
      std::int64_t qty = 0;
      for (const auto& o : queue) qty += o.qty;
      s.asks.push_back({price, qty});
    }
    if (!tape_.empty()) {
      s.last_trade = Level{tape_.back().price, tape_.back().qty};
      s.last_trade_time_us = tape_.back().exec_time_us;
    }
    s.cum_volume = cum_volume_;
    return s;
  }

  // All resting orders, bid side then ask side, price priority then FIFO.
  // Used by tests and for diagnostics; not part of the hot path.
  std::vector<Order> resting_orders() const {
    std::vector<Order> out;
    for (const auto& [price, queue] : bids_)
      for (const auto& o : queue) out.push_back(o);
    for (const auto& [price, queue] : asks_)
      for (const auto& o : queue) out.push_back(o);
    return out;
  }

 private:
  template <typename Levels>
  Status<BookError> cancel_in(Levels& levels, std::int64_t price, std::uint64_t order_id,
                              const std::string& client_id) {
    auto lvl = levels.find(price);
    auto& queue = lvl->second;
    for (auto q = queue.begin(); q != queue.end(); ++q) {
      if (q->order_id != order_id) continue;
      if (q->client_id != client_id)
        return BookError{BookErrorKind::NotOwner,
                         "order " + std::to_string(order_id) + " belongs to another session"};
      queue.erase(q);
      if (queue.empty()) levels.erase(lvl);
      return ok_status<BookError>();
    }
    return BookError{BookErrorKind::NotFound, "unknown order_id " + std::to_string(order_id)};
  }

  template <typename Levels>
  void match_against(Levels& levels, Order& incoming, std::int64_t exec_time_us,
                     std::vector<Trade>& trades) {
    while (incoming.qty > 0 && !levels.empty()) {
      auto lvl = levels.begin();
      bool crosses = (incoming.side == Side::Bid) ? (lvl->first <= incoming.price)
                                                  : (lvl->first >= incoming.price);
      if (!crosses) break;
      auto& queue = lvl->second;
      Order& resting = queue.front();
      std::int64_t fill = std::min(incoming.qty, resting.qty);

      Trade t;
      t.trade_id = next_trade_id_++;
      t.price = resting.price;
      t.qty = fill;
      t.exec_time_us = exec_time_us;
      if (incoming.side == Side::Bid) {
        t.buy_order_id = incoming.order_id;
        t.sell_order_id = resting.order_id;
        t.buyer_trader = incoming.trader_id;
        t.seller_trader = resting.trader_id;
      } else {
        t.buy_order_id = resting.order_id;
        t.sell_order_id = incoming.order_id;
        t.buyer_trader = resting.trader_id;
        t.seller_trader = incoming.trader_id;
      }
      trades.push_back(t);
      tape_.push_back(t);
      cum_volume_ += static_cast<std::uint64_t>(fill);

      incoming.qty -= fill;
      resting.qty -= fill;
      if (resting.qty == 0) {
        live_.erase(resting.order_id);
        queue.pop_front();
        if (queue.empty()) levels.erase(lvl);
      }
    }
  }

  std::int64_t max_price_;
  std::map<std::int64_t, std::deque<Order>, std::greater<>> bids_;
  std::map<std::int64_t, std::deque<Order>> asks_;
  std::vector<Trade> tape_;
  std::uint64_t cum_volume_ = 0;
  std::uint64_t next_trade_id_ = 1;
  std::uint64_t next_arrival_seq_ = 1;
  std::unordered_map<std::uint64_t, std::pair<Side, std::int64_t>> live_;
  std::unordered_set<std::uint64_t> used_ids_;
};

}  // namespace dexsim::lob
