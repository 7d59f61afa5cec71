#pragma once

// Trading client: one process hosting a roster of robot traders behind a
// single order-entry session. The client plans its own assignment stream,
// listens to the sequenced market-data feed, polls every agent on each
// adopted snapshot (with requote dampening), and records per-datagram
// latency samples plus per-trader economics.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dexsim/agents.hpp"
#include "dexsim/config.hpp"
#include "dexsim/fix.hpp"
#include "dexsim/md.hpp"
#include "dexsim/net.hpp"
#include "dexsim/result.hpp"
#include "dexsim/rng.hpp"
#include "dexsim/scheduler.hpp"
#include "dexsim/util.hpp"

namespace dexsim::client {

struct ClientConfig {
  net::Endpoint exchange{"127.0.0.1", 0};
  std::string comp_id = "CLNT1";
  std::string exch_comp_id = "EXCH";
  std::string symbol = "DBX";
  md::FeedMode feed_mode = md::FeedMode::Unicast;
  net::Endpoint md_listen{"127.0.0.1", 0};  // Unicast: the port the feed targets.
  net::Endpoint md_group{"", 0};            // Multicast: the group to join.
  double session_s = 0;
  double interval_s = 30;
  std::vector<sched::ScheduleSegment> schedule;
  std::vector<agents::RosterEntry> roster;
  std::uint64_t seed = 1;
  std::int64_t max_price = 1000;
  std::string out_dir;  // Empty: keep results in memory only.
  std::int64_t requote_min_ms = 1000;
  // One-way order-path latency. A geographically remote client is slow in
  // both directions: it sees the market late (feed-side injection at the
  // exchange) and its orders arrive late (this knob, applied client-side).
  std::int64_t order_delay_ms = 0;

  static Expected<ClientConfig> from_config(const Config& cfg) {
    ClientConfig out;
    auto exch = net::parse_endpoint(cfg.get_or("exchange", "127.0.0.1:0"));
    if (!exch.ok()) return exch.error();
    out.exchange = exch.value();
    out.comp_id = cfg.get_or("comp_id", out.comp_id);
    out.exch_comp_id = cfg.get_or("exch_comp_id", out.exch_comp_id);
    out.symbol = cfg.get_or("symbol", out.symbol);

    const std::string mode = cfg.get_or("feed_mode", "unicast");
    if (mode == "unicast") {
      out.feed_mode = md::FeedMode::Unicast;
      auto ep = net::parse_endpoint(cfg.get_or("md_listen", "127.0.0.1:0"));
      if (!ep.ok()) return ep.error();
      out.md_listen = ep.value();
    } else if (mode == "multicast") {
      out.feed_mode = md::FeedMode::Multicast;
      auto ep = net::parse_endpoint(cfg.get_or("md_group", ""));
      if (!ep.ok()) return Error{"multicast feed_mode needs md_group: " + ep.error().message};
      out.md_group = ep.value();
    } else {
      return Error{"feed_mode must be unicast or multicast, got " + mode};
    }

    out.session_s = cfg.get_double_or("session_s", 0);
    if (out.session_s < 0) return Error{"session_s must be >= 0"};
    out.interval_s = cfg.get_double_or("interval_s", 30);
    if (out.interval_s <= 0) return Error{"interval_s must be positive"};

    if (cfg.has("schedule")) {
      auto sched = sched::parse_schedule(cfg.get_list_or("schedule"));
      if (!sched.ok()) return sched.error();
      out.schedule = sched.value();
    }
    if (cfg.has("roster")) {
      auto roster = agents::parse_roster(cfg.get_list_or("roster"));
      if (!roster.ok()) return roster.error();
      out.roster = roster.value();
    }

    out.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));
    out.max_price = cfg.get_int_or("max_price", 1000);
    if (out.max_price < 1) return Error{"max_price must be >= 1"};
    out.out_dir = cfg.get_or("out_dir", "");
    out.requote_min_ms = cfg.get_int_or("requote_min_ms", 1000);
    if (out.requote_min_ms < 0) return Error{"requote_min_ms must be >= 0"};
    out.order_delay_ms = cfg.get_int_or("order_delay_ms", 0);
    if (out.order_delay_ms < 0 || out.order_delay_ms > 10'000)
      return Error{"order_delay_ms must be in [0, 10000]"};
    return out;
  }
};

struct LatencySample {
  std::uint64_t seq = 0;
  std::int64_t send_ts_us = 0;
  std::int64_t recv_wall_us = 0;
  std::int64_t latency_us = 0;  // recv - send; negative only under clock skew.
};

struct TradeRecord {
  std::int64_t recv_wall_us = 0;
  std::string trader;
  agents::Strategy strategy = agents::Strategy::GVWY;
  lob::Side side = lob::Side::Bid;
  std::int64_t price = 0;
  std::int64_t qty = 0;
  std::int64_t limit_price = 0;
  std::int64_t profit_delta = 0;
};

struct TraderResult {
  std::string trader;
  agents::Strategy strategy = agents::Strategy::GVWY;
  lob::Side side = lob::Side::Bid;
  std::int64_t profit = 0;
  std::int64_t filled_qty = 0;
};

struct SessionResult {
  std::vector<LatencySample> latency;
  std::vector<TradeRecord> trades;
  std::vector<TraderResult> traders;
  std::uint64_t datagrams = 0;
  std::uint64_t gap_events = 0;
  std::uint64_t missed_datagrams = 0;
  std::uint64_t duplicate_datagrams = 0;
  std::uint64_t orders_sent = 0;
  std::uint64_t cancels_sent = 0;
  std::uint64_t order_rejects = 0;
  std::uint64_t protocol_errors = 0;
};

class TradingClient {
 public:
  explicit TradingClient(ClientConfig cfg) : cfg_(std::move(cfg)) {}

  // Blocking: connect, log on, trade out the session, log out. The returned
  // result is also written to cfg.out_dir as CSV when that is set.
  Expected<SessionResult> run() {
    build_agents();

    // Feed socket first so no early datagram is lost.
    Expected<net::UdpSocket> feed = (cfg_.feed_mode == md::FeedMode::Unicast)
                                        ? net::UdpSocket::bind(cfg_.md_listen)
                                        : net::UdpSocket::bind({"0.0.0.0", cfg_.md_group.port});
    if (!feed.ok()) return Error{"md socket: " + feed.error().message};
    if (cfg_.feed_mode == md::FeedMode::Multicast) {
      auto st = feed.value().join_multicast(cfg_.md_group.host, "127.0.0.1");
      if (!st.ok()) return Error{"join_multicast: " + st.error().message};
    }

    auto stream = net::TcpStream::connect(cfg_.exchange, 5000);
    if (!stream.ok()) return Error{"connect: " + stream.error().message};
    stream_ = std::move(stream.value());
    sess_ = fix::Session(cfg_.comp_id, cfg_.exch_comp_id);

    {
      std::vector<fix::Field> body;
      body.emplace_back(fix::tag::kEncryptMethod, "0");
      body.emplace_back(fix::tag::kHeartBtInt, "30");
      auto st = send(fix::msg::kLogon, std::move(body));
      if (!st.ok()) return st.error();
    }
    if (!await_msg_type(fix::msg::kLogon, 5000))
      return Error{"no logon response from exchange"};

    t0_us_ = wall_clock_us();
    const std::int64_t t_end_us = t0_us_ + static_cast<std::int64_t>(cfg_.session_s * 1e6);

    if (cfg_.session_s > 0 && !agents_.empty()) {
      Rng sched_rng(derive_seed(cfg_.seed, kSchedulerStream));
      auto plan = sched::plan_assignments(cfg_.schedule, n_buyers_, n_sellers_,
                                          cfg_.interval_s, cfg_.session_s, sched_rng);
      if (!plan.ok()) return plan.error();
      plan_ = std::move(plan.value());
    }

    std::size_t next_assignment = 0;
    std::int64_t last_timer_poll_us = 0;
    while (wall_clock_us() < t_end_us) {
      const std::int64_t now_rel = wall_clock_us() - t0_us_;

      while (next_assignment < plan_.size() &&
             plan_[next_assignment].assignment.issue_time_us <= now_rel) {
        const auto& pa = plan_[next_assignment++];
        auto& agent = agents_[static_cast<std::size_t>(pa.trader_index)];
        auto stale = agent.on_assignment(pa.assignment);
        if (!stale.ok()) {
          ++result_.protocol_errors;
          std::fprintf(stderr, "[%s] %s\n", cfg_.comp_id.c_str(), stale.error().message.c_str());
          continue;
        }
        if (stale.value().has_value()) request_cancel(pa.trader_index, *stale.value());
        try_quote(pa.trader_index);
      }

      flush_outbound();
      if (!poll_feed(feed.value())) return Error{"md socket failed"};
      if (!poll_session()) break;  // Connection lost; keep what we have.

      const std::int64_t now2 = wall_clock_us() - t0_us_;
      if (now2 - last_timer_poll_us >= kTimerPollUs) {
        last_timer_poll_us = now2;
        for (int i = 0; i < static_cast<int>(agents_.size()); ++i) try_quote(i);
      }
    }

    // Grace drain: stop quoting, absorb in-flight reports and datagrams so
    // the books balance, then hand back the session.
    trading_enabled_ = false;
    const std::int64_t drain_end = wall_clock_us() + 200'000;
    while (wall_clock_us() < drain_end && stream_open_) {
      flush_outbound();  // Everything queued before cutoff comes due in here.
      if (!poll_feed(feed.value())) break;
      if (!poll_session()) break;
    }

    // Logout handshake; best-effort if the session already dropped.
    if (stream_open_) {
      auto st = send(fix::msg::kLogout, {});
      if (st.ok()) await_msg_type(fix::msg::kLogout, 2000);
      stream_.shutdown_both();
    }

    finalize_results();
    if (!cfg_.out_dir.empty()) {
      auto st = write_outputs();
      if (!st.ok()) return st.error();
    }
    return result_;
  }

  const std::vector<agents::Agent>& agents() const { return agents_; }

 private:
  static constexpr std::uint64_t kSchedulerStream = 1'000'000;
  static constexpr std::int64_t kTimerPollUs = 100'000;  // Wakes lurkers eventually.

  void build_agents() {
    agents_.clear();
    agents::AgentParams params;
    params.p_max = cfg_.max_price;
    // Planner convention: indices [0, n_buyers) are buyers, the rest sellers.
    for (int pass = 0; pass < 2; ++pass) {
      const lob::Side want = pass == 0 ? lob::Side::Bid : lob::Side::Ask;
      for (const auto& entry : cfg_.roster) {
        if (entry.side != want) continue;
        for (int k = 0; k < entry.count; ++k) {
          const int idx = static_cast<int>(agents_.size());
          std::string id = std::string(agents::strategy_name(entry.strategy)) + "-" +
                           (want == lob::Side::Bid ? "B" : "S") + std::to_string(k);
          agents_.emplace_back(std::move(id), entry.strategy, want,
                               derive_seed(cfg_.seed, static_cast<std::uint64_t>(idx)),
                               params);
        }
      }
      if (pass == 0) n_buyers_ = static_cast<int>(agents_.size());
    }
    n_sellers_ = static_cast<int>(agents_.size()) - n_buyers_;
  }

  Status<> send(const std::string& msg_type, std::vector<fix::Field> body) {
    auto wire = fix::serialize(sess_.build(msg_type, std::move(body), wall_clock_us()));
    if (!wire.ok()) return wire.error();
    auto st = stream_.write_all(wire.value());
    if (!st.ok()) {
      stream_open_ = false;
      return Error{"order session write: " + st.error().message};
    }
    return ok_status();
  }

  // Business traffic goes through the simulated order pipe: a constant
  // one-way shift, FIFO, like the feed-side delay in the other direction.
  // Session administration (logon, logout) bypasses it.
  Status<> send_business(const std::string& msg_type, std::vector<fix::Field> body) {
    if (cfg_.order_delay_ms == 0) return send(msg_type, std::move(body));
    outbound_.push_back(
        {wall_clock_us() + cfg_.order_delay_ms * 1000, msg_type, std::move(body)});
    return ok_status();
  }

  void flush_outbound() {
    const std::int64_t now = wall_clock_us();
    while (!outbound_.empty() && outbound_.front().due_wall_us <= now && stream_open_) {
      auto& p = outbound_.front();
      send(p.msg_type, std::move(p.body)).ok();
      outbound_.pop_front();
    }
  }

  void request_cancel(int agent_idx, const std::string& orig_cl_ord_id) {
    if (cancels_in_flight_.count(orig_cl_ord_id)) return;
    const std::string req_id = agents_[static_cast<std::size_t>(agent_idx)].trader_id() +
                               "-c" + std::to_string(++ord_counter_);
    std::vector<fix::Field> body;
    body.emplace_back(fix::tag::kOrigClOrdId, orig_cl_ord_id);
    body.emplace_back(fix::tag::kClOrdId, req_id);
    body.emplace_back(fix::tag::kSymbol, cfg_.symbol);
    body.emplace_back(fix::tag::kSide, agents_[static_cast<std::size_t>(agent_idx)].role() ==
                                               lob::Side::Bid
                                           ? "1"
                                           : "2");
    if (send_business(fix::msg::kOrderCancelRequest, std::move(body)).ok()) {
      cancels_in_flight_.insert(orig_cl_ord_id);
      cancel_req_orig_[req_id] = orig_cl_ord_id;
      ++result_.cancels_sent;
    }
  }

  void try_quote(int agent_idx) {
    if (!trading_enabled_ || !stream_open_) return;
    auto& agent = agents_[static_cast<std::size_t>(agent_idx)];
    if (!agent.assignment() || agent.cancel_pending()) return;
    const std::int64_t now_rel = wall_clock_us() - t0_us_;
    if (now_rel >= agent.assignment()->expiry_time_us) {
      // Expired assignment: withdraw any live quote and stay quiet until the
      // next reissue, so dead limits cannot distort price formation.
      if (agent.live_order() && !cancels_in_flight_.count(agent.live_order()->cl_ord_id))
        request_cancel(agent_idx, agent.live_order()->cl_ord_id);
      return;
    }
    auto proposal = agent.quote(view_, now_rel);
    if (!proposal) return;

    if (agent.live_order()) {
      const auto& live = *agent.live_order();
      if (cancels_in_flight_.count(live.cl_ord_id)) return;
      if (live.price == proposal->price) return;  // Nothing to improve.
      if ((now_rel - live.placed_time_us) < cfg_.requote_min_ms * 1000) return;
      request_cancel(agent_idx, live.cl_ord_id);  // Replace on the next pass.
      return;
    }

    const std::string cl_ord_id =
        agent.trader_id() + "-" + std::to_string(++ord_counter_);
    std::vector<fix::Field> body;
    body.emplace_back(fix::tag::kClOrdId, cl_ord_id);
    body.emplace_back(fix::tag::kSymbol, cfg_.symbol);
    body.emplace_back(fix::tag::kSide, proposal->side == lob::Side::Bid ? "1" : "2");
    body.emplace_back(fix::tag::kOrderQty, std::to_string(proposal->qty));
    body.emplace_back(fix::tag::kPrice, std::to_string(proposal->price));
    body.emplace_back(fix::tag::kOrdType, "2");
    if (send_business(fix::msg::kNewOrderSingle, std::move(body)).ok()) {
      agent.on_order_placed(cl_ord_id, proposal->price, proposal->qty, now_rel);
      ord_owner_[cl_ord_id] = agent_idx;
      ++result_.orders_sent;
    }
  }

  // Drains every waiting datagram; adopts the newest snapshot; samples latency.
  bool poll_feed(net::UdpSocket& feed) {
    bool adopted = false;
    int timeout_ms = 1;
    while (true) {
      auto datagram = feed.recv(timeout_ms);
      timeout_ms = 0;  // First wait is the loop pacing; drains are instant.
      if (!datagram.ok()) return false;
      if (!datagram.value().has_value()) break;
      const std::int64_t recv_wall = wall_clock_us();
      auto snap = md::decode_snapshot(datagram.value()->data(), datagram.value()->size());
      if (!snap.ok()) {
        ++result_.protocol_errors;
        continue;
      }
      ++result_.datagrams;
      const auto& s = snap.value();
      result_.latency.push_back(
          {s.seq, s.send_ts_us, recv_wall, recv_wall - s.send_ts_us});
      if (last_seq_ != 0) {  // First contact is a mid-stream join, not a gap.
        auto gap = md::check_gap(last_seq_, s.seq);
        switch (gap.kind) {
          case md::SeqCheck::Duplicate:
            ++result_.duplicate_datagrams;
            continue;  // Stale or replayed: keep the newer book.
          case md::SeqCheck::Gap:
            ++result_.gap_events;
            result_.missed_datagrams += static_cast<std::uint64_t>(gap.missed);
            break;
          case md::SeqCheck::Continuous:
            break;
        }
      }
      last_seq_ = s.seq;
      view_.snapshot = s;
      view_.recv_time_us = recv_wall;
      adopted = true;
    }
    if (adopted)
      for (int i = 0; i < static_cast<int>(agents_.size()); ++i) try_quote(i);
    return true;
  }

  // Reads whatever the order session has for us; false once the peer is gone.
  bool poll_session() {
    if (!stream_open_) return false;
    char buf[4096];
    auto got = stream_.read_some(buf, sizeof buf, 1);
    if (!got.ok()) {
      stream_open_ = false;
      return false;
    }
    if (got.value().has_value()) {
      if (*got.value() == 0) {
        stream_open_ = false;
        return false;
      }
      framer_.feed(buf, *got.value());
    }
    while (true) {
      auto framed = framer_.next();
      if (!framed.ok()) {
        ++result_.protocol_errors;
        stream_open_ = false;
        return false;
      }
      if (!framed.value().has_value()) break;
      auto parsed = fix::parse(*framed.value());
      if (!parsed.ok()) {
        ++result_.protocol_errors;
        continue;
      }
      auto st = sess_.accept_inbound(parsed.value());
      if (!st.ok()) {
        ++result_.protocol_errors;
        continue;
      }
      handle_inbound(parsed.value());
    }
    return true;
  }

  void handle_inbound(const fix::FixMessage& m) {
    const std::string type = m.msg_type();
    if (type == fix::msg::kExecutionReport) {
      handle_exec_report(m);
    } else if (type == fix::msg::kOrderCancelReject) {
      handle_cancel_reject(m);
    } else if (type == fix::msg::kLogout) {
      stream_open_ = false;  // Unsolicited logout: stop trading.
    }
    // Heartbeats and logon echoes need no action here.
  }

  void handle_exec_report(const fix::FixMessage& m) {
    const std::string cl_ord_id = m.cl_ord_id();
    auto it = ord_owner_.find(cl_ord_id);
    if (it == ord_owner_.end()) {
      ++result_.protocol_errors;
      return;
    }
    auto& agent = agents_[static_cast<std::size_t>(it->second)];
    const std::string exec_type = m.exec_type();
    if (exec_type == fix::exec::kNew) return;  // Resting ack.
    if (exec_type == fix::exec::kRejected) {
      agent.on_rejected(cl_ord_id);
      ++result_.order_rejects;
      try_quote(it->second);
      return;
    }
    if (exec_type == fix::exec::kCanceled) {
      agent.on_canceled(cl_ord_id);
      cancels_in_flight_.erase(cl_ord_id);
      try_quote(it->second);
      return;
    }
    if (exec_type == fix::exec::kPartialFill || exec_type == fix::exec::kFill) {
      const std::int64_t px = m.last_px().value_or(0);
      const std::int64_t qty = m.last_qty().value_or(0);
      if (qty <= 0) {
        ++result_.protocol_errors;
        return;
      }
      const std::int64_t limit =
          agent.assignment() ? agent.assignment()->limit_price : 0;
      auto st = agent.on_fill(px, qty);
      if (!st.ok()) {
        ++result_.protocol_errors;
        std::fprintf(stderr, "[%s] %s\n", cfg_.comp_id.c_str(), st.error().message.c_str());
        return;
      }
      TradeRecord rec;
      rec.recv_wall_us = wall_clock_us();
      rec.trader = agent.trader_id();
      rec.strategy = agent.strategy();
      rec.side = agent.role();
      rec.price = px;
      rec.qty = qty;
      rec.limit_price = limit;
      rec.profit_delta = (agent.role() == lob::Side::Bid) ? (limit - px) * qty
                                                          : (px - limit) * qty;
      result_.trades.push_back(std::move(rec));
      if (!agent.live_order()) cancels_in_flight_.erase(cl_ord_id);
      try_quote(it->second);
    }
  }

  void handle_cancel_reject(const fix::FixMessage& m) {
    // The cancel lost a race with a fill (or named a dead order). The order
    // is certainly no longer live, so clear any lingering local state.
    auto req = cancel_req_orig_.find(m.cl_ord_id());
    const std::string orig = req != cancel_req_orig_.end() ? req->second : m.orig_cl_ord_id();
    if (orig.empty()) return;
    cancels_in_flight_.erase(orig);
    auto it = ord_owner_.find(orig);
    if (it != ord_owner_.end()) {
      agents_[static_cast<std::size_t>(it->second)].on_canceled(orig);
      try_quote(it->second);
    }
  }

  // Waits for a message of the given type, handling everything else normally.
  bool await_msg_type(const std::string& msg_type, int timeout_ms) {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    char buf[4096];
    while (std::chrono::steady_clock::now() < deadline) {
      auto framed = framer_.next();
      if (!framed.ok()) return false;
      if (framed.value().has_value()) {
        auto parsed = fix::parse(*framed.value());
        if (!parsed.ok()) continue;
        if (!sess_.accept_inbound(parsed.value()).ok()) continue;
        if (parsed.value().msg_type() == msg_type) return true;
        handle_inbound(parsed.value());
        continue;
      }
      auto got = stream_.read_some(buf, sizeof buf, 50);
      if (!got.ok()) return false;
      if (got.value().has_value()) {
        if (*got.value() == 0) {
          stream_open_ = false;
          return false;
        }
        framer_.feed(buf, *got.value());
      }
    }
    return false;
  }

  void finalize_results() {
    result_.traders.clear();
    for (const auto& a : agents_)
      result_.traders.push_back(
          {a.trader_id(), a.strategy(), a.role(), a.profit(), a.filled_qty()});
  }

  Status<> write_outputs() const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg_.out_dir, ec);
    if (ec) return Error{"create " + cfg_.out_dir + ": " + ec.message()};

    {
      std::ofstream out(cfg_.out_dir + "/latency.csv");
      out << "seq,send_ts_us,recv_wall_us,latency_us\n";
      for (const auto& s : result_.latency)
        out << s.seq << "," << s.send_ts_us << "," << s.recv_wall_us << ","
            << s.latency_us << "\n";
      if (!out) return Error{"write latency.csv failed"};
    }
    {
      std::ofstream out(cfg_.out_dir + "/trades.csv");
      out << "recv_wall_us,trader,strategy,side,price,qty,limit_price,profit_delta\n";
      for (const auto& t : result_.trades)
        out << t.recv_wall_us << "," << t.trader << "," << agents::strategy_name(t.strategy)
            << "," << (t.side == lob::Side::Bid ? "B" : "S") << "," << t.price << ","
            << t.qty << "," << t.limit_price << "," << t.profit_delta << "\n";
      if (!out) return Error{"write trades.csv failed"};
    }
    {
      std::ofstream out(cfg_.out_dir + "/profits.csv");
      out << "trader,strategy,side,profit_ticks,filled_qty\n";
      for (const auto& t : result_.traders)
        out << t.trader << "," << agents::strategy_name(t.strategy) << ","
            << (t.side == lob::Side::Bid ? "B" : "S") << "," << t.profit << ","
            << t.filled_qty << "\n";
      if (!out) return Error{"write profits.csv failed"};
    }
    {
      std::ofstream out(cfg_.out_dir + "/client_summary.csv");
      out << "comp_id,datagrams,gap_events,missed_datagrams,duplicate_datagrams,"
             "orders_sent,cancels_sent,order_rejects,protocol_errors,trades\n";
      out << cfg_.comp_id << "," << result_.datagrams << "," << result_.gap_events << ","
          << result_.missed_datagrams << "," << result_.duplicate_datagrams << ","
          << result_.orders_sent << "," << result_.cancels_sent << ","
          << result_.order_rejects << "," << result_.protocol_errors << ","
          << result_.trades.size() << "\n";
      if (!out) return Error{"write client_summary.csv failed"};
    }
    return ok_status();
  }

  ClientConfig cfg_;
  std::vector<agents::Agent> agents_;
  int n_buyers_ = 0;
  int n_sellers_ = 0;
  std::vector<sched::PlannedAssignment> plan_;

  net::TcpStream stream_;
  bool stream_open_ = true;
  bool trading_enabled_ = true;
  fix::Session sess_{"CLNT", "EXCH"};
  fix::Framer framer_;

  struct PendingSend {
    std::int64_t due_wall_us = 0;
    std::string msg_type;
    std::vector<fix::Field> body;
  };
  std::deque<PendingSend> outbound_;  // The simulated order pipe (FIFO).

  agents::MarketView view_;
  std::uint64_t last_seq_ = 0;
  std::int64_t t0_us_ = 0;
  std::uint64_t ord_counter_ = 0;
  std::unordered_map<std::string, int> ord_owner_;
  std::unordered_set<std::string> cancels_in_flight_;
  std::unordered_map<std::string, std::string> cancel_req_orig_;

  SessionResult result_;
};

}  // namespace dexsim::client
