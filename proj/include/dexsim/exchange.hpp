#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dexsim/clock.hpp"
#include "dexsim/config.hpp"
#include "dexsim/fix.hpp"
#include "dexsim/lob.hpp"
#include "dexsim/md.hpp"
#include "dexsim/net.hpp"
#include "dexsim/result.hpp"
#include "dexsim/util.hpp"

namespace dexsim::exch {

// One admitted command, stamped into the total order consumed by the
// matching loop. A flat struct rather than a variant: only the fields for
// the given kind are meaningful.
struct EngineEvent {
  enum class Kind { NewOrder, Cancel, SessionClosed };
  Kind kind = Kind::NewOrder;
  std::int64_t admission_seq = 0;  // Strictly increasing admission stamp.
  std::int64_t ts_us = 0;          // Wall clock at admission; becomes exec time.
  std::string comp_id;             // Owning session for all kinds.
  // NewOrder fields.
  std::string cl_ord_id;
  std::string symbol;
  lob::Side side = lob::Side::Bid;
  std::int64_t price = 0;
  std::int64_t qty = 0;
  // Cancel fields (cl_ord_id above is the cancel request's own id).
  std::string orig_cl_ord_id;
};

// An application-level outbound message, addressed by session comp id. The
// session layer wraps it in the standard header and serializes it.
struct OutMsg {
  std::string comp_id;
  std::string msg_type;
  std::vector<fix::Field> body;
};

// The matching core: consumes admission-ordered events, owns the book,
// produces execution reports. Single-consumer by contract — no locking here.
// Deterministic: the same event sequence always yields the same tape and the
// same outbound messages.
class Engine {
 public:
  Engine(std::string symbol, std::int64_t max_price)
      : symbol_(std::move(symbol)), book_(max_price) {}

  const lob::Book& book() const { return book_; }
  const std::string& symbol() const { return symbol_; }

  // True if the book or tape changed since the last call; resets the flag.
  bool take_dirty() {
    const bool d = dirty_;
    dirty_ = false;
    return d;
  }

  std::vector<OutMsg> consume(const EngineEvent& ev) {
    switch (ev.kind) {
      case EngineEvent::Kind::NewOrder:
        return on_new_order(ev);
      case EngineEvent::Kind::Cancel:
        return on_cancel(ev);
      case EngineEvent::Kind::SessionClosed:
        return {};  // Orders survive disconnect; nothing to do.
    }
    return {};
  }

 private:
  struct OrderState {
    std::uint64_t book_id = 0;
    std::string comp_id;
    std::string cl_ord_id;
    lob::Side side = lob::Side::Bid;
    std::int64_t price = 0;
    std::int64_t orig_qty = 0;
    std::int64_t leaves = 0;
  };

  static const char* side_code(lob::Side s) {
    return s == lob::Side::Bid ? fix::side::kBuy : fix::side::kSell;
  }

  OutMsg exec_report(const OrderState& o, const char* exec_type, const char* ord_status,
                     std::int64_t last_px, std::int64_t last_qty,
                     const std::string& text = "") {
    OutMsg m;
    m.comp_id = o.comp_id;
    m.msg_type = fix::msg::kExecutionReport;
    auto& b = m.body;
    b.emplace_back(fix::tag::kOrderId, std::to_string(o.book_id));
    b.emplace_back(fix::tag::kClOrdId, o.cl_ord_id);
    b.emplace_back(fix::tag::kExecId, std::to_string(next_exec_id_++));
    b.emplace_back(fix::tag::kExecType, exec_type);
    b.emplace_back(fix::tag::kOrdStatus, ord_status);
    b.emplace_back(fix::tag::kSymbol, symbol_);
    b.emplace_back(fix::tag::kSide, side_code(o.side));
    b.emplace_back(fix::tag::kOrderQty, std::to_string(o.orig_qty));
    b.emplace_back(fix::tag::kPrice, std::to_string(o.price));
    b.emplace_back(fix::tag::kLeavesQty, std::to_string(o.leaves));
    b.emplace_back(fix::tag::kCumQty, std::to_string(o.orig_qty - o.leaves));
    if (last_qty > 0) {
      b.emplace_back(fix::tag::kLastPx, std::to_string(last_px));
      b.emplace_back(fix::tag::kLastQty, std::to_string(last_qty));
    }
    if (!text.empty()) b.emplace_back(fix::tag::kText, text);
    return m;
  }

  OutMsg reject_new(const EngineEvent& ev, const std::string& why) {
    OrderState st;
    st.comp_id = ev.comp_id;
    st.cl_ord_id = ev.cl_ord_id;
    st.side = ev.side;
    st.price = ev.price;
    st.orig_qty = ev.qty;
    st.leaves = 0;
    return exec_report(st, fix::exec::kRejected, fix::exec::kRejected, 0, 0, why);
  }

  OutMsg cancel_reject(const EngineEvent& ev, const std::string& why) {
    OutMsg m;
    m.comp_id = ev.comp_id;
    m.msg_type = fix::msg::kOrderCancelReject;
    m.body.emplace_back(fix::tag::kClOrdId, ev.cl_ord_id);
    m.body.emplace_back(fix::tag::kOrigClOrdId, ev.orig_cl_ord_id);
    m.body.emplace_back(fix::tag::kOrderId, "NONE");
    m.body.emplace_back(fix::tag::kOrdStatus, fix::exec::kRejected);
    m.body.emplace_back(fix::tag::kCxlRejReason, "1");  // Unknown order.
    m.body.emplace_back(fix::tag::kText, why);
    return m;
  }

  std::vector<OutMsg> on_new_order(const EngineEvent& ev) {
    std::vector<OutMsg> out;
    const std::string key = ev.comp_id + "|" + ev.cl_ord_id;
    if (by_key_.count(key) != 0) {
      out.push_back(reject_new(ev, "duplicate ClOrdID " + ev.cl_ord_id));
      return out;
    }
    if (ev.symbol != symbol_) {
      out.push_back(reject_new(ev, "unknown symbol " + ev.symbol));
      return out;
    }

    lob::Order order;
    order.order_id = next_book_id_++;
    order.client_id = ev.comp_id;
    order.trader_id = ev.comp_id + "/" + ev.cl_ord_id;
    order.side = ev.side;
    order.price = ev.price;
    order.qty = ev.qty;

    auto res = book_.add(order, ev.ts_us);
    if (!res.ok()) {
      out.push_back(reject_new(ev, res.error().message));
      return out;
    }
    dirty_ = true;

    OrderState st;
    st.book_id = order.order_id;
    st.comp_id = ev.comp_id;
    st.cl_ord_id = ev.cl_ord_id;
    st.side = ev.side;
    st.price = ev.price;
    st.orig_qty = ev.qty;
    st.leaves = ev.qty;
    by_key_[key] = st.book_id;

    // Acknowledge first, then report fills in match order.
    out.push_back(exec_report(st, fix::exec::kNew, fix::exec::kNew, 0, 0));

    for (const lob::Trade& t : res.value().trades) {
      st.leaves -= t.qty;
      const char* status = st.leaves > 0 ? fix::exec::kPartialFill : fix::exec::kFill;
      out.push_back(exec_report(st, status, status, t.price, t.qty));

      const std::uint64_t contra_id =
          ev.side == lob::Side::Bid ? t.sell_order_id : t.buy_order_id;
      auto it = orders_.find(contra_id);
      if (it != orders_.end()) {
        OrderState& contra = it->second;
        contra.leaves -= t.qty;
        const char* cstat = contra.leaves > 0 ? fix::exec::kPartialFill : fix::exec::kFill;
        out.push_back(exec_report(contra, cstat, cstat, t.price, t.qty));
      }
    }
    orders_[st.book_id] = st;
    return out;
  }

  std::vector<OutMsg> on_cancel(const EngineEvent& ev) {
    std::vector<OutMsg> out;
    auto key_it = by_key_.find(ev.comp_id + "|" + ev.orig_cl_ord_id);
    if (key_it == by_key_.end()) {
      out.push_back(cancel_reject(ev, "unknown order " + ev.orig_cl_ord_id));
      return out;
    }
    OrderState& st = orders_.at(key_it->second);
    auto res = book_.cancel(st.book_id, ev.comp_id);
    if (!res.ok()) {
      out.push_back(cancel_reject(ev, res.error().message));
      return out;
    }
    dirty_ = true;
    st.leaves = 0;
    OutMsg m = exec_report(st, fix::exec::kCanceled, fix::exec::kCanceled, 0, 0);
    m.body.emplace_back(fix::tag::kOrigClOrdId, ev.orig_cl_ord_id);
    out.push_back(std::move(m));
    return out;
  }

  std::string symbol_;
  lob::Book book_;
  bool dirty_ = false;
  std::uint64_t next_book_id_ = 1;
  std::uint64_t next_exec_id_ = 1;
  std::unordered_map<std::string, std::uint64_t> by_key_;  // comp|cl_ord_id -> book id
  std::unordered_map<std::uint64_t, OrderState> orders_;
};

// ---------------------------------------------------------------------------
// Networked exchange process wrapper.

struct ExchangeConfig {
  net::Endpoint listen{"127.0.0.1", 0};
  std::string comp_id = "EXCH";
  std::string symbol = "DBX";
  std::int64_t max_price = 1000;
  std::int64_t min_publish_interval_ms = 100;
  md::FeedMode feed_mode = md::FeedMode::Unicast;
  std::vector<md::FeedClient> md_clients;  // Unicast destinations.
  net::Endpoint md_group;                  // Multicast group when enabled.
  std::string out_dir;                     // Ready file + CSV dumps; empty = none.
  int heartbeat_s = 30;

  // Keys: listen, symbol, max_price, min_publish_interval_ms, feed_mode,
  // md_clients (host:port:delay_ms list), md_group, out_dir.
  static Expected<ExchangeConfig> from_config(const Config& cfg) {
    ExchangeConfig out;
    auto listen = net::parse_endpoint(cfg.get_or("listen", "127.0.0.1:0"));
    if (!listen.ok()) return listen.error();
    out.listen = listen.value();
    out.comp_id = cfg.get_or("comp_id", "EXCH");
    out.symbol = cfg.get_or("symbol", "DBX");
    out.max_price = cfg.get_int_or("max_price", 1000);
    if (out.max_price < 1) return Error{"max_price must be >= 1"};
    out.min_publish_interval_ms = cfg.get_int_or("min_publish_interval_ms", 100);
    if (out.min_publish_interval_ms < 0) return Error{"min_publish_interval_ms must be >= 0"};
    const std::string mode = cfg.get_or("feed_mode", "unicast");
    if (mode == "unicast") {
      out.feed_mode = md::FeedMode::Unicast;
    } else if (mode == "multicast") {
      out.feed_mode = md::FeedMode::Multicast;
      auto group = net::parse_endpoint(cfg.get_or("md_group", ""));
      if (!group.ok()) return Error{"multicast feed_mode needs md_group: " + group.error().message};
      out.md_group = group.value();
    } else {
      return Error{"feed_mode must be unicast or multicast"};
    }
    int ordinal = 1;
    for (const std::string& item : cfg.get_list_or("md_clients")) {
      auto parts = split(item, ':');
      if (parts.size() != 3) return Error{"md_clients entry wants host:port:delay_ms: " + item};
      auto ep = net::parse_endpoint(parts[0] + ":" + parts[1]);
      if (!ep.ok()) return ep.error();
      md::FeedClient fc;
      fc.dest = ep.value();
      fc.ordinal = ordinal++;
      try {
        fc.injected_delay_ms = std::stoll(parts[2]);
      } catch (const std::exception&) {
        return Error{"bad md_clients delay: " + item};
      }
      if (fc.injected_delay_ms < 0) return Error{"negative md_clients delay: " + item};
      out.md_clients.push_back(fc);
    }
    out.out_dir = cfg.get_or("out_dir", "");
    out.heartbeat_s = static_cast<int>(cfg.get_int_or("heartbeat_s", 30));
    return out;
  }
};

// The exchange process: TCP FIX sessions feeding one admission-ordered queue
// consumed by a single matching thread, which also drives the market-data
// publisher (event-driven, throttled to min_publish_interval_ms).
class ExchangeServer {
 public:
  explicit ExchangeServer(ExchangeConfig cfg) : cfg_(std::move(cfg)) {}

  ~ExchangeServer() { stop(); }
  ExchangeServer(const ExchangeServer&) = delete;
  ExchangeServer& operator=(const ExchangeServer&) = delete;

  Status<> start() {
    auto listener = net::TcpListener::bind(cfg_.listen);
    if (!listener.ok()) return listener.error();
    listener_.emplace(std::move(listener.value()));

    auto feed_sock = net::UdpSocket::unbound();
    if (!feed_sock.ok()) return feed_sock.error();
    if (cfg_.feed_mode == md::FeedMode::Multicast) {
      auto st = feed_sock.value().set_multicast_send_iface("127.0.0.1");
      if (!st.ok()) return st.error();
      publisher_ = std::make_unique<md::Publisher>(std::move(feed_sock.value()), cfg_.md_group);
    } else {
      publisher_ =
          std::make_unique<md::Publisher>(std::move(feed_sock.value()), cfg_.md_clients);
    }

    engine_ = std::make_unique<Engine>(cfg_.symbol, cfg_.max_price);
    start_wall_us_ = wall_clock_us();
    running_ = true;
    match_thread_ = std::thread([this] { match_loop(); });
    accept_thread_ = std::thread([this] { accept_loop(); });

    if (!cfg_.out_dir.empty()) {
      std::ofstream ready(cfg_.out_dir + "/exchange.ready");
      ready << "port=" << listener_->local_port() << "\n"
            << "start_us=" << start_wall_us_ << "\n";
    }
    return ok_status();
  }

  void stop() {
    bool was_running = running_.exchange(false);
    if (!was_running && !match_thread_.joinable()) return;
    if (accept_thread_.joinable()) accept_thread_.join();
    {
      std::lock_guard<std::mutex> lk(reg_mu_);
      for (auto& [comp, handle] : registry_) {
        std::lock_guard<std::mutex> hl(handle->mu);
        handle->stream.shutdown_both();
      }
    }
    for (std::thread& t : session_threads_)
      if (t.joinable()) t.join();
    session_threads_.clear();
    queue_.close();
    if (match_thread_.joinable()) match_thread_.join();
    listener_.reset();
    if (!cfg_.out_dir.empty()) write_outputs();
  }

  std::uint16_t port() const { return listener_ ? listener_->local_port() : 0; }
  std::int64_t start_wall_us() const { return start_wall_us_; }
  std::uint64_t publish_count() const { return publish_count_.load(); }

  // Post-stop inspection only: the matching thread owns these while running.
  const lob::Book& book() const { return engine_->book(); }
  const std::vector<md::PublishResult>& publish_log() const { return publish_log_; }

 private:
  struct SessionHandle {
    std::mutex mu;
    fix::Session fix;
    net::TcpStream stream;
    std::string comp;
    bool open = true;
    explicit SessionHandle(net::TcpStream s) : stream(std::move(s)) {}
  };

  void accept_loop() {
    while (running_) {
      auto accepted = listener_->accept(100);
      if (!accepted.ok()) {
        if (running_)
          std::fprintf(stderr, "[exchange] accept: %s\n", accepted.error().message.c_str());
        break;
      }
      if (!accepted.value().has_value()) continue;  // Timeout; poll the flag.
      auto handle = std::make_shared<SessionHandle>(std::move(*accepted.value()));
      std::lock_guard<std::mutex> lk(reg_mu_);
      session_threads_.emplace_back([this, handle] { session_loop(handle); });
    }
  }

  // Sends a message on the handle's session. Returns false on write failure.
  bool send_on(const std::shared_ptr<SessionHandle>& h, const std::string& msg_type,
               std::vector<fix::Field> body) {
    std::lock_guard<std::mutex> lk(h->mu);
    if (!h->open) return false;
    fix::FixMessage m = h->fix.build(msg_type, std::move(body), wall_clock_us());
    auto wire = fix::serialize(m);
    if (!wire.ok()) {
      std::fprintf(stderr, "[exchange] serialize: %s\n", wire.error().message.c_str());
      return false;
    }
    auto st = h->stream.write_all(wire.value());
    if (!st.ok()) {
      h->open = false;
      return false;
    }
    return true;
  }

  void push_event(EngineEvent ev) {
    ev.ts_us = wall_clock_us();
    // The admission stamp is issued under the queue lock: one total order.
    queue_.push_stamping(std::move(ev),
                         [](EngineEvent& e, std::int64_t seq) { e.admission_seq = seq; });
  }

  void session_loop(std::shared_ptr<SessionHandle> handle) {
    fix::Framer framer;
    char buf[4096];
    bool registered = false;
    std::string comp;

    auto fail_session = [&](const std::string& why) {
      std::fprintf(stderr, "[exchange] session %s: %s\n",
                   comp.empty() ? "?" : comp.c_str(), why.c_str());
      std::lock_guard<std::mutex> lk(handle->mu);
      handle->open = false;
      handle->stream.shutdown_both();
    };

    while (running_) {
      {
        std::lock_guard<std::mutex> lk(handle->mu);
        if (!handle->open) break;
      }
      auto got = handle->stream.read_some(buf, sizeof buf, 100);
      if (!got.ok()) {
        fail_session(got.error().message);
        break;
      }
      if (!got.value().has_value()) continue;  // Timeout.
      if (*got.value() == 0) break;            // Peer closed.
      framer.feed(buf, *got.value());

      while (true) {
        auto framed = framer.next();
        if (!framed.ok()) {
          fail_session("framing: " + framed.error().message);
          break;
        }
        if (!framed.value().has_value()) break;
        auto parsed = fix::parse(*framed.value());
        if (!parsed.ok()) {
          fail_session("parse: " + parsed.error().message);
          break;
        }
        const fix::FixMessage& m = parsed.value();

        if (!registered) {
          if (m.kind() != fix::MsgKind::Logon) {
            fail_session("first message must be Logon");
            break;
          }
          comp = m.sender();
          if (comp.empty()) {
            fail_session("Logon without SenderCompID");
            break;
          }
          {
            std::lock_guard<std::mutex> lk(handle->mu);
            handle->comp = comp;
            handle->fix = fix::Session(cfg_.comp_id, comp);
          }
          if (!register_session(handle)) {
            fail_session("duplicate active session for " + comp);
            break;
          }
          registered = true;
        }

        Status<> ok = [&] {
          std::lock_guard<std::mutex> lk(handle->mu);
          return handle->fix.accept_inbound(m);
        }();
        if (!ok.ok()) {
          fail_session(ok.error().message);
          break;
        }
        if (!dispatch_inbound(handle, m)) break;  // Logout.
      }
      {
        std::lock_guard<std::mutex> lk(handle->mu);
        if (!handle->open) break;
      }
    }

    if (registered) {
      EngineEvent ev;
      ev.kind = EngineEvent::Kind::SessionClosed;
      ev.comp_id = comp;
      push_event(std::move(ev));
      unregister_session(comp, handle);
    }
  }

  // Returns false when the session should wind down (Logout).
  bool dispatch_inbound(const std::shared_ptr<SessionHandle>& h, const fix::FixMessage& m) {
    switch (m.kind()) {
      case fix::MsgKind::Logon: {
        std::vector<fix::Field> body;
        body.emplace_back(fix::tag::kEncryptMethod, "0");
        body.emplace_back(fix::tag::kHeartBtInt, std::to_string(cfg_.heartbeat_s));
        send_on(h, fix::msg::kLogon, std::move(body));
        return true;
      }
      case fix::MsgKind::Heartbeat:
        return true;  // Liveness only.
      case fix::MsgKind::Logout: {
        send_on(h, fix::msg::kLogout, {});
        std::lock_guard<std::mutex> lk(h->mu);
        h->open = false;
        return false;
      }
      case fix::MsgKind::NewOrderSingle:
        handle_new_order(h, m);
        return true;
      case fix::MsgKind::OrderCancelRequest:
        handle_cancel(h, m);
        return true;
      default: {
        // Business-level reject for anything else, including <G>.
        std::vector<fix::Field> body;
        body.emplace_back(fix::tag::kClOrdId, m.cl_ord_id().empty() ? "NONE" : m.cl_ord_id());
        body.emplace_back(fix::tag::kOrderId, "NONE");
        body.emplace_back(fix::tag::kOrdStatus, fix::exec::kRejected);
        body.emplace_back(fix::tag::kCxlRejReason, "2");
        body.emplace_back(fix::tag::kText, "unsupported MsgType " + m.msg_type());
        send_on(h, fix::msg::kOrderCancelReject, std::move(body));
        return true;
      }
    }
  }

  void handle_new_order(const std::shared_ptr<SessionHandle>& h, const fix::FixMessage& m) {
    auto reject = [&](const std::string& why) {
      std::vector<fix::Field> body;
      body.emplace_back(fix::tag::kOrderId, "NONE");
      body.emplace_back(fix::tag::kClOrdId, m.cl_ord_id().empty() ? "NONE" : m.cl_ord_id());
      body.emplace_back(fix::tag::kExecType, fix::exec::kRejected);
      body.emplace_back(fix::tag::kOrdStatus, fix::exec::kRejected);
      body.emplace_back(fix::tag::kSymbol, cfg_.symbol);
      body.emplace_back(fix::tag::kText, why);
      send_on(h, fix::msg::kExecutionReport, std::move(body));
    };

    const std::string cl_ord_id = m.cl_ord_id();
    const std::string symbol = m.symbol();
    const std::string side_s = m.side();
    auto qty = m.order_qty();
    auto price = m.price();
    if (cl_ord_id.empty() || symbol.empty()) return reject("missing ClOrdID or Symbol");
    if (side_s != fix::side::kBuy && side_s != fix::side::kSell)
      return reject("bad Side " + side_s);
    if (!qty.has_value() || !price.has_value()) return reject("missing OrderQty or Price");

    EngineEvent ev;
    ev.kind = EngineEvent::Kind::NewOrder;
    ev.comp_id = h->comp;
    ev.cl_ord_id = cl_ord_id;
    ev.symbol = symbol;
    ev.side = side_s == fix::side::kBuy ? lob::Side::Bid : lob::Side::Ask;
    ev.price = *price;
    ev.qty = *qty;
    push_event(std::move(ev));
  }

  void handle_cancel(const std::shared_ptr<SessionHandle>& h, const fix::FixMessage& m) {
    const std::string orig = m.orig_cl_ord_id();
    if (orig.empty()) {
      std::vector<fix::Field> body;
      body.emplace_back(fix::tag::kClOrdId, m.cl_ord_id().empty() ? "NONE" : m.cl_ord_id());
      body.emplace_back(fix::tag::kOrigClOrdId, "NONE");
      body.emplace_back(fix::tag::kOrderId, "NONE");
      body.emplace_back(fix::tag::kOrdStatus, fix::exec::kRejected);
      body.emplace_back(fix::tag::kCxlRejReason, "1");
      body.emplace_back(fix::tag::kText, "missing OrigClOrdID");
      send_on(h, fix::msg::kOrderCancelReject, std::move(body));
      return;
    }
    EngineEvent ev;
    ev.kind = EngineEvent::Kind::Cancel;
    ev.comp_id = h->comp;
    ev.cl_ord_id = m.cl_ord_id();
    ev.orig_cl_ord_id = orig;
    push_event(std::move(ev));
  }

  bool register_session(const std::shared_ptr<SessionHandle>& handle) {
    std::lock_guard<std::mutex> lk(reg_mu_);
    auto it = registry_.find(handle->comp);
    if (it != registry_.end()) {
      std::lock_guard<std::mutex> hl(it->second->mu);
      if (it->second->open) return false;  // One active session per comp.
    }
    registry_[handle->comp] = handle;
    return true;
  }

  void unregister_session(const std::string& comp, const std::shared_ptr<SessionHandle>& handle) {
    std::lock_guard<std::mutex> lk(reg_mu_);
    auto it = registry_.find(comp);
    if (it != registry_.end() && it->second == handle) registry_.erase(it);
  }

  void route(const std::vector<OutMsg>& outs) {
    for (const OutMsg& out : outs) {
      std::shared_ptr<SessionHandle> h;
      {
        std::lock_guard<std::mutex> lk(reg_mu_);
        auto it = registry_.find(out.comp_id);
        if (it != registry_.end()) h = it->second;
      }
      if (!h) {
        std::fprintf(stderr, "[exchange] dropping report for offline session %s\n",
                     out.comp_id.c_str());
        continue;
      }
      send_on(h, out.msg_type, out.body);
    }
  }

  void match_loop() {
    maybe_publish(true);  // Baseline snapshot: feed starts at seq 1.
    while (true) {
      auto ev = queue_.pop(std::chrono::milliseconds(5));
      if (ev) {
        auto outs = engine_->consume(*ev);
        route(outs);
        if (engine_->take_dirty()) md_dirty_ = true;
      } else if (!running_ && queue_.size() == 0) {
        break;
      }
      maybe_publish(false);
    }
    if (md_dirty_) maybe_publish(true);  // Trailing flush on shutdown.
  }

  void maybe_publish(bool force) {
    if (!force && !md_dirty_) return;
    const std::int64_t now_ns = mono_clock_ns();
    if (!force && last_publish_ns_ != 0 &&
        now_ns - last_publish_ns_ < cfg_.min_publish_interval_ms * 1'000'000)
      return;
    auto snapshot = engine_->book().snapshot(static_cast<int>(md::kMaxDepth));
    auto res = publisher_->publish(snapshot, cfg_.symbol, wall_clock_us());
    if (!res.ok()) {
      std::fprintf(stderr, "[exchange] publish: %s\n", res.error().message.c_str());
      return;
    }
    publish_log_.push_back(res.value());
    publish_count_.fetch_add(1);
    last_publish_ns_ = now_ns;
    md_dirty_ = false;
  }

  void write_outputs() {
    {
      std::ofstream tape(cfg_.out_dir + "/tape.csv");
      tape << "trade_id,exec_time_us,price,qty,buyer,seller\n";
      for (const lob::Trade& t : engine_->book().tape())
        tape << t.trade_id << ',' << t.exec_time_us << ',' << t.price << ',' << t.qty << ','
             << t.buyer_trader << ',' << t.seller_trader << '\n';
    }
    {
      std::ofstream pubs(cfg_.out_dir + "/publishes.csv");
      pubs << "seq,send_ts_us,ordinal,send_initiated_ns\n";
      for (const md::PublishResult& p : publish_log_)
        for (const md::SendRecord& r : p.records)
          pubs << p.seq << ',' << p.send_ts_us << ',' << r.ordinal << ','
               << r.send_initiated_ns << '\n';
    }
    {
      std::ofstream meta(cfg_.out_dir + "/exchange_summary.csv");
      meta << "publishes,trades,cum_volume\n";
      meta << publish_count_.load() << ',' << engine_->book().tape().size() << ','
           << engine_->book().cum_volume() << '\n';
    }
  }

  ExchangeConfig cfg_;
  std::optional<net::TcpListener> listener_;
  std::unique_ptr<md::Publisher> publisher_;
  std::unique_ptr<Engine> engine_;
  EventQueue<EngineEvent> queue_;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::thread match_thread_;
  std::mutex reg_mu_;
  std::map<std::string, std::shared_ptr<SessionHandle>> registry_;
  std::vector<std::thread> session_threads_;
  bool md_dirty_ = false;
  std::int64_t last_publish_ns_ = 0;
  std::vector<md::PublishResult> publish_log_;
  std::atomic<std::uint64_t> publish_count_{0};
  std::int64_t start_wall_us_ = 0;
};

}  // namespace dexsim::exch
