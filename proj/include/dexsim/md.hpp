#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "dexsim/clock.hpp"
#include "dexsim/lob.hpp"
#include "dexsim/net.hpp"
#include "dexsim/result.hpp"

namespace dexsim::md {

inline constexpr char kMagic[4] = {'D', 'B', 'M', 'D'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr int kMaxDepth = 5;
inline constexpr std::size_t kMaxDatagram = 1200;

struct LastTrade {
  std::int64_t price = 0;
  std::int64_t exec_time_us = 0;
  bool operator==(const LastTrade&) const = default;
};

struct MdSnapshot {
  std::uint64_t seq = 0;       // Starts at 1, strictly increasing per publisher.
  std::int64_t send_ts_us = 0;  // Stamped once per publish, shared by all clients.
  std::string symbol;
  std::vector<lob::Level> bids;  // Best first, at most kMaxDepth.
  std::vector<lob::Level> asks;
  std::optional<LastTrade> last_trade;
  std::uint64_t cum_volume = 0;
  bool operator==(const MdSnapshot&) const = default;
};

namespace detail {

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
  put_u32(out, static_cast<std::uint32_t>(v));
}

// Bounds-checked big-endian reader.
class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}

  bool take_u8(std::uint8_t& v) {
    if (pos_ + 1 > len_) return false;
    v = data_[pos_++];
    return true;
  }
  bool take_u32(std::uint32_t& v) {
    if (pos_ + 4 > len_) return false;
    v = (static_cast<std::uint32_t>(data_[pos_]) << 24) |
        (static_cast<std::uint32_t>(data_[pos_ + 1]) << 16) |
        (static_cast<std::uint32_t>(data_[pos_ + 2]) << 8) |
        static_cast<std::uint32_t>(data_[pos_ + 3]);
    pos_ += 4;
    return true;
  }
  bool take_u64(std::uint64_t& v) {
    std::uint32_t hi = 0, lo = 0;
    if (!take_u32(hi) || !take_u32(lo)) return false;
    v = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return true;
  }
  bool take_bytes(char* dst, std::size_t n) {
    if (pos_ + n > len_) return false;
    for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<char>(data_[pos_ + i]);
    pos_ += n;
    return true;
  }
  std::size_t remaining() const { return len_ - pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t len_;
  std::size_t pos_ = 0;
};

inline bool fits_u32(std::int64_t v) { return v >= 0 && v <= 0xFFFFFFFFLL; }

}  // namespace detail

// Fixed-layout big-endian encoding:
//   magic "DBMD" | version u8 | flags u8 | seq u64 | send_ts u64 |
//   symbol 8B space-padded | bid_count u8 | ask_count u8 |
//   bid levels (u32 price, u32 qty)… | ask levels … |
//   [last trade (u32 price, u64 exec_time) when flag bit2] | cum_volume u64
// Flags: bit0 = bids present, bit1 = asks present, bit2 = last trade present.
inline Expected<std::vector<std::uint8_t>> encode_snapshot(const MdSnapshot& s) {
  if (s.bids.size() > static_cast<std::size_t>(kMaxDepth) ||
      s.asks.size() > static_cast<std::size_t>(kMaxDepth))
    return Error{"depth exceeds " + std::to_string(kMaxDepth) + " levels"};
  if (s.symbol.size() > 8) return Error{"symbol longer than 8 bytes: " + s.symbol};
  if (s.send_ts_us < 0) return Error{"negative send_ts"};
  for (const auto& lvls : {s.bids, s.asks})
    for (const auto& l : lvls)
      if (!detail::fits_u32(l.price) || !detail::fits_u32(l.qty))
        return Error{"level out of u32 range"};
  if (s.last_trade && (!detail::fits_u32(s.last_trade->price) || s.last_trade->exec_time_us < 0))
    return Error{"last trade out of range"};

  std::vector<std::uint8_t> out;
  out.reserve(64 + 8 * (s.bids.size() + s.asks.size()));
  out.insert(out.end(), kMagic, kMagic + 4);
  detail::put_u8(out, kVersion);
  std::uint8_t flags = 0;
  if (!s.bids.empty()) flags |= 1;
  if (!s.asks.empty()) flags |= 2;
  if (s.last_trade) flags |= 4;
  detail::put_u8(out, flags);
  detail::put_u64(out, s.seq);
  detail::put_u64(out, static_cast<std::uint64_t>(s.send_ts_us));
  for (std::size_t i = 0; i < 8; ++i)
    detail::put_u8(out, i < s.symbol.size() ? static_cast<std::uint8_t>(s.symbol[i]) : ' ');
  detail::put_u8(out, static_cast<std::uint8_t>(s.bids.size()));
  detail::put_u8(out, static_cast<std::uint8_t>(s.asks.size()));
  for (const auto& l : s.bids) {
    detail::put_u32(out, static_cast<std::uint32_t>(l.price));
    detail::put_u32(out, static_cast<std::uint32_t>(l.qty));
  }
  for (const auto& l : s.asks) {
    detail::put_u32(out, static_cast<std::uint32_t>(l.price));
    detail::put_u32(out, static_cast<std::uint32_t>(l.qty));
  }
  if (s.last_trade) {
    detail::put_u32(out, static_cast<std::uint32_t>(s.last_trade->price));
    detail::put_u64(out, static_cast<std::uint64_t>(s.last_trade->exec_time_us));
  }
  detail::put_u64(out, s.cum_volume);
  if (out.size() > kMaxDatagram) return Error{"datagram exceeds " + std::to_string(kMaxDatagram)};
  return out;
}

inline Expected<MdSnapshot> decode_snapshot(const std::uint8_t* data, std::size_t len) {
  detail::Reader r(data, len);
  char magic[4];
  if (!r.take_bytes(magic, 4)) return Error{"truncated datagram"};
  if (std::memcmp(magic, kMagic, 4) != 0) return Error{"bad magic"};
  std::uint8_t version = 0, flags = 0;
  if (!r.take_u8(version) || !r.take_u8(flags)) return Error{"truncated datagram"};
  if (version != kVersion) return Error{"unsupported version " + std::to_string(version)};
  if (flags & ~0x07u) return Error{"unknown flag bits"};

  MdSnapshot s;
  std::uint64_t send_ts = 0;
  if (!r.take_u64(s.seq) || !r.take_u64(send_ts)) return Error{"truncated datagram"};
  s.send_ts_us = static_cast<std::int64_t>(send_ts);
  char sym[8];
  if (!r.take_bytes(sym, 8)) return Error{"truncated datagram"};
  std::size_t sym_len = 8;
  while (sym_len > 0 && sym[sym_len - 1] == ' ') --sym_len;
  s.symbol.assign(sym, sym_len);

  std::uint8_t bid_count = 0, ask_count = 0;
  if (!r.take_u8(bid_count) || !r.take_u8(ask_count)) return Error{"truncated datagram"};
  if (bid_count > kMaxDepth || ask_count > kMaxDepth) return Error{"depth count out of range"};
  if ((bid_count > 0) != ((flags & 1) != 0) || (ask_count > 0) != ((flags & 2) != 0))
    return Error{"flags disagree with depth counts"};
  auto take_levels = [&](std::uint8_t count, std::vector<lob::Level>& out) {
    for (std::uint8_t i = 0; i < count; ++i) {
      std::uint32_t price = 0, qty = 0;
      if (!r.take_u32(price) || !r.take_u32(qty)) return false;
      out.push_back({static_cast<std::int64_t>(price), static_cast<std::int64_t>(qty)});
    }
    return true;
  };
  if (!take_levels(bid_count, s.bids) || !take_levels(ask_count, s.asks))
    return Error{"truncated datagram"};
  if (flags & 4) {
    std::uint32_t price = 0;
    std::uint64_t ts = 0;
    if (!r.take_u32(price) || !r.take_u64(ts)) return Error{"truncated datagram"};
    s.last_trade = LastTrade{static_cast<std::int64_t>(price), static_cast<std::int64_t>(ts)};
  }
  if (!r.take_u64(s.cum_volume)) return Error{"truncated datagram"};
  if (r.remaining() != 0) return Error{"trailing bytes after payload"};
  return s;
}

// Builds the publishable view from a book snapshot. The caller supplies seq
// and timestamp; depth truncation happened in Book::snapshot already.
inline MdSnapshot to_md_snapshot(const lob::DepthSnapshot& book, const std::string& symbol,
                                 std::uint64_t seq, std::int64_t send_ts_us) {
  MdSnapshot s;
  s.seq = seq;
  s.send_ts_us = send_ts_us;
  s.symbol = symbol;
  s.bids = book.bids;
  s.asks = book.asks;
  if (book.last_trade) s.last_trade = LastTrade{book.last_trade->price, book.last_trade_time_us};
  s.cum_volume = book.cum_volume;
  return s;
}

enum class SeqCheck { Continuous, Gap, Duplicate };

struct GapResult {
  SeqCheck kind = SeqCheck::Continuous;
  std::uint64_t missed = 0;
  bool operator==(const GapResult&) const = default;
};

inline GapResult check_gap(std::uint64_t last_seq, std::uint64_t incoming_seq) {
  if (incoming_seq == last_seq + 1) return {SeqCheck::Continuous, 0};
  if (incoming_seq > last_seq) return {SeqCheck::Gap, incoming_seq - last_seq - 1};
  return {SeqCheck::Duplicate, 0};
}

struct FeedClient {
  net::Endpoint dest;
  int ordinal = 0;  // 1..K, iteration position.
  std::int64_t injected_delay_ms = 0;
};

struct SendRecord {
  int ordinal = 0;
  std::int64_t send_initiated_ns = 0;  // Monotonic clock.
};

struct PublishResult {
  std::uint64_t seq = 0;
  std::int64_t send_ts_us = 0;
  std::vector<SendRecord> records;
};

enum class FeedMode { Unicast, Multicast };

// Sends each publish to every feed client in ordinal order. Clients with an
// injected delay get their datagram from a background worker that holds it
// until the deadline, so one slow client never stalls the others — the whole
// point of emulating geographic spread on a single host.
class Publisher {
 public:
  Publisher(net::UdpSocket socket, std::vector<FeedClient> clients)
      : socket_(std::move(socket)), clients_(std::move(clients)), mode_(FeedMode::Unicast) {
    start_worker_if_needed();
  }

  // Multicast: one datagram to the group per publish; injected delays are a
  // unicast-only device and are ignored.
  Publisher(net::UdpSocket socket, net::Endpoint group)
      : socket_(std::move(socket)), group_(std::move(group)), mode_(FeedMode::Multicast) {}

  ~Publisher() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable()) worker_.join();
  }

  Publisher(const Publisher&) = delete;
  Publisher& operator=(const Publisher&) = delete;

  std::uint64_t last_seq() const { return seq_; }
  FeedMode mode() const { return mode_; }

  // Stamps seq and send_ts once, encodes once, then iterates clients.
  Expected<PublishResult> publish(const lob::DepthSnapshot& book, const std::string& symbol,
                                  std::int64_t send_ts_us) {
    MdSnapshot snap = to_md_snapshot(book, symbol, seq_ + 1, send_ts_us);
    auto encoded = encode_snapshot(snap);
    if (!encoded.ok()) return encoded.error();
    ++seq_;

    PublishResult result;
    result.seq = seq_;
    result.send_ts_us = send_ts_us;

    if (mode_ == FeedMode::Multicast) {
      std::int64_t ts = stamp_send_initiated();
      auto sent = socket_.send_to(encoded.value().data(), encoded.value().size(), group_);
      if (!sent.ok()) std::fprintf(stderr, "[md] multicast send failed: %s\n", sent.error().message.c_str());
      result.records.push_back({0, ts});
      return result;
    }

    for (const FeedClient& client : clients_) {
      std::int64_t ts = stamp_send_initiated();
      if (client.injected_delay_ms <= 0) {
        auto sent = socket_.send_to(encoded.value().data(), encoded.value().size(), client.dest);
        if (!sent.ok())
          std::fprintf(stderr, "[md] send to %s failed: %s\n", client.dest.to_string().c_str(),
                       sent.error().message.c_str());
      } else {
        std::lock_guard<std::mutex> lk(mu_);
        pending_.push(Pending{ts + client.injected_delay_ms * 1'000'000, enqueue_seq_++,
                              encoded.value(), client.dest});
        cv_.notify_one();
      }
      result.records.push_back({client.ordinal, ts});
    }
    return result;
  }

 private:
  struct Pending {
    std::int64_t deliver_at_ns;
    std::uint64_t order;
    std::vector<std::uint8_t> bytes;
    net::Endpoint dest;
    bool operator>(const Pending& o) const {
      if (deliver_at_ns != o.deliver_at_ns) return deliver_at_ns > o.deliver_at_ns;
      return order > o.order;
    }
  };

  std::int64_t stamp_send_initiated() {
    std::int64_t now = mono_clock_ns();
    if (now <= last_initiated_ns_) now = last_initiated_ns_ + 1;
    last_initiated_ns_ = now;
    return now;
  }

  void start_worker_if_needed() {
    bool any_delay = false;
    for (const auto& c : clients_) any_delay = any_delay || c.injected_delay_ms > 0;
    if (!any_delay) return;
    worker_ = std::thread([this] { worker_loop(); });
  }

  void worker_loop() {
    std::unique_lock<std::mutex> lk(mu_);
    while (true) {
      if (stop_) return;
      if (pending_.empty()) {
        cv_.wait(lk, [this] { return stop_ || !pending_.empty(); });
        continue;
      }
      std::int64_t now = mono_clock_ns();
      const Pending& head = pending_.top();
      if (head.deliver_at_ns > now) {
        cv_.wait_for(lk, std::chrono::nanoseconds(head.deliver_at_ns - now));
        continue;
      }
      Pending item = pending_.top();
      pending_.pop();
      lk.unlock();
      auto sent = socket_.send_to(item.bytes.data(), item.bytes.size(), item.dest);
      if (!sent.ok())
        std::fprintf(stderr, "[md] delayed send to %s failed: %s\n",
                     item.dest.to_string().c_str(), sent.error().message.c_str());
      lk.lock();
    }
  }

  net::UdpSocket socket_;
  std::vector<FeedClient> clients_;
  net::Endpoint group_;
  FeedMode mode_;
  std::uint64_t seq_ = 0;
  std::int64_t last_initiated_ns_ = 0;

  std::mutex mu_;
  std::condition_variable cv_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending_;
  std::uint64_t enqueue_seq_ = 0;
  bool stop_ = false;
  std::thread worker_;
};

}  // namespace dexsim::md
