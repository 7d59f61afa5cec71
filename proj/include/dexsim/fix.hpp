#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dexsim/clock.hpp"
#include "dexsim/result.hpp"

namespace dexsim::fix {

inline constexpr char kSoh = '\x01';
inline constexpr const char* kBeginString = "FIX.4.2";

// Tags used by the subset of the protocol this venue speaks.
namespace tag {
inline constexpr int kBeginString = 8;
inline constexpr int kBodyLength = 9;
inline constexpr int kCheckSum = 10;
inline constexpr int kClOrdId = 11;
inline constexpr int kCumQty = 14;
inline constexpr int kExecId = 17;
inline constexpr int kExecTransType = 20;
inline constexpr int kLastPx = 31;
inline constexpr int kLastQty = 32;
inline constexpr int kMsgSeqNum = 34;
inline constexpr int kMsgType = 35;
inline constexpr int kOrderId = 37;
inline constexpr int kOrderQty = 38;
inline constexpr int kOrdStatus = 39;
inline constexpr int kOrdType = 40;
inline constexpr int kOrigClOrdId = 41;
inline constexpr int kPrice = 44;
inline constexpr int kSenderCompId = 49;
inline constexpr int kSendingTime = 52;
inline constexpr int kSide = 54;
inline constexpr int kSymbol = 55;
inline constexpr int kTargetCompId = 56;
inline constexpr int kText = 58;
inline constexpr int kTransactTime = 60;
inline constexpr int kEncryptMethod = 98;
inline constexpr int kHeartBtInt = 108;
inline constexpr int kCxlRejReason = 102;
inline constexpr int kExecType = 150;
inline constexpr int kLeavesQty = 151;
}  // namespace tag

namespace msg {
inline constexpr const char* kHeartbeat = "0";
inline constexpr const char* kLogon = "A";
inline constexpr const char* kLogout = "5";
inline constexpr const char* kNewOrderSingle = "D";
inline constexpr const char* kExecutionReport = "8";
inline constexpr const char* kOrderCancelRequest = "F";
inline constexpr const char* kOrderCancelReject = "9";
}  // namespace msg

namespace side {
inline constexpr const char* kBuy = "1";
inline constexpr const char* kSell = "2";
}  // namespace side

// ExecType / OrdStatus values shared by tags 150 and 39.
namespace exec {
inline constexpr const char* kNew = "0";
inline constexpr const char* kPartialFill = "1";
inline constexpr const char* kFill = "2";
inline constexpr const char* kCanceled = "4";
inline constexpr const char* kRejected = "8";
}  // namespace exec

// Message kinds the venue understands. Anything else parses fine but is
// classified Unsupported and answered with a business reject.
enum class MsgKind {
  Logon,
  Heartbeat,
  Logout,
  NewOrderSingle,
  ExecutionReport,
  OrderCancelRequest,
  OrderCancelReject,
  Unsupported,
};

inline MsgKind classify(std::string_view msg_type) {
  if (msg_type == msg::kLogon) return MsgKind::Logon;
  if (msg_type == msg::kHeartbeat) return MsgKind::Heartbeat;
  if (msg_type == msg::kLogout) return MsgKind::Logout;
  if (msg_type == msg::kNewOrderSingle) return MsgKind::NewOrderSingle;
  if (msg_type == msg::kExecutionReport) return MsgKind::ExecutionReport;
  if (msg_type == msg::kOrderCancelRequest) return MsgKind::OrderCancelRequest;
  if (msg_type == msg::kOrderCancelReject) return MsgKind::OrderCancelReject;
  return MsgKind::Unsupported;
}

using Field = std::pair<int, std::string>;

struct FixMessage {
  std::vector<Field> fields;  // In wire order; excludes CheckSum(10).
  int checksum = -1;          // Filled by parse().

  const std::string* find(int tg) const {
    for (const auto& [t, v] : fields)
      if (t == tg) return &v;
    return nullptr;
  }

  std::string get_or(int tg, const std::string& fallback) const {
    const std::string* v = find(tg);
    return v ? *v : fallback;
  }

  std::optional<std::int64_t> get_int(int tg) const {
    const std::string* v = find(tg);
    if (!v || v->empty()) return std::nullopt;
    std::int64_t out = 0;
    for (char c : *v) {
      if (c < '0' || c > '9') return std::nullopt;
      out = out * 10 + (c - '0');
      if (out > 1'000'000'000'000LL) return std::nullopt;
    }
    return out;
  }

  std::string msg_type() const { return get_or(tag::kMsgType, ""); }
  MsgKind kind() const { return classify(msg_type()); }
  std::string sender() const { return get_or(tag::kSenderCompId, ""); }
  std::string target() const { return get_or(tag::kTargetCompId, ""); }
  std::string sending_time() const { return get_or(tag::kSendingTime, ""); }
  std::optional<std::int64_t> seq_num() const { return get_int(tag::kMsgSeqNum); }
  std::string cl_ord_id() const { return get_or(tag::kClOrdId, ""); }
  std::string orig_cl_ord_id() const { return get_or(tag::kOrigClOrdId, ""); }
  std::string order_id() const { return get_or(tag::kOrderId, ""); }
  std::string symbol() const { return get_or(tag::kSymbol, ""); }
  std::string side() const { return get_or(tag::kSide, ""); }
  std::string ord_status() const { return get_or(tag::kOrdStatus, ""); }
  std::string exec_type() const { return get_or(tag::kExecType, ""); }
  std::optional<std::int64_t> order_qty() const { return get_int(tag::kOrderQty); }
  std::optional<std::int64_t> price() const { return get_int(tag::kPrice); }
  std::optional<std::int64_t> last_px() const { return get_int(tag::kLastPx); }
  std::optional<std::int64_t> last_qty() const { return get_int(tag::kLastQty); }
};

enum class ParseErrorKind { Malformed, BadChecksum, BadBodyLength };

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::Malformed;
  std::string message;
};

inline int checksum_of(std::string_view bytes) {
  unsigned sum = 0;
  for (unsigned char c : bytes) sum += c;
  return static_cast<int>(sum % 256u);
}

// Serializes a message given as BeginString, MsgType, then body fields.
// BodyLength and CheckSum are computed here and must not appear in the input.
inline Expected<std::string> serialize(const FixMessage& msg) {
  if (msg.fields.size() < 2) return Error{"message needs at least BeginString and MsgType"};
  if (msg.fields[0].first != tag::kBeginString || msg.fields[0].second != kBeginString)
    return Error{"first field must be 8=FIX.4.2"};
  if (msg.fields[1].first != tag::kMsgType || msg.fields[1].second.empty())
    return Error{"second field must be MsgType(35)"};
  for (const auto& [t, v] : msg.fields) {
    if (t == tag::kBodyLength || t == tag::kCheckSum)
      return Error{"BodyLength(9)/CheckSum(10) are computed, not supplied"};
    if (t <= 0) return Error{"invalid tag " + std::to_string(t)};
    if (v.empty()) return Error{"empty value for tag " + std::to_string(t)};
    if (v.find(kSoh) != std::string::npos)
      return Error{"value for tag " + std::to_string(t) + " contains SOH"};
  }

  std::string body;
  for (std::size_t i = 1; i < msg.fields.size(); ++i) {
    body += std::to_string(msg.fields[i].first);
    body += '=';
    body += msg.fields[i].second;
    body += kSoh;
  }

  std::string out = "8=";
  out += kBeginString;
  out += kSoh;
  out += "9=" + std::to_string(body.size());
  out += kSoh;
  out += body;

  int sum = checksum_of(out);
  char trailer[8];
  std::snprintf(trailer, sizeof(trailer), "10=%03d", sum);
  out += trailer;
  out += kSoh;
  return out;
}

// Validates and decodes one wire message. Check order: trailer structure,
// checksum, field syntax, header layout, body length. The returned message
// keeps BeginString and BodyLength as ordinary fields; CheckSum is surfaced
// via FixMessage::checksum.
inline Expected<FixMessage, ParseError> parse(std::string_view wire) {
  using K = ParseErrorKind;
  auto fail = [](K k, std::string m) { return ParseError{k, std::move(m)}; };

  // Trailer: ...<SOH>10=ddd<SOH>, eight bytes including the SOH that
  // terminates the preceding field. A broken trailer is a checksum failure:
  // the CheckSum field itself is damaged, and mutilated wires must always
  // surface as checksum or length errors.
  if (wire.size() < 8) return fail(K::Malformed, "message too short");
  std::size_t n = wire.size();
  if (wire[n - 1] != kSoh || wire[n - 8] != kSoh || wire.substr(n - 7, 3) != "10=")
    return fail(K::BadChecksum, "malformed CheckSum trailer");
  int declared_sum = 0;
  for (std::size_t i = n - 4; i < n - 1; ++i) {
    char c = wire[i];
    if (c < '0' || c > '9') return fail(K::BadChecksum, "CheckSum is not three digits");
    declared_sum = declared_sum * 10 + (c - '0');
  }

  int actual_sum = checksum_of(wire.substr(0, n - 7));
  if (actual_sum != declared_sum)
    return fail(K::BadChecksum, "checksum mismatch: declared " + std::to_string(declared_sum) +
                                    ", computed " + std::to_string(actual_sum));

  // Tokenize everything before "10=". The slice ends with the SOH that
  // terminates the last body field.
  FixMessage out;
  out.checksum = declared_sum;
  std::string_view head = wire.substr(0, n - 7);
  std::size_t pos = 0;
  while (pos < head.size()) {
    std::size_t soh = head.find(kSoh, pos);
    if (soh == std::string_view::npos) return fail(K::Malformed, "field not SOH-terminated");
    std::string_view tok = head.substr(pos, soh - pos);
    pos = soh + 1;
    std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0)
      return fail(K::Malformed, "field missing tag=value form");
    int tg = 0;
    for (char c : tok.substr(0, eq)) {
      if (c < '0' || c > '9') return fail(K::Malformed, "non-numeric tag");
      tg = tg * 10 + (c - '0');
      if (tg > 1'000'000) return fail(K::Malformed, "tag out of range");
    }
    if (tg == 0) return fail(K::Malformed, "tag zero");
    std::string_view val = tok.substr(eq + 1);
    if (val.empty()) return fail(K::Malformed, "empty value for tag " + std::to_string(tg));
    out.fields.emplace_back(tg, std::string(val));
  }

  if (out.fields.size() < 3 || out.fields[0].first != tag::kBeginString ||
      out.fields[1].first != tag::kBodyLength || out.fields[2].first != tag::kMsgType)
    return fail(K::Malformed, "header must start 8,9,35");
  if (out.fields[0].second != kBeginString)
    return fail(K::Malformed, "unsupported BeginString " + out.fields[0].second);

  const std::string& len_str = out.fields[1].second;
  long declared_len = 0;
  for (char c : len_str) {
    if (c < '0' || c > '9') return fail(K::Malformed, "BodyLength is not numeric");
    declared_len = declared_len * 10 + (c - '0');
    if (declared_len > 1'000'000) return fail(K::Malformed, "BodyLength out of range");
  }
  // Body spans from the start of "35=" to the start of "10=".
  std::size_t body_start = wire.find(kSoh, wire.find(kSoh) + 1) + 1;
  long actual_len = static_cast<long>((n - 7) - body_start);
  if (actual_len != declared_len)
    return fail(K::BadBodyLength, "BodyLength mismatch: declared " + std::to_string(declared_len) +
                                      ", actual " + std::to_string(actual_len));
  return out;
}

// Reassembles discrete FIX messages from a TCP byte stream.
class Framer {
 public:
  void feed(const char* data, std::size_t len) { buf_.append(data, len); }

  // One complete wire message, nullopt if more bytes are needed, or an error
  // if the stream cannot be a FIX message boundary (fatal for the session).
  Expected<std::optional<std::string>> next() {
    static const std::string prefix = std::string("8=") + kBeginString + kSoh;
    if (buf_.empty()) return std::optional<std::string>{};
    if (buf_.size() < prefix.size()) {
      if (prefix.compare(0, buf_.size(), buf_) != 0) return Error{"stream desynchronized"};
      return std::optional<std::string>{};
    }
    if (buf_.compare(0, prefix.size(), prefix) != 0) return Error{"stream desynchronized"};

    std::size_t p = prefix.size();
    if (buf_.size() < p + 2) return std::optional<std::string>{};
    if (buf_.compare(p, 2, "9=") != 0) return Error{"BodyLength must follow BeginString"};
    std::size_t i = p + 2;
    long body_len = 0;
    int digits = 0;
    while (true) {
      if (i >= buf_.size()) return std::optional<std::string>{};
      char c = buf_[i];
      if (c == kSoh) break;
      if (c < '0' || c > '9' || ++digits > 7) return Error{"bad BodyLength field"};
      body_len = body_len * 10 + (c - '0');
      ++i;
    }
    if (digits == 0) return Error{"bad BodyLength field"};
    // i points at the SOH terminating field 9; trailer is 7 bytes.
    std::size_t total = i + 1 + static_cast<std::size_t>(body_len) + 7;
    if (buf_.size() < total) return std::optional<std::string>{};
    std::string msg = buf_.substr(0, total);
    buf_.erase(0, total);
    return std::optional<std::string>{std::move(msg)};
  }

  std::size_t buffered() const { return buf_.size(); }

 private:
  std::string buf_;
};

// Per-connection FIX session bookkeeping: comp ids, sequence numbers, and the
// logon handshake. Transport-agnostic so it can be tested without sockets.
class Session {
 public:
  Session() = default;
  Session(std::string our_comp, std::string peer_comp)
      : our_comp_(std::move(our_comp)), peer_comp_(std::move(peer_comp)) {}

  const std::string& our_comp() const { return our_comp_; }
  const std::string& peer_comp() const { return peer_comp_; }
  bool logged_on() const { return logged_on_; }
  void set_logged_on(bool v) { logged_on_ = v; }
  std::uint64_t next_out_seq() const { return next_out_seq_; }

  // Builds a full outbound message: standard header, then body fields.
  FixMessage build(const std::string& msg_type, std::vector<Field> body, std::int64_t wall_us) {
    FixMessage m;
    m.fields.emplace_back(tag::kBeginString, kBeginString);
    m.fields.emplace_back(tag::kMsgType, msg_type);
    m.fields.emplace_back(tag::kSenderCompId, our_comp_);
    m.fields.emplace_back(tag::kTargetCompId, peer_comp_);
    m.fields.emplace_back(tag::kMsgSeqNum, std::to_string(next_out_seq_++));
    m.fields.emplace_back(tag::kSendingTime, format_utc_timestamp(wall_us));
    for (auto& f : body) m.fields.push_back(std::move(f));
    return m;
  }

  // Validates an inbound message's session fields. On the first message this
  // learns nothing: comp ids must already be set (server side sets peer_comp
  // from the Logon before constructing the session).
  Status<> accept_inbound(const FixMessage& m) {
    const std::string* sender = m.find(tag::kSenderCompId);
    const std::string* target = m.find(tag::kTargetCompId);
    const std::string* seq = m.find(tag::kMsgSeqNum);
    if (!sender || !target || !seq) return Error{"missing session header field"};
    if (*sender != peer_comp_) return Error{"unexpected SenderCompID " + *sender};
    if (*target != our_comp_) return Error{"unexpected TargetCompID " + *target};
    std::uint64_t got = 0;
    for (char c : *seq) {
      if (c < '0' || c > '9') return Error{"bad MsgSeqNum " + *seq};
      got = got * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (got != next_in_seq_)
      return Error{"MsgSeqNum gap: expected " + std::to_string(next_in_seq_) + ", got " + *seq};
    std::string mt = m.msg_type();
    if (!logged_on_ && mt != msg::kLogon) return Error{"first message must be Logon"};
    if (logged_on_ && mt == msg::kLogon) return Error{"duplicate Logon"};
    ++next_in_seq_;
    if (mt == msg::kLogon) logged_on_ = true;
    return ok_status();
  }

 private:
  std::string our_comp_;
  std::string peer_comp_;
  std::uint64_t next_out_seq_ = 1;
  std::uint64_t next_in_seq_ = 1;
  bool logged_on_ = false;
};

}  // namespace dexsim::fix
