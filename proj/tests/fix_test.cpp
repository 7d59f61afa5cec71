#include "dexsim/fix.hpp"

#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "dexsim/rng.hpp"
#include "test_util.hpp"

namespace fix = dexsim::fix;
using dexsim::fix::FixMessage;
using dexsim::fix::ParseErrorKind;
using dexsim::test::golden_path;
using dexsim::test::read_file;
using dexsim::test::read_lines;
using dexsim::test::split_on;

namespace {

// Parses a "tag=value;tag=value" manifest column.
std::vector<fix::Field> manifest_fields(const std::string& spec) {
  std::vector<fix::Field> out;
  for (const std::string& tok : split_on(spec, ';')) {
    std::size_t eq = tok.find('=');
    out.emplace_back(std::stoi(tok.substr(0, eq)), tok.substr(eq + 1));
  }
  return out;
}

std::vector<fix::Field> drop_tag(const std::vector<fix::Field>& fields, int tg) {
  std::vector<fix::Field> out;
  for (const auto& f : fields)
    if (f.first != tg) out.push_back(f);
  return out;
}

ParseErrorKind kind_from_name(const std::string& name) {
  if (name == "BadChecksum") return ParseErrorKind::BadChecksum;
  if (name == "BadBodyLength") return ParseErrorKind::BadBodyLength;
  return ParseErrorKind::Malformed;
}

std::vector<std::string> golden_valid_names() {
  std::vector<std::string> names;
  for (const std::string& line : read_lines(golden_path("fix/valid.manifest")))
    names.push_back(split_on(line, '\t')[0]);
  return names;
}

}  // namespace

TEST(FixChecksum, ContributionArithmetic) {
  // 'A' + SOH contribute 65 + 1 to the running sum.
  EXPECT_EQ(fix::checksum_of(std::string("A\x01")), 66);
  EXPECT_EQ(fix::checksum_of(std::string()), 0);
  EXPECT_EQ(fix::checksum_of(std::string(256, '\x01')), 0);
}

TEST(FixGolden, ValidCorpusParses) {
  for (const std::string& line : read_lines(golden_path("fix/valid.manifest"))) {
    auto cols = split_on(line, '\t');
    ASSERT_EQ(cols.size(), 3u) << line;
    SCOPED_TRACE(cols[0]);
    std::string wire = read_file(golden_path("fix/" + cols[0]));
    auto parsed = fix::parse(wire);
    ASSERT_TRUE(parsed.ok()) << parsed.error().message;
    EXPECT_EQ(parsed.value().checksum, std::stoi(cols[1]));
    EXPECT_EQ(parsed.value().fields, manifest_fields(cols[2]));
  }
}

TEST(FixGolden, SerializeReproducesCorpusBytes) {
  for (const std::string& line : read_lines(golden_path("fix/valid.manifest"))) {
    auto cols = split_on(line, '\t');
    SCOPED_TRACE(cols[0]);
    std::string wire = read_file(golden_path("fix/" + cols[0]));
    FixMessage m;
    m.fields = drop_tag(manifest_fields(cols[2]), fix::tag::kBodyLength);
    auto out = fix::serialize(m);
    ASSERT_TRUE(out.ok()) << out.error().message;
    EXPECT_EQ(out.value(), wire);
  }
}

TEST(FixGolden, InvalidCorpusRejected) {
  for (const std::string& line : read_lines(golden_path("fix/invalid.manifest"))) {
    auto cols = split_on(line, '\t');
    ASSERT_EQ(cols.size(), 2u) << line;
    SCOPED_TRACE(cols[0]);
    std::string wire = read_file(golden_path("fix/" + cols[0]));
    auto parsed = fix::parse(wire);
    ASSERT_FALSE(parsed.ok());
    EXPECT_EQ(parsed.error().kind, kind_from_name(cols[1])) << parsed.error().message;
  }
}

TEST(FixParse, UnsupportedTypeIsRecoverable) {
  std::string wire = read_file(golden_path("fix/order_status_unsupported.wire"));
  auto parsed = fix::parse(wire);
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(parsed.value().kind(), fix::MsgKind::Unsupported);
}

TEST(FixParse, TypedAccessors) {
  std::string wire = read_file(golden_path("fix/exec_report_fill.wire"));
  auto parsed = fix::parse(wire);
  ASSERT_TRUE(parsed.ok());
  const FixMessage& m = parsed.value();
  EXPECT_EQ(m.kind(), fix::MsgKind::ExecutionReport);
  EXPECT_EQ(m.sender(), "EXCH");
  EXPECT_EQ(m.target(), "CLNT1");
  EXPECT_EQ(m.seq_num(), 5);
  EXPECT_EQ(m.cl_ord_id(), "T01-1");
  EXPECT_EQ(m.order_id(), "7");
  EXPECT_EQ(m.symbol(), "XYZ");
  EXPECT_EQ(m.side(), "1");
  EXPECT_EQ(m.exec_type(), fix::exec::kFill);
  EXPECT_EQ(m.ord_status(), fix::exec::kFill);
  EXPECT_EQ(m.order_qty(), 10);
  EXPECT_EQ(m.price(), 150);
  EXPECT_EQ(m.last_px(), 149);
  EXPECT_EQ(m.last_qty(), 10);
}

// Any single-byte substitution anywhere in a valid wire must surface as a
// checksum or body-length failure, never as an accepted message.
TEST(FixParse, MutationTotality) {
  for (const std::string& name : golden_valid_names()) {
    SCOPED_TRACE(name);
    std::string wire = read_file(golden_path("fix/" + name));
    for (std::size_t i = 0; i < wire.size(); ++i) {
      for (int delta : {1, 128, 255}) {
        std::string mut = wire;
        mut[i] = static_cast<char>((static_cast<unsigned char>(wire[i]) + delta) % 256);
        if (mut[i] == wire[i]) continue;
        auto parsed = fix::parse(mut);
        ASSERT_FALSE(parsed.ok()) << "byte " << i << " delta " << delta;
        EXPECT_NE(parsed.error().kind, ParseErrorKind::Malformed)
            << "byte " << i << " delta " << delta << ": " << parsed.error().message;
      }
    }
  }
}

TEST(FixRoundTrip, SeededRandomMessages) {
  dexsim::Rng rng(0x5eedf17e);
  for (int iter = 0; iter < 200; ++iter) {
    FixMessage m;
    m.fields.emplace_back(fix::tag::kBeginString, fix::kBeginString);
    m.fields.emplace_back(fix::tag::kMsgType, std::string(1, static_cast<char>(rng.uniform_int('0', 'Z'))));
    int extra = static_cast<int>(rng.uniform_int(0, 12));
    for (int i = 0; i < extra; ++i) {
      int tg = static_cast<int>(rng.uniform_int(11, 9999));
      if (tg == fix::tag::kBodyLength || tg == fix::tag::kCheckSum) tg = 11;
      std::string val;
      int len = static_cast<int>(rng.uniform_int(1, 20));
      for (int j = 0; j < len; ++j) {
        char c = static_cast<char>(rng.uniform_int(32, 126));
        val += (c == '\x01') ? 'x' : c;
      }
      m.fields.emplace_back(tg, val);
    }
    auto wire = fix::serialize(m);
    ASSERT_TRUE(wire.ok()) << wire.error().message;
    auto back = fix::parse(wire.value());
    ASSERT_TRUE(back.ok()) << back.error().message;
    EXPECT_EQ(drop_tag(back.value().fields, fix::tag::kBodyLength), m.fields);
  }
}

TEST(FixSerialize, RejectsStructuralMisuse) {
  FixMessage m;
  m.fields.emplace_back(fix::tag::kMsgType, "A");
  EXPECT_FALSE(fix::serialize(m).ok());  // No BeginString first.

  m.fields.clear();
  m.fields.emplace_back(fix::tag::kBeginString, fix::kBeginString);
  EXPECT_FALSE(fix::serialize(m).ok());  // No MsgType.

  m.fields.emplace_back(fix::tag::kMsgType, "A");
  m.fields.emplace_back(fix::tag::kBodyLength, "7");
  auto r = fix::serialize(m);
  ASSERT_FALSE(r.ok());  // Computed fields must not be supplied.

  m.fields.pop_back();
  m.fields.emplace_back(fix::tag::kText, std::string("ab\x01" "cd"));
  auto r2 = fix::serialize(m);
  ASSERT_FALSE(r2.ok());
  EXPECT_NE(r2.error().message.find("SOH"), std::string::npos);

  m.fields.pop_back();
  m.fields.emplace_back(fix::tag::kText, "");
  EXPECT_FALSE(fix::serialize(m).ok());  // Empty value.
}

TEST(FixSession, GoldenHeartbeatBytes) {
  auto cols = split_on(read_lines(golden_path("fix/session.manifest"))[0], '\t');
  ASSERT_EQ(cols.size(), 5u);
  std::string wire = read_file(golden_path("fix/" + cols[0]));
  std::int64_t wall_us = std::stoll(cols[1]);
  fix::Session session(cols[2], cols[3]);
  int seq = std::stoi(cols[4]);
  for (int i = 1; i < seq; ++i) session.build(fix::msg::kHeartbeat, {}, wall_us);
  FixMessage hb = session.build(fix::msg::kHeartbeat, {}, wall_us);

  std::vector<int> tag_order;
  for (const auto& [t, v] : hb.fields) tag_order.push_back(t);
  EXPECT_EQ(tag_order, (std::vector<int>{8, 35, 49, 56, 34, 52}));

  auto out = fix::serialize(hb);
  ASSERT_TRUE(out.ok()) << out.error().message;
  EXPECT_EQ(out.value(), wire);
}

TEST(FixSession, HandshakeAndSequenceDiscipline) {
  std::int64_t wall = 1787140800000000;
  fix::Session client("CLNT1", "EXCH");
  fix::Session server("EXCH", "CLNT1");

  // Heartbeat before Logon is a session error and does not consume a seq.
  FixMessage early = client.build(fix::msg::kHeartbeat, {}, wall);
  fix::Session server2("EXCH", "CLNT1");
  EXPECT_FALSE(server2.accept_inbound(early).ok());

  fix::Session client2("CLNT1", "EXCH");
  FixMessage logon = client2.build(
      fix::msg::kLogon, {{fix::tag::kEncryptMethod, "0"}, {fix::tag::kHeartBtInt, "30"}}, wall);
  ASSERT_TRUE(server.accept_inbound(logon).ok());
  EXPECT_TRUE(server.logged_on());

  // Duplicate Logon rejected.
  FixMessage logon2 = client2.build(fix::msg::kLogon, {}, wall);
  EXPECT_FALSE(server.accept_inbound(logon2).ok());

  // Sequence discipline: replay of seq 2 after a fresh build of seq 3.
  fix::Session client3("CLNT1", "EXCH");
  fix::Session server3("EXCH", "CLNT1");
  ASSERT_TRUE(server3.accept_inbound(client3.build(fix::msg::kLogon, {}, wall)).ok());
  FixMessage hb2 = client3.build(fix::msg::kHeartbeat, {}, wall);
  ASSERT_TRUE(server3.accept_inbound(hb2).ok());
  EXPECT_FALSE(server3.accept_inbound(hb2).ok());  // Replayed seq 2.

  // Wrong comp ids rejected.
  fix::Session impostor("CLNT9", "EXCH");
  fix::Session server4("EXCH", "CLNT1");
  EXPECT_FALSE(server4.accept_inbound(impostor.build(fix::msg::kLogon, {}, wall)).ok());
}

TEST(FixFramer, ReassemblesByteByByte) {
  std::vector<std::string> wires;
  for (const std::string& name : golden_valid_names())
    wires.push_back(read_file(golden_path("fix/" + name)));

  std::string stream;
  for (const auto& w : wires) stream += w;

  fix::Framer framer;
  std::vector<std::string> got;
  for (char c : stream) {
    framer.feed(&c, 1);
    while (true) {
      auto r = framer.next();
      ASSERT_TRUE(r.ok()) << r.error().message;
      if (!r.value().has_value()) break;
      got.push_back(*r.value());
    }
  }
  EXPECT_EQ(got, wires);
  EXPECT_EQ(framer.buffered(), 0u);
}

TEST(FixFramer, ReassemblesRandomChunks) {
  std::vector<std::string> wires;
  for (const std::string& name : golden_valid_names())
    wires.push_back(read_file(golden_path("fix/" + name)));
  std::string stream;
  for (int rep = 0; rep < 5; ++rep)
    for (const auto& w : wires) stream += w;

  dexsim::Rng rng(42);
  fix::Framer framer;
  std::vector<std::string> got;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    std::size_t chunk = std::min<std::size_t>(
        stream.size() - pos, static_cast<std::size_t>(rng.uniform_int(1, 97)));
    framer.feed(stream.data() + pos, chunk);
    pos += chunk;
    while (true) {
      auto r = framer.next();
      ASSERT_TRUE(r.ok()) << r.error().message;
      if (!r.value().has_value()) break;
      got.push_back(*r.value());
    }
  }
  ASSERT_EQ(got.size(), wires.size() * 5);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], wires[i % wires.size()]);
}

TEST(FixFramer, DesynchronizedStreamIsFatal) {
  fix::Framer framer;
  framer.feed("garbage", 7);
  EXPECT_FALSE(framer.next().ok());

  fix::Framer framer2;
  std::string bad = "8=FIX.4.2\x01X=1\x01";
  framer2.feed(bad.data(), bad.size());
  EXPECT_FALSE(framer2.next().ok());
}

TEST(FixClassify, AllKinds) {
  EXPECT_EQ(fix::classify("A"), fix::MsgKind::Logon);
  EXPECT_EQ(fix::classify("0"), fix::MsgKind::Heartbeat);
  EXPECT_EQ(fix::classify("5"), fix::MsgKind::Logout);
  EXPECT_EQ(fix::classify("D"), fix::MsgKind::NewOrderSingle);
  EXPECT_EQ(fix::classify("8"), fix::MsgKind::ExecutionReport);
  EXPECT_EQ(fix::classify("F"), fix::MsgKind::OrderCancelRequest);
  EXPECT_EQ(fix::classify("9"), fix::MsgKind::OrderCancelReject);
  EXPECT_EQ(fix::classify("G"), fix::MsgKind::Unsupported);
  EXPECT_EQ(fix::classify("H"), fix::MsgKind::Unsupported);
  EXPECT_EQ(fix::classify("AB"), fix::MsgKind::Unsupported);
}
