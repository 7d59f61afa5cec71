// Harness tests: experiment-spec parsing, the subprocess supervisor, and a
// short smoke experiment driving the real exchange and client binaries.

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "dexsim/config.hpp"
#include "dexsim/harness.hpp"
#include "test_util.hpp"

namespace {

using dexsim::Config;
using dexsim::harness::ExperimentSpec;
using dexsim::harness::Subprocess;

ExperimentSpec parse_spec(const std::string& text) {
  auto cfg = Config::from_string(text);
  EXPECT_TRUE(cfg.ok());
  auto spec = ExperimentSpec::from_config(cfg.value());
  EXPECT_TRUE(spec.ok()) << spec.error().message;
  return spec.value();
}

TEST(ExperimentSpec, ParsesAFullSpec) {
  ExperimentSpec s = parse_spec(
      "repeats = 10\n"
      "session_s = 180\n"
      "interval_s = 30\n"
      "schedule = 0:60:100:200, 60:120:150:250, 120:180:100:200\n"
      "clients = CLNT1:0, CLNT2:0, CLNT3:44, CLNT4:135\n"
      "roster = GVWY:B:5, SHVR:B:5, ZIC:B:5, SNPR:B:5, GVWY:S:5, SHVR:S:5, ZIC:S:5, "
      "SNPR:S:5\n"
      "seed = 7001\n"
      "out_dir = /tmp/x\n");
  EXPECT_EQ(s.repeats, 10);
  ASSERT_EQ(s.clients.size(), 4u);
  EXPECT_EQ(s.clients[2].name, "CLNT3");
  EXPECT_EQ(s.clients[2].delay_ms, 44);
  EXPECT_EQ(s.clients[3].delay_ms, 135);
  EXPECT_EQ(s.seed, 7001u);
  EXPECT_EQ(s.min_publish_interval_ms, 100);  // Default.
}

TEST(ExperimentSpec, RejectsBrokenSpecs) {
  auto reject = [](const std::string& text) {
    auto cfg = Config::from_string(text);
    ASSERT_TRUE(cfg.ok());
    EXPECT_FALSE(ExperimentSpec::from_config(cfg.value()).ok()) << text;
  };
  const std::string base =
      "session_s = 60\nschedule = 0:60:100:200\nroster = GVWY:B:1\nout_dir = /tmp/x\n";
  reject(base);  // No clients.
  reject(base + "clients = CLNT1:fast\n");
  reject(base + "clients = CLNT1:0, CLNT1:5\n");  // Duplicate name.
  reject(base + "clients = CLNT1:-3\n");
  reject("session_s = 120\nschedule = 0:60:100:200\nroster = GVWY:B:1\n"
         "clients = CLNT1:0\nout_dir = /tmp/x\n");  // Schedule too short.
  reject(base + "clients = CLNT1:0, CLNT2:44\nfeed_mode = multicast\n");  // Delay needs unicast.
  reject("session_s = 60\nschedule = 0:60:100:200\nroster = GVWY:B:0\n"
         "clients = CLNT1:0\nout_dir = /tmp/x\n");  // Empty roster.
}

TEST(Subprocess, CapturesExitCodesAndTerminates) {
  auto ok = Subprocess::spawn("/bin/sh", {"-c", "exit 7"}, "/tmp/dexsim_sub_test.log");
  ASSERT_TRUE(ok.ok()) << ok.error().message;
  auto code = ok.value().wait_for(5000);
  ASSERT_TRUE(code.has_value());
  EXPECT_EQ(*code, 7);

  auto sleeper = Subprocess::spawn("/bin/sleep", {"30"}, "/tmp/dexsim_sub_test.log");
  ASSERT_TRUE(sleeper.ok());
  EXPECT_FALSE(sleeper.value().wait_for(50).has_value());  // Still running.
  EXPECT_EQ(sleeper.value().terminate(2000), -SIGTERM);

  EXPECT_FALSE(Subprocess::spawn("/no/such/binary", {}, "/tmp/dexsim_sub_test.log").ok());
}

TEST(Harness, SmokeExperimentProducesAReport) {
  auto bin_dir = dexsim::harness::self_exe_dir();
  ASSERT_TRUE(bin_dir.ok()) << bin_dir.error().message;

  const std::string out_dir =
      (std::filesystem::temp_directory_path() / "dexsim_harness_smoke").string();
  std::filesystem::remove_all(out_dir);

  ExperimentSpec spec = parse_spec(
      "repeats = 1\n"
      "session_s = 10\n"
      "interval_s = 5\n"
      "schedule = 0:10:100:200\n"
      "clients = CLNT1:0\n"
      "roster = GVWY:B:2, GVWY:S:2\n"
      "seed = 42\n"
      "min_publish_interval_ms = 50\n"
      "out_dir = " + out_dir + "\n");

  auto report = dexsim::harness::run_experiment(spec, bin_dir.value());
  ASSERT_TRUE(report.ok()) << report.error().message;
  const auto& r = report.value();

  EXPECT_TRUE(r.violations.empty())
      << (r.violations.empty() ? "" : r.violations.front());
  ASSERT_EQ(r.repeats.size(), 1u);
  EXPECT_GT(r.repeats[0].publishes, 0u);
  EXPECT_GT(r.repeats[0].exchange_trades, 0u);

  ASSERT_TRUE(r.latency_by_client.count("CLNT1"));
  const auto& lat = r.latency_by_client.at("CLNT1");
  EXPECT_GT(lat.count, 0u);
  EXPECT_LE(lat.min, lat.median);
  EXPECT_LE(lat.median, lat.max);
  EXPECT_LT(lat.median, 50.0);  // Loopback with no injected delay.

  for (const char* name : {"latency.csv", "profits.csv", "summary.csv", "report.txt"})
    EXPECT_TRUE(std::filesystem::exists(out_dir + "/" + name)) << name;
  auto profits = dexsim::test::read_lines(out_dir + "/profits.csv");
  EXPECT_EQ(profits.size(), 5u);  // Header + 4 traders.
  auto report_txt = dexsim::test::read_file(out_dir + "/report.txt");
  EXPECT_NE(report_txt.find("violations: none"), std::string::npos);
  std::filesystem::remove_all(out_dir);
}

}  // namespace
