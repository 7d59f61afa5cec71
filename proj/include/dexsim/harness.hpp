#pragma once

// Experiment harness: launches one exchange process and K trading-client
// processes on loopback per repeat, each repeat under a distinct derived
// seed, then pools the per-process CSV outputs into experiment-level
// latency summaries, profit ratios, and a human-readable report.

#include <sys/types.h>
#include <sys/wait.h>

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dexsim/agents.hpp"
#include "dexsim/config.hpp"
#include "dexsim/net.hpp"
#include "dexsim/result.hpp"
#include "dexsim/rng.hpp"
#include "dexsim/scheduler.hpp"
#include "dexsim/stats.hpp"
#include "dexsim/util.hpp"

namespace dexsim::harness {

// Directory holding the currently running executable; sibling tools (the
// exchange and client binaries) are expected to live next to it.
inline Expected<std::string> self_exe_dir() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return Error{"readlink /proc/self/exe failed"};
  buf[n] = '\0';
  return std::filesystem::path(buf).parent_path().string();
}

// A spawned child process with stdout/stderr redirected to a log file.
// Destruction kills anything still running so tests cannot leak children.
class Subprocess {
 public:
  Subprocess() = default;
  Subprocess(Subprocess&& other) noexcept : pid_(other.pid_) { other.pid_ = -1; }
  Subprocess& operator=(Subprocess&& other) noexcept {
    if (this != &other) {
      reap_or_kill();
      pid_ = other.pid_;
      other.pid_ = -1;
    }
    return *this;
  }
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;
  ~Subprocess() { reap_or_kill(); }

  static Expected<Subprocess> spawn(const std::string& exe,
                                    const std::vector<std::string>& args,
                                    const std::string& log_path) {
    if (!std::filesystem::exists(exe)) return Error{"no such binary: " + exe};
    int log_fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (log_fd < 0) return Error{"cannot open log " + log_path};

    std::vector<std::string> argv_store;
    argv_store.push_back(exe);
    for (const auto& a : args) argv_store.push_back(a);
    std::vector<char*> argv;
    argv.reserve(argv_store.size() + 1);
    for (auto& s : argv_store) argv.push_back(s.data());
    argv.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0) {
      ::close(log_fd);
      return Error{"fork failed"};
    }
    if (pid == 0) {
      ::dup2(log_fd, STDOUT_FILENO);
      ::dup2(log_fd, STDERR_FILENO);
      ::close(log_fd);
      ::execv(exe.c_str(), argv.data());
      std::fprintf(stderr, "execv %s failed\n", exe.c_str());
      ::_exit(127);
    }
    ::close(log_fd);
    Subprocess p;
    p.pid_ = pid;
    return p;
  }

  pid_t pid() const { return pid_; }
  bool running() const { return pid_ > 0; }

  // Exit code if the child finished within the deadline (negative signal
  // number if killed by a signal), nullopt on timeout.
  std::optional<int> wait_for(int timeout_ms) {
    if (pid_ <= 0) return std::nullopt;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      int status = 0;
      pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        pid_ = -1;
        if (WIFEXITED(status)) return WEXITSTATUS(status);
        if (WIFSIGNALED(status)) return -WTERMSIG(status);
        return -1;
      }
      if (r < 0) {
        pid_ = -1;
        return -1;
      }
      if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }

  // SIGTERM, grace period, then SIGKILL. Returns the exit code (see wait_for).
  int terminate(int grace_ms = 10000) {
    if (pid_ <= 0) return 0;
    ::kill(pid_, SIGTERM);
    if (auto code = wait_for(grace_ms)) return *code;
    ::kill(pid_, SIGKILL);
    auto code = wait_for(2000);
    return code.value_or(-SIGKILL);
  }

 private:
  void reap_or_kill() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
};

struct ClientSpec {
  std::string name;
  int delay_ms = 0;
};

struct ExperimentSpec {
  int repeats = 1;
  double session_s = 180;
  double interval_s = 30;
  std::string symbol = "DBX";
  std::int64_t max_price = 1000;
  std::string schedule_raw;  // Passed through to client configs verbatim.
  std::string roster_raw;
  std::vector<ClientSpec> clients;
  std::uint64_t seed = 1;
  std::int64_t min_publish_interval_ms = 100;
  std::string feed_mode = "unicast";
  std::string md_group;  // Multicast only.
  std::int64_t requote_min_ms = 1000;
  std::string out_dir;

  static Expected<ExperimentSpec> from_config(const Config& cfg) {
    ExperimentSpec s;
    s.repeats = static_cast<int>(cfg.get_int_or("repeats", 1));
    if (s.repeats < 1) return Error{"repeats must be >= 1"};
    s.session_s = cfg.get_double_or("session_s", 180);
    if (s.session_s <= 0) return Error{"session_s must be positive"};
    s.interval_s = cfg.get_double_or("interval_s", 30);
    if (s.interval_s <= 0) return Error{"interval_s must be positive"};
    s.symbol = cfg.get_or("symbol", "DBX");
    s.max_price = cfg.get_int_or("max_price", 1000);
    if (s.max_price < 1) return Error{"max_price must be >= 1"};

    s.schedule_raw = cfg.get_or("schedule", "");
    auto schedule = sched::parse_schedule(cfg.get_list_or("schedule"));
    if (!schedule.ok()) return schedule.error();
    if (schedule.value().back().end_s < s.session_s)
      return Error{"schedule ends before the session does"};

    s.roster_raw = cfg.get_or("roster", "");
    auto roster = agents::parse_roster(cfg.get_list_or("roster"));
    if (!roster.ok()) return roster.error();
    int traders = 0;
    for (const auto& e : roster.value()) traders += e.count;
    if (traders == 0) return Error{"roster has no traders"};

    for (const std::string& item : cfg.get_list_or("clients")) {
      auto parts = split(item, ':');
      if (parts.size() != 2) return Error{"bad client entry (want NAME:DELAY_MS): " + item};
      ClientSpec c;
      c.name = trim(parts[0]);
      if (c.name.empty()) return Error{"empty client name: " + item};
      try {
        c.delay_ms = std::stoi(parts[1]);
      } catch (const std::exception&) {
        return Error{"bad client delay: " + item};
      }
      if (c.delay_ms < 0) return Error{"negative client delay: " + item};
      for (const auto& seen : s.clients)
        if (seen.name == c.name) return Error{"duplicate client name: " + c.name};
      s.clients.push_back(c);
    }
    if (s.clients.empty()) return Error{"no clients configured"};

    s.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));
    s.min_publish_interval_ms = cfg.get_int_or("min_publish_interval_ms", 100);
    if (s.min_publish_interval_ms < 0) return Error{"min_publish_interval_ms must be >= 0"};
    s.feed_mode = cfg.get_or("feed_mode", "unicast");
    if (s.feed_mode != "unicast" && s.feed_mode != "multicast")
      return Error{"feed_mode must be unicast or multicast"};
    s.md_group = cfg.get_or("md_group", "239.77.77.1:0");
    if (s.feed_mode == "multicast")
      for (const auto& c : s.clients)
        if (c.delay_ms != 0)
          return Error{"injected delays require unicast (multicast shares one datagram)"};
    s.requote_min_ms = cfg.get_int_or("requote_min_ms", 1000);
    if (s.requote_min_ms < 0) return Error{"requote_min_ms must be >= 0"};
    s.out_dir = cfg.get_or("out_dir", "");
    if (s.out_dir.empty()) return Error{"out_dir is required"};
    return s;
  }

  static Expected<ExperimentSpec> from_file(const std::string& path) {
    auto cfg = Config::load(path);
    if (!cfg.ok()) return cfg.error();
    return from_config(cfg.value());
  }
};

// One aggregated latency sample row (client and repeat attached).
struct LatencyRow {
  std::string client;
  int repeat = 0;
  std::uint64_t seq = 0;
  std::int64_t send_ts_us = 0;
  std::int64_t recv_wall_us = 0;
  std::int64_t latency_us = 0;
};

// One aggregated per-trader profit row.
struct ProfitLine {
  std::string client;
  int repeat = 0;
  std::string trader;
  std::string strategy;
  std::string side;
  std::int64_t profit_ticks = 0;
  std::int64_t filled_qty = 0;
};

struct RepeatOutcome {
  int repeat = 0;
  std::uint64_t publishes = 0;
  std::uint64_t exchange_trades = 0;
};

struct ExperimentReport {
  std::vector<RepeatOutcome> repeats;
  std::vector<LatencyRow> latency_rows;
  std::vector<ProfitLine> profit_lines;
  std::map<std::string, stats::LatencySummary> latency_by_client;  // Pooled, in ms.
  stats::ProfitReport profits;
  std::vector<std::string> violations;
  std::string out_dir;
};

namespace detail {

inline Status<> write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  if (!out) return Error{"write " + path + " failed"};
  return ok_status();
}

// Polls the exchange ready file for "port=". Returns the TCP port.
inline Expected<std::uint16_t> await_ready(const std::string& path, int timeout_ms) {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (std::chrono::steady_clock::now() < deadline) {
    std::ifstream in(path);
    if (in) {
      std::string line;
      while (std::getline(in, line)) {
        if (line.rfind("port=", 0) == 0) {
          try {
            int p = std::stoi(line.substr(5));
            if (p > 0 && p <= 65535) return static_cast<std::uint16_t>(p);
          } catch (const std::exception&) {
          }
        }
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return Error{"exchange ready file did not appear: " + path};
}

inline Expected<std::vector<std::vector<std::string>>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Error{"cannot open " + path};
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;  // Header.
      continue;
    }
    rows.push_back(split(line, ','));
  }
  return rows;
}

struct RepeatArtifacts {
  std::vector<LatencyRow> latency;
  std::vector<ProfitLine> profits;
  RepeatOutcome outcome;
  std::vector<std::string> violations;
};

// Everything that must happen for one repeat. Throws nothing; hard startup
// failures come back as an error so the caller can retry the repeat.
inline Expected<RepeatArtifacts> run_repeat(const ExperimentSpec& spec, int repeat,
                                            const std::string& bin_dir) {
  namespace fs = std::filesystem;
  const std::string rep_dir = spec.out_dir + "/repeat" + std::to_string(repeat);
  std::error_code ec;
  fs::remove_all(rep_dir, ec);
  fs::create_directories(rep_dir, ec);
  if (ec) return Error{"create " + rep_dir + ": " + ec.message()};

  const std::uint64_t repeat_seed =
      derive_seed(spec.seed, 10'000 + static_cast<std::uint64_t>(repeat));

  // Reserve one feed port per client (unicast). The bind-release window is
  // tiny on loopback; the caller retries the whole repeat on a collision.
  std::vector<std::uint16_t> md_ports;
  if (spec.feed_mode == "unicast") {
    for (std::size_t i = 0; i < spec.clients.size(); ++i) {
      std::uint16_t port = net::pick_free_udp_port();
      if (port == 0) return Error{"could not reserve a UDP port"};
      md_ports.push_back(port);
    }
  } else {
    std::uint16_t port = net::pick_free_udp_port();
    if (port == 0) return Error{"could not reserve a UDP port"};
    md_ports.assign(spec.clients.size(), port);
  }

  // Exchange config.
  std::ostringstream xcfg;
  xcfg << "listen = 127.0.0.1:0\n"
       << "comp_id = EXCH\n"
       << "symbol = " << spec.symbol << "\n"
       << "max_price = " << spec.max_price << "\n"
       << "min_publish_interval_ms = " << spec.min_publish_interval_ms << "\n"
       << "out_dir = " << rep_dir << "\n";
  if (spec.feed_mode == "unicast") {
    xcfg << "feed_mode = unicast\nmd_clients = ";
    for (std::size_t i = 0; i < spec.clients.size(); ++i) {
      if (i) xcfg << ", ";
      xcfg << "127.0.0.1:" << md_ports[i] << ":" << spec.clients[i].delay_ms;
    }
    xcfg << "\n";
  } else {
    auto group = net::parse_endpoint(spec.md_group);
    if (!group.ok()) return group.error();
    xcfg << "feed_mode = multicast\nmd_group = " << group.value().host << ":"
         << md_ports[0] << "\n";
  }
  const std::string xcfg_path = rep_dir + "/exchange.cfg";
  if (auto st = write_text(xcfg_path, xcfg.str()); !st.ok()) return st.error();

  auto exchange = Subprocess::spawn(bin_dir + "/dexsim_exchange", {"--config", xcfg_path},
                                    rep_dir + "/exchange.log");
  if (!exchange.ok()) return Error{"spawn exchange: " + exchange.error().message};

  auto port = await_ready(rep_dir + "/exchange.ready", 5000);
  if (!port.ok()) {
    exchange.value().terminate(2000);
    return port.error();
  }

  // Client configs and processes.
  std::vector<Subprocess> clients;
  for (std::size_t i = 0; i < spec.clients.size(); ++i) {
    const auto& c = spec.clients[i];
    const std::string cdir = rep_dir + "/" + c.name;
    fs::create_directories(cdir, ec);
    std::ostringstream ccfg;
    ccfg << "exchange = 127.0.0.1:" << port.value() << "\n"
         << "comp_id = " << c.name << "\n"
         << "symbol = " << spec.symbol << "\n"
         << "max_price = " << spec.max_price << "\n"
         << "session_s = " << spec.session_s << "\n"
         << "interval_s = " << spec.interval_s << "\n"
         << "schedule = " << spec.schedule_raw << "\n"
         << "roster = " << spec.roster_raw << "\n"
         << "seed = " << derive_seed(repeat_seed, static_cast<std::uint64_t>(i)) << "\n"
         << "requote_min_ms = " << spec.requote_min_ms << "\n"
         << "order_delay_ms = " << c.delay_ms << "\n"  // Remote both ways.
         << "out_dir = " << cdir << "\n";
    if (spec.feed_mode == "unicast") {
      ccfg << "feed_mode = unicast\nmd_listen = 127.0.0.1:" << md_ports[i] << "\n";
    } else {
      auto group = net::parse_endpoint(spec.md_group);
      ccfg << "feed_mode = multicast\nmd_group = " << group.value().host << ":"
           << md_ports[i] << "\n";
    }
    const std::string ccfg_path = cdir + "/client.cfg";
    if (auto st = write_text(ccfg_path, ccfg.str()); !st.ok()) {
      exchange.value().terminate(2000);
      return st.error();
    }
    auto proc = Subprocess::spawn(bin_dir + "/dexsim_client", {"--config", ccfg_path},
                                  cdir + "/client.log");
    if (!proc.ok()) {
      exchange.value().terminate(2000);
      return Error{"spawn client " + c.name + ": " + proc.error().message};
    }
    clients.push_back(std::move(proc.value()));
  }

  RepeatArtifacts art;
  art.outcome.repeat = repeat;

  // Clients exit on their own after session + logout. Budget generously.
  const int budget_ms = static_cast<int>(spec.session_s * 1000) + 30'000;
  bool startup_failure = false;
  for (std::size_t i = 0; i < clients.size(); ++i) {
    auto code = clients[i].wait_for(budget_ms);
    if (!code.has_value()) {
      art.violations.push_back(spec.clients[i].name + " did not exit in time");
      clients[i].terminate(2000);
    } else if (*code != 0) {
      // A client that dies within the first seconds of a session signals a
      // startup collision (port race); surface it as retryable.
      art.violations.push_back(spec.clients[i].name + " exited with code " +
                               std::to_string(*code));
      if (*code == 3) startup_failure = true;
    }
  }

  const int xcode = exchange.value().terminate(10'000);
  if (xcode != 0)
    art.violations.push_back("exchange exited with code " + std::to_string(xcode));
  if (startup_failure) return Error{"client startup failure (retryable)"};

  // Collect per-client outputs.
  for (std::size_t i = 0; i < spec.clients.size(); ++i) {
    const auto& c = spec.clients[i];
    const std::string cdir = rep_dir + "/" + c.name;

    auto lat = read_csv(cdir + "/latency.csv");
    if (!lat.ok()) {
      art.violations.push_back(c.name + ": " + lat.error().message);
      continue;
    }
    for (const auto& row : lat.value()) {
      if (row.size() != 4) continue;
      LatencyRow r;
      r.client = c.name;
      r.repeat = repeat;
      r.seq = std::stoull(row[0]);
      r.send_ts_us = std::stoll(row[1]);
      r.recv_wall_us = std::stoll(row[2]);
      r.latency_us = std::stoll(row[3]);
      art.latency.push_back(std::move(r));
    }

    auto prof = read_csv(cdir + "/profits.csv");
    if (!prof.ok()) {
      art.violations.push_back(c.name + ": " + prof.error().message);
      continue;
    }
    std::int64_t profit_sum = 0;
    for (const auto& row : prof.value()) {
      if (row.size() != 5) continue;
      ProfitLine p;
      p.client = c.name;
      p.repeat = repeat;
      p.trader = row[0];
      p.strategy = row[1];
      p.side = row[2];
      p.profit_ticks = std::stoll(row[3]);
      p.filled_qty = std::stoll(row[4]);
      profit_sum += p.profit_ticks;
      art.profits.push_back(std::move(p));
    }

    // Cross-check: agent profit tallies must equal the trade-log recompute.
    auto trades = read_csv(cdir + "/trades.csv");
    if (trades.ok()) {
      std::int64_t trade_sum = 0;
      for (const auto& row : trades.value())
        if (row.size() == 8) trade_sum += std::stoll(row[7]);
      if (trade_sum != profit_sum)
        art.violations.push_back(c.name + ": profit tally " + std::to_string(profit_sum) +
                                 " != trade log sum " + std::to_string(trade_sum));
    }

    auto summary = read_csv(cdir + "/client_summary.csv");
    if (summary.ok() && summary.value().size() == 1 && summary.value()[0].size() == 10) {
      const auto& row = summary.value()[0];
      const std::uint64_t protocol_errors = std::stoull(row[8]);
      if (protocol_errors != 0)
        art.violations.push_back(c.name + ": " + row[8] + " protocol errors");
    }
  }

  auto xsummary = read_csv(rep_dir + "/exchange_summary.csv");
  if (xsummary.ok() && xsummary.value().size() == 1 && xsummary.value()[0].size() >= 2) {
    art.outcome.publishes = std::stoull(xsummary.value()[0][0]);
    art.outcome.exchange_trades = std::stoull(xsummary.value()[0][1]);
  } else {
    art.violations.push_back("exchange summary missing");
  }
  return art;
}

inline std::string format_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace detail

// Runs the whole experiment. Hard failures (cannot even launch processes)
// come back as an error; per-repeat anomalies are collected as violations
// in the report, and the CSV/report files are written either way.
inline Expected<ExperimentReport> run_experiment(const ExperimentSpec& spec,
                                                 const std::string& bin_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) return Error{"create " + spec.out_dir + ": " + ec.message()};

  ExperimentReport report;
  report.out_dir = spec.out_dir;

  for (int r = 0; r < spec.repeats; ++r) {
    Expected<detail::RepeatArtifacts> art = Error{"not run"};
    for (int attempt = 0; attempt < 3; ++attempt) {
      art = detail::run_repeat(spec, r, bin_dir);
      if (art.ok()) break;
    }
    if (!art.ok())
      return Error{"repeat " + std::to_string(r) + " failed after retries: " +
                   art.error().message + " (partial results in " + spec.out_dir + ")"};
    report.repeats.push_back(art.value().outcome);
    for (auto& v : art.value().violations)
      report.violations.push_back("repeat " + std::to_string(r) + ": " + v);
    for (auto& row : art.value().latency) report.latency_rows.push_back(std::move(row));
    for (auto& row : art.value().profits) report.profit_lines.push_back(std::move(row));
  }

  // Pooled per-client latency summaries, in milliseconds.
  std::map<std::string, std::vector<double>> per_client_ms;
  for (const auto& row : report.latency_rows)
    per_client_ms[row.client].push_back(static_cast<double>(row.latency_us) / 1000.0);
  for (auto& [client, samples] : per_client_ms) {
    auto s = stats::summarize(samples);
    if (s.ok()) report.latency_by_client[client] = s.value();
  }

  // Profit ratios: per (client, strategy, repeat) totals feed the shares.
  std::map<std::pair<std::string, std::string>, std::map<int, double>> grouped;
  for (const auto& line : report.profit_lines)
    grouped[{line.client, line.strategy}][line.repeat] +=
        static_cast<double>(line.profit_ticks);
  std::vector<stats::ProfitRow> rows;
  for (const auto& [key, by_repeat] : grouped)
    for (const auto& [repeat, profit] : by_repeat)
      rows.push_back({key.first, key.second, repeat, profit});
  report.profits = stats::profit_ratios(rows);

  // ---- Emission. Deterministic iteration order keeps the files replayable.
  {
    std::ofstream out(spec.out_dir + "/latency.csv");
    out << "client,repeat,seq,send_ts_us,recv_wall_us,latency_us\n";
    for (const auto& r : report.latency_rows)
      out << r.client << "," << r.repeat << "," << r.seq << "," << r.send_ts_us << ","
          << r.recv_wall_us << "," << r.latency_us << "\n";
  }
  {
    std::ofstream out(spec.out_dir + "/profits.csv");
    out << "client,repeat,trader,strategy,side,profit_ticks,filled_qty\n";
    for (const auto& p : report.profit_lines)
      out << p.client << "," << p.repeat << "," << p.trader << "," << p.strategy << ","
          << p.side << "," << p.profit_ticks << "," << p.filled_qty << "\n";
  }
  {
    std::ofstream out(spec.out_dir + "/summary.csv");
    out << "client,count,min_ms,q1_ms,median_ms,q3_ms,max_ms,mean_ms,variance_ms2,sd_ms\n";
    char buf[256];
    for (const auto& [client, s] : report.latency_by_client) {
      std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                    client.c_str(), s.count, s.min, s.q1, s.median, s.q3, s.max, s.mean,
                    s.variance, s.sd);
      out << buf;
    }
  }
  {
    std::ostringstream rep;
    rep << "Experiment report\n=================\n";
    rep << "repeats: " << spec.repeats << "  session_s: " << spec.session_s
        << "  clients: " << spec.clients.size() << "  feed: " << spec.feed_mode << "\n";
    rep << "publishes per repeat:";
    for (const auto& o : report.repeats) rep << " " << o.publishes;
    rep << "\ntrades per repeat:";
    for (const auto& o : report.repeats) rep << " " << o.exchange_trades;
    rep << "\n\nlatency (ms, pooled over repeats)\n";
    rep << "client   count     min      q1     med      q3     max    mean      sd\n";
    for (const auto& [client, s] : report.latency_by_client) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-8s %5zu %7s %7s %7s %7s %7s %7s %7s\n",
                    client.c_str(), s.count, detail::format_ms(s.min).c_str(),
                    detail::format_ms(s.q1).c_str(), detail::format_ms(s.median).c_str(),
                    detail::format_ms(s.q3).c_str(), detail::format_ms(s.max).c_str(),
                    detail::format_ms(s.mean).c_str(), detail::format_ms(s.sd).c_str());
      rep << buf;
    }
    rep << "\nprofit shares (averaged over repeats first)\n";
    if (!report.profits.ratios_defined) {
      rep << "  undefined: no positive total profit\n";
    } else {
      rep << "  by client:";
      for (const auto& [client, ratio] : report.profits.ratio_by_client) {
        char buf[128];
        std::snprintf(buf, sizeof buf, " %s=%.4f", client.c_str(), ratio);
        rep << buf;
      }
      rep << "\n  by strategy:";
      for (const auto& [strategy, ratio] : report.profits.ratio_by_strategy) {
        char buf[128];
        std::snprintf(buf, sizeof buf, " %s=%.4f", strategy.c_str(), ratio);
        rep << buf;
      }
      rep << "\n  by strategy within client:\n";
      for (const auto& [client, per] : report.profits.ratio_by_strategy_in_client) {
        rep << "    " << client << ":";
        for (const auto& [strategy, ratio] : per) {
          char buf[128];
          std::snprintf(buf, sizeof buf, " %s=%.4f", strategy.c_str(), ratio);
          rep << buf;
        }
        rep << "\n";
      }
    }
    rep << "\nviolations: ";
    if (report.violations.empty()) {
      rep << "none\n";
    } else {
      rep << report.violations.size() << "\n";
      for (const auto& v : report.violations) rep << "  - " << v << "\n";
    }
    if (auto st = detail::write_text(spec.out_dir + "/report.txt", rep.str()); !st.ok())
      return st.error();
  }
  return report;
}

}  // namespace dexsim::harness
