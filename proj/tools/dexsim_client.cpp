// Trading-client entry point: loads a config file, runs the hosted robot
// traders for the configured session against the exchange, writes the
// per-client CSV results, and exits.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "dexsim/client.hpp"
#include "dexsim/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Trading client hosting a roster of robot traders"};
  std::string config_path;
  app.add_option("--config", config_path, "Config file (key = value lines)")->required();
  CLI11_PARSE(app, argc, argv);

  auto cfg = dexsim::Config::load(config_path);
  if (!cfg.ok()) {
    std::fprintf(stderr, "config: %s\n", cfg.error().message.c_str());
    return 2;
  }
  auto ccfg = dexsim::client::ClientConfig::from_config(cfg.value());
  if (!ccfg.ok()) {
    std::fprintf(stderr, "config: %s\n", ccfg.error().message.c_str());
    return 2;
  }

  dexsim::client::TradingClient client(ccfg.value());
  auto result = client.run();
  if (!result.ok()) {
    // Environmental failures (port in use, exchange unreachable) are
    // retryable by the orchestrator; it keys off this exit code.
    std::fprintf(stderr, "run: %s\n", result.error().message.c_str());
    return 3;
  }
  const auto& r = result.value();
  std::int64_t total_profit = 0;
  for (const auto& t : r.traders) total_profit += t.profit;
  std::printf(
      "session done: datagrams=%llu gaps=%llu orders=%llu cancels=%llu trades=%zu "
      "profit=%lld protocol_errors=%llu\n",
      static_cast<unsigned long long>(r.datagrams),
      static_cast<unsigned long long>(r.gap_events),
      static_cast<unsigned long long>(r.orders_sent),
      static_cast<unsigned long long>(r.cancels_sent), r.trades.size(),
      static_cast<long long>(total_profit),
      static_cast<unsigned long long>(r.protocol_errors));
  return 0;
}
