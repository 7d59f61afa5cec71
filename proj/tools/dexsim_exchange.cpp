// Exchange server entry point: loads a config file, runs the matching
// engine and market-data publisher until SIGTERM/SIGINT, then drains,
// writes the output CSVs, and exits.

#include <signal.h>

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "dexsim/config.hpp"
#include "dexsim/exchange.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Limit-order-book exchange server (FIX order entry, UDP market data)"};
  std::string config_path;
  app.add_option("--config", config_path, "Config file (key = value lines)")->required();
  CLI11_PARSE(app, argc, argv);

  auto cfg = dexsim::Config::load(config_path);
  if (!cfg.ok()) {
    std::fprintf(stderr, "config: %s\n", cfg.error().message.c_str());
    return 2;
  }
  auto xcfg = dexsim::exch::ExchangeConfig::from_config(cfg.value());
  if (!xcfg.ok()) {
    std::fprintf(stderr, "config: %s\n", xcfg.error().message.c_str());
    return 2;
  }

  // Block the shutdown signals before any thread exists so every thread
  // inherits the mask and sigwait below is the sole consumer.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGTERM);
  sigaddset(&set, SIGINT);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  dexsim::exch::ExchangeServer server(xcfg.value());
  auto st = server.start();
  if (!st.ok()) {
    std::fprintf(stderr, "start: %s\n", st.error().message.c_str());
    return 3;
  }
  std::printf("exchange listening on port %u\n", server.port());
  std::fflush(stdout);

  int sig = 0;
  sigwait(&set, &sig);
  std::printf("signal %d: shutting down\n", sig);
  server.stop();
  std::printf("publishes=%llu trades=%zu\n",
              static_cast<unsigned long long>(server.publish_count()),
              server.book().tape().size());
  return 0;
}
