// Experiment runner: `run <spec-file>` orchestrates one exchange and K
// trading clients per repeat and aggregates the results; `stats <csv>`
// recomputes latency summaries from an existing samples file.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dexsim/harness.hpp"
#include "dexsim/stats.hpp"
#include "dexsim/util.hpp"

namespace {

int cmd_run(const std::string& spec_path, std::string bin_dir) {
  auto spec = dexsim::harness::ExperimentSpec::from_file(spec_path);
  if (!spec.ok()) {
    std::fprintf(stderr, "spec: %s\n", spec.error().message.c_str());
    return 2;
  }
  if (bin_dir.empty()) {
    auto dir = dexsim::harness::self_exe_dir();
    if (!dir.ok()) {
      std::fprintf(stderr, "%s\n", dir.error().message.c_str());
      return 2;
    }
    bin_dir = dir.value();
  }
  auto report = dexsim::harness::run_experiment(spec.value(), bin_dir);
  if (!report.ok()) {
    std::fprintf(stderr, "experiment: %s\n", report.error().message.c_str());
    return 3;
  }

  std::ifstream rep(report.value().out_dir + "/report.txt");
  std::string line;
  while (std::getline(rep, line)) std::printf("%s\n", line.c_str());
  if (!report.value().violations.empty()) {
    std::fprintf(stderr, "%zu invariant violation(s); see report.txt\n",
                 report.value().violations.size());
    return 1;
  }
  return 0;
}

// Accepts both the aggregated layout (client,repeat,...,latency_us) and the
// single-client layout (seq,send_ts_us,recv_wall_us,latency_us).
int cmd_stats(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", csv_path.c_str());
    return 2;
  }
  std::string header;
  if (!std::getline(in, header)) {
    std::fprintf(stderr, "empty file\n");
    return 2;
  }
  const auto cols = dexsim::split(header, ',');
  int lat_col = -1, client_col = -1;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (dexsim::trim(cols[i]) == "latency_us") lat_col = static_cast<int>(i);
    if (dexsim::trim(cols[i]) == "client") client_col = static_cast<int>(i);
  }
  if (lat_col < 0) {
    std::fprintf(stderr, "no latency_us column in %s\n", csv_path.c_str());
    return 2;
  }

  std::map<std::string, std::vector<double>> groups;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = dexsim::split(line, ',');
    if (static_cast<int>(fields.size()) <= lat_col) continue;
    const std::string key = client_col >= 0 ? fields[static_cast<std::size_t>(client_col)]
                                            : std::string("all");
    try {
      groups[key].push_back(std::stod(fields[static_cast<std::size_t>(lat_col)]) / 1000.0);
    } catch (const std::exception&) {
    }
  }
  if (groups.empty()) {
    std::fprintf(stderr, "no samples\n");
    return 2;
  }

  std::printf("client   count     min      q1     med      q3     max    mean      sd\n");
  for (const auto& [client, samples] : groups) {
    auto s = dexsim::stats::summarize(samples);
    if (!s.ok()) continue;
    std::printf("%-8s %5zu %7.1f %7.1f %7.1f %7.1f %7.1f %7.1f %7.1f\n", client.c_str(),
                s.value().count, s.value().min, s.value().q1, s.value().median,
                s.value().q3, s.value().max, s.value().mean, s.value().sd);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment harness: orchestrates exchange + clients, computes statistics"};
  app.require_subcommand(1);

  std::string spec_path, bin_dir, csv_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a spec file");
  run->add_option("spec", spec_path, "Experiment spec (key = value lines)")->required();
  run->add_option("--bin-dir", bin_dir, "Directory holding dexsim_exchange / dexsim_client");

  auto* stats = app.add_subcommand("stats", "Summarize a latency.csv");
  stats->add_option("csv", csv_path, "Latency samples file")->required();

  CLI11_PARSE(app, argc, argv);
  if (run->parsed()) return cmd_run(spec_path, bin_dir);
  return cmd_stats(csv_path);
}
