#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "dexsim/result.hpp"

namespace dexsim::stats {

// Five-number summary plus moments for a latency sample set, in milliseconds.
struct LatencySummary {
  std::size_t count = 0;
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
  double mean = 0;
  double variance = 0;  // Sample variance, divisor n-1 (0 when n == 1).
  double sd = 0;
};

// Quantile by linear interpolation between order statistics ("type 7"):
// h = (n-1)p, value = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).
// Input must be sorted ascending and non-empty.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline Expected<LatencySummary> summarize(std::vector<double> samples) {
  if (samples.empty()) return Error{"summarize: no samples"};
  std::sort(samples.begin(), samples.end());
  LatencySummary s;
  s.count = samples.size();
  s.min = samples.front();
  s.q1 = quantile_sorted(samples, 0.25);
  s.median = quantile_sorted(samples, 0.50);
  s.q3 = quantile_sorted(samples, 0.75);
  s.max = samples.back();

  double sum = 0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double acc = 0;
    for (double v : samples) {
      const double d = v - s.mean;
      acc += d * d;
    }
    s.variance = acc / static_cast<double>(s.count - 1);
  }
  s.sd = std::sqrt(s.variance);
  return s;
}

// One client's total profit for one strategy in one repeat, in ticks.
struct ProfitRow {
  std::string client;
  std::string strategy;
  int repeat = 0;
  double profit = 0;
};

// Profit shares: profits are averaged over repeats first, then normalized
// into ratios. Groupings: per client (across everything), per strategy
// (across everything), and per strategy within each client.
struct ProfitReport {
  bool ratios_defined = false;  // False when total mean profit is zero.
  std::map<std::string, double> mean_by_client;
  std::map<std::string, double> mean_by_strategy;
  std::map<std::string, double> ratio_by_client;
  std::map<std::string, double> ratio_by_strategy;
  std::map<std::string, std::map<std::string, double>> ratio_by_strategy_in_client;
};

inline ProfitReport profit_ratios(const std::vector<ProfitRow>& rows) {
  ProfitReport report;
  if (rows.empty()) return report;

  std::map<int, bool> repeats;
  for (const auto& r : rows) repeats[r.repeat] = true;
  const double n_repeats = static_cast<double>(repeats.size());

  std::map<std::string, double> client_sum, strategy_sum;
  std::map<std::string, std::map<std::string, double>> in_client_sum;
  for (const auto& r : rows) {
    client_sum[r.client] += r.profit;
    strategy_sum[r.strategy] += r.profit;
    in_client_sum[r.client][r.strategy] += r.profit;
  }

  double total = 0;
  for (auto& [client, sum] : client_sum) {
    report.mean_by_client[client] = sum / n_repeats;
    total += sum / n_repeats;
  }
  for (auto& [strategy, sum] : strategy_sum)
    report.mean_by_strategy[strategy] = sum / n_repeats;

  if (total <= 0) return report;  // All-zero profits: ratios undefined.
  report.ratios_defined = true;
  for (auto& [client, mean] : report.mean_by_client)
    report.ratio_by_client[client] = mean / total;
  for (auto& [strategy, mean] : report.mean_by_strategy)
    report.ratio_by_strategy[strategy] = mean / total;

  for (auto& [client, per_strategy] : in_client_sum) {
    double client_total = 0;
    for (auto& [strategy, sum] : per_strategy) client_total += sum;
    if (client_total <= 0) continue;  // No trades in this client: skip group.
    for (auto& [strategy, sum] : per_strategy)
      report.ratio_by_strategy_in_client[client][strategy] = sum / client_total;
  }
  return report;
}

}  // namespace dexsim::stats
