// Statistics tests: the five-number summary against a brute-force
// order-statistics oracle, regeneration of the reference latency spreads
// from their published moments, and profit-share aggregation.

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dexsim/rng.hpp"
#include "dexsim/stats.hpp"

namespace {

using dexsim::Rng;
using dexsim::stats::LatencySummary;
using dexsim::stats::ProfitRow;

TEST(Summarize, SinglePointCollapsesEverything) {
  auto s = dexsim::stats::summarize({5.0});
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s.value().count, 1u);
  EXPECT_DOUBLE_EQ(s.value().min, 5.0);
  EXPECT_DOUBLE_EQ(s.value().q1, 5.0);
  EXPECT_DOUBLE_EQ(s.value().median, 5.0);
  EXPECT_DOUBLE_EQ(s.value().q3, 5.0);
  EXPECT_DOUBLE_EQ(s.value().max, 5.0);
  EXPECT_DOUBLE_EQ(s.value().variance, 0.0);
}

TEST(Summarize, FivePointLadderHitsTheOrderStatistics) {
  auto s = dexsim::stats::summarize({5, 3, 1, 4, 2});
  ASSERT_TRUE(s.ok());
  EXPECT_DOUBLE_EQ(s.value().min, 1.0);
  EXPECT_DOUBLE_EQ(s.value().q1, 2.0);
  EXPECT_DOUBLE_EQ(s.value().median, 3.0);
  EXPECT_DOUBLE_EQ(s.value().q3, 4.0);
  EXPECT_DOUBLE_EQ(s.value().max, 5.0);
  EXPECT_DOUBLE_EQ(s.value().mean, 3.0);
  EXPECT_DOUBLE_EQ(s.value().variance, 2.5);
  EXPECT_DOUBLE_EQ(s.value().sd, std::sqrt(2.5));
}

TEST(Summarize, EmptyInputIsAnError) {
  EXPECT_FALSE(dexsim::stats::summarize({}).ok());
}

// Brute-force oracle: the same interpolation convention assembled
// independently, using only indexing over a sorted copy.
double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double pos = p * static_cast<double>(n - 1);
  std::size_t below = 0;
  while (below + 1 < n && static_cast<double>(below + 1) <= pos) ++below;
  const double weight_hi = pos - static_cast<double>(below);
  if (below + 1 == n) return v[n - 1];
  return v[below] * (1.0 - weight_hi) + v[below + 1] * weight_hi;
}

TEST(Summarize, QuartilesMatchBruteForceOracle) {
  Rng rng(20250819);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 100));
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v.push_back(rng.uniform01() * 200.0 - 50.0);
    auto s = dexsim::stats::summarize(v);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(s.value().q1, oracle_quantile(v, 0.25), 1e-9) << "trial " << trial;
    EXPECT_NEAR(s.value().median, oracle_quantile(v, 0.50), 1e-9) << "trial " << trial;
    EXPECT_NEAR(s.value().q3, oracle_quantile(v, 0.75), 1e-9) << "trial " << trial;
    EXPECT_LE(s.value().min, s.value().q1);
    EXPECT_LE(s.value().q1, s.value().median);
    EXPECT_LE(s.value().median, s.value().q3);
    EXPECT_LE(s.value().q3, s.value().max);
    EXPECT_GE(s.value().variance, 0.0);
    EXPECT_NEAR(s.value().sd, std::sqrt(s.value().variance), 1e-12);
  }
}

// The published reference run: per-client latency spreads with known
// (mean, sd). Samples regenerated from those moments must summarize back to
// them. The published MAX column is excluded by design: those maxima were
// produced by network outliers, which a normal regeneration cannot and
// should not reproduce.
TEST(Summarize, RegeneratedReferenceSpreads) {
  struct Ref {
    double mean, sd;
  };
  const Ref refs[] = {{0.9, 0.3}, {1.0, 0.3}, {44.2, 0.7}, {135.4, 0.3}};
  Rng rng(4918);
  for (const Ref& ref : refs) {
    std::vector<double> samples;
    samples.reserve(491);
    for (int i = 0; i < 491; ++i) samples.push_back(rng.normal(ref.mean, ref.sd));
    auto s = dexsim::stats::summarize(samples);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(s.value().mean, ref.mean, 0.1);
    EXPECT_NEAR(s.value().sd, ref.sd, 0.1);
  }
}

TEST(Summarize, TruncatedFarClientMatchesItsColumn) {
  // The farthest client's column: min 134.9, q1 135.2, median 135.3,
  // q3 135.5 -- regenerated as 135.4 + N(0, 0.3^2) truncated at >= 134.9.
  Rng rng(7077);
  std::vector<double> samples;
  while (samples.size() < 491) {
    const double v = rng.normal(135.4, 0.3);
    if (v >= 134.9) samples.push_back(v);
  }
  auto s = dexsim::stats::summarize(samples);
  ASSERT_TRUE(s.ok());
  EXPECT_NEAR(s.value().min, 134.9, 0.2);
  EXPECT_NEAR(s.value().q1, 135.2, 0.2);
  EXPECT_NEAR(s.value().median, 135.3, 0.2);
  EXPECT_NEAR(s.value().q3, 135.5, 0.2);
  EXPECT_NEAR(s.value().mean, 135.4, 0.1);
  EXPECT_NEAR(s.value().sd, 0.3, 0.1);
}

TEST(ProfitRatios, EqualClientsSplitEvenly) {
  std::vector<ProfitRow> rows;
  for (int r = 0; r < 3; ++r)
    for (const char* c : {"CLNT1", "CLNT2", "CLNT3", "CLNT4"})
      rows.push_back({c, "GVWY", r, 100.0});
  auto report = dexsim::stats::profit_ratios(rows);
  ASSERT_TRUE(report.ratios_defined);
  ASSERT_EQ(report.ratio_by_client.size(), 4u);
  double sum = 0;
  for (const auto& [client, ratio] : report.ratio_by_client) {
    EXPECT_DOUBLE_EQ(ratio, 0.25);
    sum += ratio;
  }
  EXPECT_DOUBLE_EQ(sum, 1.0);
  EXPECT_DOUBLE_EQ(report.mean_by_client["CLNT1"], 100.0);
}

TEST(ProfitRatios, SingleWinnerTakesAll) {
  std::vector<ProfitRow> rows = {{"CLNT1", "GVWY", 0, 50.0},
                                 {"CLNT2", "GVWY", 0, 0.0}};
  auto report = dexsim::stats::profit_ratios(rows);
  ASSERT_TRUE(report.ratios_defined);
  EXPECT_DOUBLE_EQ(report.ratio_by_client["CLNT1"], 1.0);
  EXPECT_DOUBLE_EQ(report.ratio_by_client["CLNT2"], 0.0);
}

TEST(ProfitRatios, AllZeroProfitsAreUndefined) {
  std::vector<ProfitRow> rows = {{"CLNT1", "GVWY", 0, 0.0},
                                 {"CLNT2", "ZIC", 0, 0.0}};
  auto report = dexsim::stats::profit_ratios(rows);
  EXPECT_FALSE(report.ratios_defined);
  EXPECT_TRUE(report.ratio_by_client.empty());
}

TEST(ProfitRatios, AveragesOverRepeatsBeforeRatios) {
  // A earns only in repeat 0, B only in repeat 1; their means tie at 5.
  std::vector<ProfitRow> rows = {{"A", "GVWY", 0, 10.0},
                                 {"B", "GVWY", 0, 0.0},
                                 {"A", "GVWY", 1, 0.0},
                                 {"B", "GVWY", 1, 10.0}};
  auto report = dexsim::stats::profit_ratios(rows);
  ASSERT_TRUE(report.ratios_defined);
  EXPECT_DOUBLE_EQ(report.mean_by_client["A"], 5.0);
  EXPECT_DOUBLE_EQ(report.mean_by_client["B"], 5.0);
  EXPECT_DOUBLE_EQ(report.ratio_by_client["A"], 0.5);
  EXPECT_DOUBLE_EQ(report.ratio_by_client["B"], 0.5);
}

TEST(ProfitRatios, StrategySharesWithinEachClientSumToOne) {
  std::vector<ProfitRow> rows = {{"CLNT1", "GVWY", 0, 30.0},
                                 {"CLNT1", "ZIC", 0, 10.0},
                                 {"CLNT2", "SHVR", 0, 5.0}};
  auto report = dexsim::stats::profit_ratios(rows);
  ASSERT_TRUE(report.ratios_defined);
  const auto& c1 = report.ratio_by_strategy_in_client.at("CLNT1");
  EXPECT_DOUBLE_EQ(c1.at("GVWY"), 0.75);
  EXPECT_DOUBLE_EQ(c1.at("ZIC"), 0.25);
  EXPECT_DOUBLE_EQ(report.ratio_by_strategy_in_client.at("CLNT2").at("SHVR"), 1.0);
  for (const auto& [client, per_strategy] : report.ratio_by_strategy_in_client) {
    double sum = 0;
    for (const auto& [strategy, ratio] : per_strategy) {
      EXPECT_GE(ratio, 0.0);
      EXPECT_LE(ratio, 1.0);
      sum += ratio;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12) << client;
  }
}

}  // namespace
