#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dexsim/agents.hpp"
#include "dexsim/lob.hpp"
#include "dexsim/result.hpp"
#include "dexsim/rng.hpp"

namespace dexsim::sched {

struct ScheduleSegment {
  double start_s = 0;
  double end_s = 0;
  std::int64_t low = 0;
  std::int64_t high = 0;
  bool operator==(const ScheduleSegment&) const = default;
};

// "start:end:low:high,start:end:low:high,…", seconds and ticks.
inline Expected<std::vector<ScheduleSegment>> parse_schedule(const std::vector<std::string>& items) {
  std::vector<ScheduleSegment> out;
  for (const std::string& item : items) {
    ScheduleSegment seg;
    long long low = 0, high = 0;
    if (std::sscanf(item.c_str(), "%lf:%lf:%lld:%lld", &seg.start_s, &seg.end_s, &low, &high) != 4)
      return Error{"bad schedule segment (want start:end:low:high): " + item};
    seg.low = low;
    seg.high = high;
    if (seg.low > seg.high) return Error{"schedule range inverted: " + item};
    if (seg.end_s <= seg.start_s) return Error{"schedule segment empty: " + item};
    out.push_back(seg);
  }
  if (out.empty()) return Error{"empty schedule"};
  if (out.front().start_s != 0) return Error{"schedule must start at t=0"};
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].start_s != out[i - 1].end_s)
      return Error{"schedule segments must partition the session without gaps"};
  return out;
}

inline Expected<ScheduleSegment> active_segment(const std::vector<ScheduleSegment>& schedule,
                                                double t) {
  for (const auto& seg : schedule)
    if (t >= seg.start_s && t < seg.end_s) return seg;
  return Error{"t=" + std::to_string(t) + " outside the scheduled session"};
}

// n limit prices evenly spread over [lo, hi] inclusive, rounded to ticks.
// The single-price convention is the range midpoint.
inline Expected<std::vector<std::int64_t>> limit_prices(std::int64_t lo, std::int64_t hi, int n) {
  if (lo > hi) return Error{"price range inverted"};
  if (n < 1) return Error{"need at least one price"};
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(std::llround((static_cast<double>(lo) + static_cast<double>(hi)) / 2.0));
    return out;
  }
  const double step = static_cast<double>(hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i)
    out.push_back(std::llround(static_cast<double>(lo) + step * static_cast<double>(i)));
  return out;
}

struct Equilibrium {
  std::int64_t p0 = 0;   // Midpoint of the max-quantity price interval.
  std::int64_t q0 = 0;   // Units tradeable at p0.
  std::int64_t p_lo = 0;  // The interval itself, for diagnostics.
  std::int64_t p_hi = 0;
};

// Theoretical equilibrium of the step supply/demand curves built from the
// traders' limit prices. nullopt = no crossing (no trade possible).
inline std::optional<Equilibrium> equilibrium(std::vector<std::int64_t> supply_limits,
                                              std::vector<std::int64_t> demand_limits) {
  if (supply_limits.empty() || demand_limits.empty()) return std::nullopt;
  std::sort(supply_limits.begin(), supply_limits.end());                          // Ascending.
  std::sort(demand_limits.begin(), demand_limits.end(), std::greater<>());        // Descending.
  const std::size_t max_q = std::min(supply_limits.size(), demand_limits.size());
  std::size_t q0 = 0;
  while (q0 < max_q && demand_limits[q0] >= supply_limits[q0]) ++q0;
  if (q0 == 0) return std::nullopt;
  Equilibrium eq;
  eq.q0 = static_cast<std::int64_t>(q0);
  eq.p_lo = supply_limits[q0 - 1];
  eq.p_hi = demand_limits[q0 - 1];
  eq.p0 = std::llround((static_cast<double>(eq.p_lo) + static_cast<double>(eq.p_hi)) / 2.0);
  return eq;
}

// Raw exponential inter-arrival gaps, exposed separately so tests can check
// exponentiality before the rescale that follows.
inline std::vector<double> drip_poisson_gaps(Rng& rng, int count, double mean) {
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) gaps.push_back(rng.exponential(mean));
  return gaps;
}

// n issue times in [start, start+len): n+1 exponential gaps with mean len/n,
// partial sums rescaled so the (n+1)-th lands exactly at the interval end.
// Equivalent to a Poisson process conditioned on n arrivals in the window.
inline std::vector<double> issue_times(double start, double len, int n, Rng& rng) {
  std::vector<double> out;
  if (n <= 0 || len <= 0) return out;
  std::vector<double> gaps = drip_poisson_gaps(rng, n + 1, len / static_cast<double>(n));
  double total = std::accumulate(gaps.begin(), gaps.end(), 0.0);
  out.reserve(static_cast<std::size_t>(n));
  double partial = 0;
  for (int i = 0; i < n; ++i) {
    partial += gaps[static_cast<std::size_t>(i)];
    out.push_back(start + len * (partial / total));
  }
  return out;
}

// One planned assignment: which trader, and the full assignment terms.
struct PlannedAssignment {
  int trader_index = 0;  // [0, n_buyers) buyers, then [n_buyers, n_buyers+n_sellers) sellers.
  agents::Assignment assignment;
};

// The complete deterministic assignment stream for one client session.
// Every trader gets exactly one assignment per interval; issue times drip
// within the interval; limits come from the segment active at issue time,
// with per-side price indices reshuffled each interval so no trader is
// pinned to one end of the range.
inline Expected<std::vector<PlannedAssignment>> plan_assignments(
    const std::vector<ScheduleSegment>& schedule, int n_buyers, int n_sellers,
    double interval_s, double session_s, Rng& rng) {
  if (n_buyers < 0 || n_sellers < 0 || n_buyers + n_sellers == 0)
    return Error{"roster has no traders"};
  if (interval_s <= 0) return Error{"interval must be positive"};
  if (session_s <= 0) return Error{"session must be positive"};
  if (!schedule.empty() && schedule.back().end_s < session_s)
    return Error{"schedule ends before the session does"};

  const int n_total = n_buyers + n_sellers;
  std::vector<PlannedAssignment> out;

  for (double interval_start = 0; interval_start < session_s; interval_start += interval_s) {
    const double len = std::min(interval_s, session_s - interval_start);
    std::vector<double> times = issue_times(interval_start, len, n_total, rng);

    std::vector<int> trader_order(static_cast<std::size_t>(n_total));
    std::iota(trader_order.begin(), trader_order.end(), 0);
    dexsim::shuffle(trader_order, rng);

    std::vector<int> buyer_price_idx(static_cast<std::size_t>(n_buyers));
    std::iota(buyer_price_idx.begin(), buyer_price_idx.end(), 0);
    dexsim::shuffle(buyer_price_idx, rng);
    std::vector<int> seller_price_idx(static_cast<std::size_t>(n_sellers));
    std::iota(seller_price_idx.begin(), seller_price_idx.end(), 0);
    dexsim::shuffle(seller_price_idx, rng);

    for (int j = 0; j < n_total; ++j) {
      const int trader = trader_order[static_cast<std::size_t>(j)];
      const double t = times[static_cast<std::size_t>(j)];
      auto seg = active_segment(schedule, t);
      if (!seg.ok()) return seg.error();

      const bool is_buyer = trader < n_buyers;
      const int side_count = is_buyer ? n_buyers : n_sellers;
      const int side_index = is_buyer ? trader : trader - n_buyers;
      auto prices = limit_prices(seg.value().low, seg.value().high, side_count);
      if (!prices.ok()) return prices.error();
      const int price_idx = is_buyer ? buyer_price_idx[static_cast<std::size_t>(side_index)]
                                     : seller_price_idx[static_cast<std::size_t>(side_index)];

      agents::Assignment a;
      a.side = is_buyer ? lob::Side::Bid : lob::Side::Ask;
      a.limit_price = prices.value()[static_cast<std::size_t>(price_idx)];
      a.qty = 1;
      a.issue_time_us = static_cast<std::int64_t>(t * 1e6);
      // An assignment is good until the next reissue, but never outlives the
      // segment that priced it: once the schedule shifts, quotes priced off
      // the old range would distort the new regime's price formation.
      a.expiry_time_us = static_cast<std::int64_t>(
          std::min({t + interval_s, seg.value().end_s, session_s}) * 1e6);
      out.push_back({trader, a});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PlannedAssignment& a, const PlannedAssignment& b) {
                     return a.assignment.issue_time_us < b.assignment.issue_time_us;
                   });
  return out;
}

}  // namespace dexsim::sched
