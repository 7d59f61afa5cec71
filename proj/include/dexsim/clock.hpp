#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>

namespace dexsim {

// Wall clock, microseconds since the Unix epoch. Used for anything that
// crosses a process boundary (feed timestamps, latency comparison); assumes
// hosts are externally synchronized, which is trivially true on loopback.
inline std::int64_t wall_clock_us() {
  using namespace std::chrono;
  return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

// Monotonic clock, nanoseconds. Used for intra-process scheduling and for
// ordering checks that must never see the wall clock step.
inline std::int64_t mono_clock_ns() {
  using namespace std::chrono;
  return duration_cast<nanoseconds>(steady_clock::now().time_since_epoch()).count();
}

// FIX UTC timestamp with millisecond precision: YYYYMMDD-HH:MM:SS.sss
inline std::string format_utc_timestamp(std::int64_t wall_us) {
  std::time_t secs = static_cast<std::time_t>(wall_us / 1'000'000);
  int millis = static_cast<int>((wall_us % 1'000'000) / 1'000);
  if (millis < 0) {
    millis += 1'000;
    secs -= 1;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02d-%02d:%02d:%02d.%03d", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
  return buf;
}

}  // namespace dexsim
