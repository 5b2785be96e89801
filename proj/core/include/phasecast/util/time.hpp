#ifndef PHASECAST_UTIL_TIME_HPP_
#define PHASECAST_UTIL_TIME_HPP_

#include <cstdint>
#include <string>

namespace phasecast {

/// Seconds since the Unix epoch, UTC. All timestamps in the toolkit use this.
using UnixSeconds = std::int64_t;

constexpr int kSecondsPerDay = 86400;

/// "YYYY-MM-DD" -> midnight UTC of that date. Throws std::invalid_argument.
UnixSeconds parse_date(const std::string& s);

/// "HH:MM" or "HH:MM:SS" -> seconds past midnight. Throws std::invalid_argument.
int parse_time_of_day(const std::string& s);

/// Seconds past midnight for a timestamp.
inline int time_of_day(UnixSeconds t) {
  UnixSeconds r = t % kSecondsPerDay;
  if (r < 0) r += kSecondsPerDay;
  return static_cast<int>(r);
}

std::string format_time_of_day(int seconds);

}  // namespace phasecast

#endif  // PHASECAST_UTIL_TIME_HPP_
