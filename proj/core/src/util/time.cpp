#include "phasecast/util/time.hpp"

#include <cstdio>
#include <stdexcept>

namespace phasecast {

namespace {

// Days from 1970-01-01 to y-m-d (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

UnixSeconds parse_date(const std::string& s) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3 ||
      m < 1 || m > 12 || d < 1 || d > 31) {
    throw std::invalid_argument("bad date (want YYYY-MM-DD): " + s);
  }
  return days_from_civil(y, m, d) * static_cast<std::int64_t>(kSecondsPerDay);
}

int parse_time_of_day(const std::string& s) {
  int h = 0, m = 0, sec = 0;
  char tail = 0;
  int n = std::sscanf(s.c_str(), "%d:%d:%d%c", &h, &m, &sec, &tail);
  if (n != 2 && n != 3) throw std::invalid_argument("bad time of day (want HH:MM[:SS]): " + s);
  if (n == 2) sec = 0;
  if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 59) {
    throw std::invalid_argument("time of day out of range: " + s);
  }
  return h * 3600 + m * 60 + sec;
}

std::string format_time_of_day(int seconds) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", seconds / 3600, (seconds / 60) % 60,
                seconds % 60);
  return buf;
}

}  // namespace phasecast
