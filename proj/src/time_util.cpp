#include "hdna/time_util.hpp"

#include <cstdio>
#include <ctime>

namespace hdna {

std::string rfc3339_utc(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch());
  std::time_t secs = static_cast<std::time_t>(floor<seconds>(ms).count());
  int frac = static_cast<int>(ms.count() - floor<seconds>(ms).count() * 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

}  // namespace hdna
