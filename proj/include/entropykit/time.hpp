#pragma once

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "entropykit/error.hpp"

namespace entropykit {

using std::chrono::local_seconds;
using std::chrono::sys_days;
using std::chrono::sys_seconds;

// Named IANA zone (or "UTC") used to project instants onto civil time.
class TimeZone {
 public:
  static TimeZone utc() { return TimeZone("UTC", absl::UTCTimeZone()); }

  static TimeZone load(const std::string& name) {
    if (name.empty() || name == "UTC" || name == "Z") return utc();
    absl::TimeZone tz;
    if (!absl::LoadTimeZone(name, &tz)) {
      throw Error(ErrorKind::InvalidArgument, "unknown time zone '" + name + "'");
    }
    return TimeZone(name, tz);
  }

  const std::string& name() const noexcept { return name_; }

  local_seconds to_civil(sys_seconds instant) const {
    const absl::CivilSecond cs = zone_.At(absl::FromUnixSeconds(instant.time_since_epoch().count())).cs;
    using namespace std::chrono;
    const local_days day{year{static_cast<int>(cs.year())} / cs.month() / cs.day()};
    return day + hours{cs.hour()} + minutes{cs.minute()} + seconds{cs.second()};
  }

  // Repeated civil times (clocks turned back) resolve to the earlier
  // instant; skipped ones use the offset in force before the transition.
  sys_seconds from_civil(local_seconds civil) const {
    using namespace std::chrono;
    const auto day = floor<days>(civil);
    const year_month_day ymd{day};
    const hh_mm_ss<seconds> tod{civil - day};
    const absl::CivilSecond cs(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                               static_cast<unsigned>(ymd.day()), tod.hours().count(),
                               tod.minutes().count(), tod.seconds().count());
    const absl::TimeZone::TimeInfo info = zone_.At(cs);
    return sys_seconds{seconds{absl::ToUnixSeconds(info.pre)}};
  }

 private:
  TimeZone(std::string name, absl::TimeZone zone) : name_(std::move(name)), zone_(zone) {}

  std::string name_;
  absl::TimeZone zone_;
};

struct ParsedTimestamp {
  local_seconds written;                        // civil fields as written
  std::optional<std::chrono::seconds> offset;  // explicit UTC offset, if any
};

namespace detail {

inline bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + count, out);
  return true;
}

}  // namespace detail

// Accepts YYYY-MM-DD[T| ]HH:MM:SS[.fraction][Z|+HH:MM|-HH:MM|+HHMM].
// Fractional seconds are truncated.
inline std::optional<ParsedTimestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (s.size() < 19) return std::nullopt;
  if (!detail::read_digits(s, 0, 4, y) || s[4] != '-' || !detail::read_digits(s, 5, 2, mo) ||
      s[7] != '-' || !detail::read_digits(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') ||
      !detail::read_digits(s, 11, 2, h) || s[13] != ':' || !detail::read_digits(s, 14, 2, mi) ||
      s[16] != ':' || !detail::read_digits(s, 17, 2, se)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y} / month{static_cast<unsigned>(mo)} / day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 59) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }

  ParsedTimestamp out;
  out.written = local_days{ymd} + hours{h} + minutes{mi} + seconds{se};
  if (pos == s.size()) return out;
  if (s[pos] == 'Z' && pos + 1 == s.size()) {
    out.offset = seconds{0};
    return out;
  }
  if (s[pos] != '+' && s[pos] != '-') return std::nullopt;
  const int sign = s[pos] == '-' ? -1 : 1;
  int oh = 0, om = 0;
  if (!detail::read_digits(s, pos + 1, 2, oh)) return std::nullopt;
  std::size_t mpos = pos + 3;
  if (mpos < s.size() && s[mpos] == ':') ++mpos;
  if (!detail::read_digits(s, mpos, 2, om) || mpos + 2 != s.size()) return std::nullopt;
  if (oh > 23 || om > 59) return std::nullopt;
  out.offset = seconds{sign * (oh * 3600 + om * 60)};
  return out;
}

// Resolves a parsed timestamp to an absolute instant.
inline sys_seconds to_instant(const ParsedTimestamp& ts, const TimeZone& zone) {
  if (ts.offset) return sys_seconds{ts.written.time_since_epoch() - *ts.offset};
  return zone.from_civil(ts.written);
}

inline std::optional<sys_days> parse_date(std::string_view s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0;
  if (s.size() != 10 || !detail::read_digits(s, 0, 4, y) || s[4] != '-' ||
      !detail::read_digits(s, 5, 2, mo) || s[7] != '-' || !detail::read_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y} / month{static_cast<unsigned>(mo)} / day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

inline std::string format_date(sys_days day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_civil(local_seconds t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const hh_mm_ss<seconds> tod{t - day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()));
  return format_date(sys_days{day.time_since_epoch()}) + buf;
}

// Monday on or before `day`.
inline sys_days iso_week_start(sys_days day) {
  const std::chrono::weekday wd{day};
  return day - std::chrono::days{wd.iso_encoding() - 1};
}

}  // namespace entropykit
