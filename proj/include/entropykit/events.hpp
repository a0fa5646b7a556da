#pragma once

#include <algorithm>
#include <chrono>
#include <compare>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "entropykit/alphabet.hpp"
#include "entropykit/csv.hpp"
#include "entropykit/diagnostics.hpp"
#include "entropykit/error.hpp"
#include "entropykit/time.hpp"

namespace entropykit {

// One PIR firing.
struct ActivityEvent {
  std::string household_id;
  sys_seconds instant;    // absolute time, used for ordering
  local_seconds civil;    // wall-clock time in the configured zone
  State location = 0;
  std::size_t line = 0;   // source line, for diagnostics
};

enum class DayPeriod { Daytime, Night };

inline std::string_view to_string(DayPeriod p) { return p == DayPeriod::Daytime ? "day" : "night"; }

// Daytime is [06:00, 18:00); everything else on the same civil date is Night.
inline DayPeriod period_of(local_seconds civil) {
  using namespace std::chrono;
  const auto since_midnight = civil - floor<days>(civil);
  return (since_midnight >= hours{6} && since_midnight < hours{18}) ? DayPeriod::Daytime
                                                                    : DayPeriod::Night;
}

struct WindowKey {
  std::string household_id;
  sys_days week_start;  // Monday
  sys_days day;
  DayPeriod period = DayPeriod::Daytime;

  auto operator<=>(const WindowKey&) const = default;
};

using WindowMap = std::map<WindowKey, Trajectory>;

enum class EventFormat { Csv, Jsonl };

struct ParseOptions {
  EventFormat format = EventFormat::Csv;
  TimeZone zone = TimeZone::utc();
  // Fatal when strictly more than this fraction of records is rejected.
  double max_reject_fraction = 0.5;
};

struct ParseResult {
  std::vector<ActivityEvent> events;
  std::vector<Diagnostic> diagnostics;
  std::size_t records = 0;  // non-blank data lines seen
};

namespace detail {

struct RawRecord {
  std::string household;
  std::string timestamp;
  std::string location;
};

inline void accept_record(const RawRecord& raw, std::size_t line, const LocationAlphabet& alphabet,
                          const TimeZone& zone, ParseResult& result) {
  auto reject = [&](std::string reason, std::string detail) {
    result.diagnostics.push_back({"parse", line, raw.household, std::move(reason), std::move(detail)});
  };
  if (raw.household.empty()) return reject("missing household_id", "");
  const auto ts = parse_timestamp(raw.timestamp);
  if (!ts) return reject("bad timestamp", raw.timestamp);
  const auto loc = alphabet.find(raw.location);
  if (!loc) return reject("unknown location", raw.location);

  ActivityEvent e;
  e.household_id = raw.household;
  e.instant = to_instant(*ts, zone);
  e.civil = ts->offset ? zone.to_civil(e.instant) : ts->written;
  e.location = *loc;
  e.line = line;
  result.events.push_back(std::move(e));
}

}  // namespace detail

// Reads a CSV (header `household_id,timestamp,location`, any column order,
// extra columns ignored, `#` lines are comments) or JSONL stream. Rejected records are reported in
// `diagnostics`, never dropped silently. Events come back ordered by
// (household, instant) with ties kept in input order.
inline ParseResult parse_events(std::istream& in, const LocationAlphabet& alphabet,
                                const ParseOptions& options = {}) {
  if (!in) throw Error(ErrorKind::Io, "input stream is not readable");
  ParseResult result;
  std::string buffer;
  std::size_t line_no = 0;

  std::size_t col_household = 0, col_timestamp = 0, col_location = 0, width = 0;
  bool have_header = options.format != EventFormat::Csv;

  while (std::getline(in, buffer)) {
    ++line_no;
    const std::string_view line = csv::trim_cr(buffer);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (options.format == EventFormat::Csv && line.front() == '#') continue;

    if (!have_header) {
      const auto cols = csv::split(line);
      if (!cols) throw Error(ErrorKind::CorruptInput, "unreadable CSV header");
      auto find = [&](std::string_view name) -> std::size_t {
        const auto it = std::find(cols->begin(), cols->end(), name);
        if (it == cols->end()) {
          throw Error(ErrorKind::CorruptInput, "CSV header lacks column '" + std::string(name) + "'");
        }
        return static_cast<std::size_t>(it - cols->begin());
      };
      col_household = find("household_id");
      col_timestamp = find("timestamp");
      col_location = find("location");
      width = std::max({col_household, col_timestamp, col_location}) + 1;
      have_header = true;
      continue;
    }

    ++result.records;
    detail::RawRecord raw;
    if (options.format == EventFormat::Csv) {
      const auto fields = csv::split(line);
      if (!fields || fields->size() < width) {
        result.diagnostics.push_back({"parse", line_no, "", "malformed record", std::string(line)});
        continue;
      }
      raw = {(*fields)[col_household], (*fields)[col_timestamp], (*fields)[col_location]};
    } else {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      const bool ok = j.is_object() && j.contains("household_id") && j["household_id"].is_string() &&
                      j.contains("timestamp") && j["timestamp"].is_string() &&
                      j.contains("location") && j["location"].is_string();
      if (!ok) {
        result.diagnostics.push_back({"parse", line_no, "", "malformed record", std::string(line)});
        continue;
      }
      raw = {j["household_id"].get<std::string>(), j["timestamp"].get<std::string>(),
             j["location"].get<std::string>()};
    }
    detail::accept_record(raw, line_no, alphabet, options.zone, result);
  }
  if (in.bad()) throw Error(ErrorKind::Io, "read failure after line " + std::to_string(line_no));

  const std::size_t rejected = result.records - result.events.size();
  if (result.records > 0 &&
      static_cast<double>(rejected) > options.max_reject_fraction * static_cast<double>(result.records)) {
    throw Error(ErrorKind::CorruptInput, std::to_string(rejected) + " of " +
                                             std::to_string(result.records) + " records rejected");
  }

  std::stable_sort(result.events.begin(), result.events.end(),
                   [](const ActivityEvent& a, const ActivityEvent& b) {
                     if (a.household_id != b.household_id) return a.household_id < b.household_id;
                     return a.instant < b.instant;
                   });
  return result;
}

inline ParseResult read_events_file(const std::string& path, const LocationAlphabet& alphabet,
                                    const ParseOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return parse_events(in, alphabet, options);
}

// Groups events into per-(household, ISO week, civil day, period)
// trajectories, preserving event order inside each trajectory.
inline WindowMap slice_windows(const std::vector<ActivityEvent>& events) {
  WindowMap windows;
  for (const auto& e : events) {
    const auto day = sys_days{std::chrono::floor<std::chrono::days>(e.civil).time_since_epoch()};
    WindowKey key{e.household_id, iso_week_start(day), day, period_of(e.civil)};
    windows[std::move(key)].states.push_back(e.location);
  }
  return windows;
}

// Drops consecutive repeats of the same location within each trajectory.
inline void collapse_repeats(WindowMap& windows) {
  for (auto& [key, trajectory] : windows) {
    auto& s = trajectory.states;
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

}  // namespace entropykit
