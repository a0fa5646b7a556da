#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropykit/csv.hpp"
#include "entropykit/diagnostics.hpp"
#include "entropykit/error.hpp"
#include "entropykit/format.hpp"
#include "entropykit/pipeline.hpp"
#include "entropykit/time.hpp"

namespace entropykit {

enum class TableFormat { Csv, Jsonl };

// User-supplied event annotation, e.g. (h1, 2021-03-03, "fall").
struct EventLabel {
  std::string household_id;
  sys_days date;
  std::string name;
  std::size_t line = 0;
};

// CSV with header `household_id,date,label` (`week_start` and `event` are
// accepted as column aliases).
inline std::vector<EventLabel> parse_labels(std::istream& in, std::vector<Diagnostic>& diags) {
  if (!in) throw Error(ErrorKind::Io, "label stream is not readable");
  std::vector<EventLabel> labels;
  std::string buffer;
  std::size_t line_no = 0;
  std::ptrdiff_t c_house = -1, c_date = -1, c_name = -1;
  bool have_header = false;
  while (std::getline(in, buffer)) {
    ++line_no;
    const auto line = csv::trim_cr(buffer);
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (!have_header) {
      if (!fields) throw Error(ErrorKind::CorruptInput, "unreadable label header");
      for (std::size_t i = 0; i < fields->size(); ++i) {
        const auto& f = (*fields)[i];
        const auto idx = static_cast<std::ptrdiff_t>(i);
        if (f == "household_id") c_house = idx;
        if (f == "date" || f == "week_start") c_date = idx;
        if (f == "label" || f == "event") c_name = idx;
      }
      if (c_house < 0 || c_date < 0 || c_name < 0) {
        throw Error(ErrorKind::CorruptInput, "label header needs household_id, date and label columns");
      }
      have_header = true;
      continue;
    }
    const auto need = static_cast<std::size_t>(std::max({c_house, c_date, c_name})) + 1;
    if (!fields || fields->size() < need) {
      diags.push_back({"labels", line_no, "", "malformed label", std::string(line)});
      continue;
    }
    const auto date = parse_date((*fields)[static_cast<std::size_t>(c_date)]);
    if (!date) {
      diags.push_back({"labels", line_no, (*fields)[static_cast<std::size_t>(c_house)], "bad date",
                       (*fields)[static_cast<std::size_t>(c_date)]});
      continue;
    }
    labels.push_back({(*fields)[static_cast<std::size_t>(c_house)], *date,
                      (*fields)[static_cast<std::size_t>(c_name)], line_no});
  }
  return labels;
}

// Attaches each label to its household's row for the ISO week containing
// the label date. Unmatched labels become diagnostics.
inline void join_labels(std::vector<FeatureRow>& rows, const std::vector<EventLabel>& labels,
                        std::vector<Diagnostic>& diags) {
  std::map<std::pair<std::string, sys_days>, std::size_t> index;
  std::set<std::string> households;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    index.emplace(std::make_pair(rows[i].household_id, rows[i].week_start), i);
    households.insert(rows[i].household_id);
  }
  for (const auto& label : labels) {
    if (!households.count(label.household_id)) {
      diags.push_back({"labels", label.line, label.household_id, "unknown household", label.name});
      continue;
    }
    const auto it = index.find({label.household_id, iso_week_start(label.date)});
    if (it == index.end()) {
      diags.push_back({"labels", label.line, label.household_id, "no feature row for week",
                       format_date(label.date) + " " + label.name});
      continue;
    }
    rows[it->second].labels.push_back(label.name);
  }
}

inline std::vector<std::string> feature_columns() {
  std::vector<std::string> cols{"household_id", "week_start"};
  for (MeasureKind kind : kAllMeasures) {
    const std::string k(to_string(kind));
    for (const char* suffix : {"_raw", "_z", "_band", "_days"}) cols.push_back(k + suffix);
  }
  cols.push_back("labels");
  return cols;
}

namespace detail {

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::vector<std::string> split_labels(std::string_view s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(';', start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

// One record per row, in the order given. CSV starts with a `# {...}`
// metadata line; JSONL starts with a {"meta": {...}} object. Missing values
// are empty fields in CSV and null in JSONL.
inline void emit_feature_table(std::ostream& out, const std::vector<FeatureRow>& rows, TableFormat format,
                               const nlohmann::ordered_json& metadata) {
  const auto columns = feature_columns();
  if (format == TableFormat::Csv) {
    out << "# " << metadata.dump() << '\n';
    out << detail::join(columns, ',') << '\n';
    for (const auto& row : rows) {
      std::vector<std::string> fields{csv::escape(row.household_id), format_date(row.week_start)};
      for (std::size_t k = 0; k < kMeasureCount; ++k) {
        fields.push_back(row.raw[k] ? format_double(*row.raw[k]) : "");
        fields.push_back(row.normalized[k] ? format_double(*row.normalized[k]) : "");
        fields.push_back(row.band[k] ? std::string(to_string(*row.band[k])) : "");
        fields.push_back(std::to_string(row.days_present[k]));
      }
      fields.push_back(csv::escape(detail::join(row.labels, ';')));
      out << detail::join(fields, ',') << '\n';
    }
    return;
  }

  out << nlohmann::ordered_json{{"meta", metadata}}.dump() << '\n';
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["household_id"] = row.household_id;
    j["week_start"] = format_date(row.week_start);
    for (std::size_t k = 0; k < kMeasureCount; ++k) {
      const std::string name(to_string(kAllMeasures[k]));
      j[name + "_raw"] = row.raw[k] ? nlohmann::ordered_json(*row.raw[k]) : nlohmann::ordered_json(nullptr);
      j[name + "_z"] = row.normalized[k] ? nlohmann::ordered_json(*row.normalized[k]) : nlohmann::ordered_json(nullptr);
      j[name + "_band"] =
          row.band[k] ? nlohmann::ordered_json(std::string(to_string(*row.band[k]))) : nlohmann::ordered_json(nullptr);
      j[name + "_days"] = row.days_present[k];
    }
    j["labels"] = row.labels;
    out << j.dump() << '\n';
  }
}

struct FeatureTable {
  nlohmann::json metadata;
  std::vector<FeatureRow> rows;
};

inline FeatureTable parse_feature_table(std::istream& in, TableFormat format) {
  FeatureTable table;
  std::string buffer;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::CorruptInput, "feature table line " + std::to_string(line_no) + ": " + what);
  };
  auto number = [&](std::string_view s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    auto v = parse_double(s);
    if (!v) fail("bad number '" + std::string(s) + "'");
    return v;
  };
  auto band = [&](std::string_view s) -> std::optional<Band> {
    if (s.empty()) return std::nullopt;
    auto b = parse_band(s);
    if (!b) fail("bad band '" + std::string(s) + "'");
    return b;
  };
  auto date = [&](std::string_view s) {
    auto d = parse_date(s);
    if (!d) fail("bad date '" + std::string(s) + "'");
    return *d;
  };

  const auto columns = feature_columns();
  bool have_header = format == TableFormat::Jsonl;
  while (std::getline(in, buffer)) {
    ++line_no;
    const auto line = csv::trim_cr(buffer);
    if (line.empty()) continue;
    FeatureRow row;
    if (format == TableFormat::Csv) {
      if (line.front() == '#') {
        table.metadata = nlohmann::json::parse(line.substr(1), nullptr, false);
        continue;
      }
      const auto fields = csv::split(line);
      if (!fields) fail("unterminated quote");
      if (!have_header) {
        if (*fields != columns) fail("unexpected header");
        have_header = true;
        continue;
      }
      if (fields->size() != columns.size()) fail("wrong field count");
      const auto& f = *fields;
      row.household_id = f[0];
      row.week_start = date(f[1]);
      for (std::size_t k = 0; k < kMeasureCount; ++k) {
        row.raw[k] = number(f[2 + 4 * k]);
        row.normalized[k] = number(f[3 + 4 * k]);
        row.band[k] = band(f[4 + 4 * k]);
        row.days_present[k] = static_cast<int>(number(f[5 + 4 * k]).value_or(0));
      }
      row.labels = detail::split_labels(f.back());
    } else {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (!j.is_object()) fail("not a JSON object");
      if (j.contains("meta")) {
        table.metadata = j["meta"];
        continue;
      }
      try {
        row.household_id = j.at("household_id").get<std::string>();
        row.week_start = date(j.at("week_start").get<std::string>());
        for (std::size_t k = 0; k < kMeasureCount; ++k) {
          const std::string name(to_string(kAllMeasures[k]));
          if (!j.at(name + "_raw").is_null()) row.raw[k] = j[name + "_raw"].get<double>();
          if (!j.at(name + "_z").is_null()) row.normalized[k] = j[name + "_z"].get<double>();
          if (!j.at(name + "_band").is_null()) row.band[k] = band(j[name + "_band"].get<std::string>());
          row.days_present[k] = j.at(name + "_days").get<int>();
        }
        row.labels = j.at("labels").get<std::vector<std::string>>();
      } catch (const nlohmann::json::exception& e) {
        fail(e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace entropykit
