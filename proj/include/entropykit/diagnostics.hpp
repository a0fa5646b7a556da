#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace entropykit {

// A non-fatal problem attributed to an input record or a household.
struct Diagnostic {
  std::string stage;      // "parse", "baseline", "normalize", ...
  std::size_t line = 0;   // 1-based input line; 0 when not line-specific
  std::string household;
  std::string reason;
  std::string detail;
  std::string source;     // input path, when several inputs are read
};

inline nlohmann::ordered_json to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["stage"] = d.stage;
  if (d.line != 0) j["line"] = d.line;
  if (!d.household.empty()) j["household_id"] = d.household;
  j["reason"] = d.reason;
  if (!d.detail.empty()) j["detail"] = d.detail;
  if (!d.source.empty()) j["source"] = d.source;
  return j;
}

// One JSON object per line.
inline void write_diagnostics(std::ostream& out, const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) out << to_json(d).dump() << '\n';
}

}  // namespace entropykit
