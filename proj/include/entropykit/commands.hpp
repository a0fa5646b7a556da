#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropykit/diagnostics.hpp"
#include "entropykit/error.hpp"
#include "entropykit/events.hpp"
#include "entropykit/feature_table.hpp"
#include "entropykit/format.hpp"
#include "entropykit/markov.hpp"
#include "entropykit/neep.hpp"
#include "entropykit/pipeline.hpp"

#ifndef ENTROPYKIT_VERSION
#define ENTROPYKIT_VERSION "0.0.0"
#endif

namespace entropykit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitUsage = 2;

// Everything that determines the output of `features`, `fit` and `train`.
struct RunConfig {
  std::vector<std::string> inputs;
  EventFormat format = EventFormat::Csv;
  std::string time_zone = "UTC";
  std::vector<std::string> alphabet;  // empty: the five default rooms
  double max_reject_fraction = 0.5;
  bool collapse_repeats = false;
  PipelineOptions pipeline{};
  std::string labels_path;
  std::string output_path;  // empty or "-": standard output
  TableFormat output_format = TableFormat::Csv;

  LocationAlphabet location_alphabet() const {
    return alphabet.empty() ? LocationAlphabet::rooms() : LocationAlphabet(alphabet);
  }
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  const auto& p = c.pipeline;
  nlohmann::ordered_json j;
  j["inputs"] = c.inputs;
  j["format"] = c.format == EventFormat::Csv ? "csv" : "jsonl";
  j["time_zone"] = c.time_zone;
  j["alphabet"] = c.location_alphabet().symbols();
  j["max_reject_fraction"] = c.max_reject_fraction;
  j["collapse_repeats"] = c.collapse_repeats;
  j["baseline_weeks"] = p.baseline_weeks;
  j["smoothing_alpha"] = p.smoothing_alpha;
  j["marginal"] = p.marginal == MarginalMode::Empirical ? "empirical" : "stationary";
  j["refit_transition"] = p.refit_transition;
  j["retrain_neep_per_window"] = p.retrain_neep_per_window;
  j["include_baseline_weeks"] = p.include_baseline_weeks;
  j["band_mode"] = p.band_mode == BandMode::Gaussian ? "gaussian" : "quartile";
  j["breakpoints"] = {p.breakpoints.low, p.breakpoints.mid, p.breakpoints.high};
  j["train"] = to_json(p.train);
  j["labels"] = c.labels_path;
  j["output_format"] = c.output_format == TableFormat::Csv ? "csv" : "jsonl";
  return j;
}

// Self-describing header shared by every command's output.
inline nlohmann::ordered_json run_metadata(std::string_view command, const nlohmann::ordered_json& config,
                                           std::uint64_t seed) {
  nlohmann::ordered_json meta;
  meta["tool"] = "entropykit";
  meta["version"] = ENTROPYKIT_VERSION;
  meta["command"] = command;
  meta["config_hash"] = hex64(fnv1a(config.dump()));
  meta["seed"] = seed;
  meta["config"] = config;
  return meta;
}

namespace detail {

inline void report_fatal(std::ostream& diag, const std::string& message) {
  diag << nlohmann::ordered_json{{"fatal", message}}.dump() << '\n';
}

// Writes to a file in one piece, or to `fallback` for "" and "-".
inline void write_output(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << content;
    fallback.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json_file(const std::string& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::CorruptInput, "'" + path + "' is not valid JSON");
  return j;
}

// Parses every input, merging events in (household, instant, input) order.
inline WindowMap load_windows(const RunConfig& config, const LocationAlphabet& alphabet,
                              std::vector<Diagnostic>& diags) {
  if (config.inputs.empty()) throw Error(ErrorKind::InvalidArgument, "no input files");
  ParseOptions options;
  options.format = config.format;
  options.zone = TimeZone::load(config.time_zone);
  options.max_reject_fraction = config.max_reject_fraction;

  std::vector<ActivityEvent> events;
  for (const auto& path : config.inputs) {
    ParseResult parsed = read_events_file(path, alphabet, options);
    for (auto& d : parsed.diagnostics) {
      if (config.inputs.size() > 1) d.source = path;
      diags.push_back(std::move(d));
    }
    events.insert(events.end(), std::make_move_iterator(parsed.events.begin()),
                  std::make_move_iterator(parsed.events.end()));
  }
  if (events.empty()) throw Error(ErrorKind::InsufficientData, "no events");
  if (config.inputs.size() > 1) {
    std::stable_sort(events.begin(), events.end(), [](const ActivityEvent& a, const ActivityEvent& b) {
      if (a.household_id != b.household_id) return a.household_id < b.household_id;
      return a.instant < b.instant;
    });
  }
  WindowMap windows = slice_windows(events);
  if (config.collapse_repeats) collapse_repeats(windows);
  return windows;
}

template <typename Body>
int guarded(std::ostream& diag, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    report_fatal(diag, e.what());
  } catch (const std::exception& e) {
    report_fatal(diag, std::string("unexpected failure: ") + e.what());
  }
  return kExitFatal;
}

}  // namespace detail

// parse -> slice -> baseline fit/train -> weekly measures -> normalize ->
// band -> emit. Per-household problems are diagnostics; exit 1 only on
// fatal errors.
inline int run_features(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  return detail::guarded(diag, [&] {
    const LocationAlphabet alphabet = config.location_alphabet();
    std::vector<Diagnostic> diags;
    const WindowMap windows = detail::load_windows(config, alphabet, diags);

    FeatureResult result = compute_features(windows, alphabet, config.pipeline);
    diags.insert(diags.end(), result.diagnostics.begin(), result.diagnostics.end());
    if (!config.labels_path.empty()) {
      std::ifstream labels_in(config.labels_path, std::ios::binary);
      if (!labels_in) throw Error(ErrorKind::Io, "cannot open '" + config.labels_path + "'");
      join_labels(result.rows, parse_labels(labels_in, diags), diags);
    }

    std::ostringstream table;
    emit_feature_table(table, result.rows, config.output_format,
                       run_metadata("features", to_json(config), config.pipeline.train.seed));
    detail::write_output(config.output_path, table.str(), out);
    write_diagnostics(diag, diags);
    return kExitOk;
  });
}

// Baseline transition matrices per (household, period), as JSON.
inline int run_fit(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  return detail::guarded(diag, [&] {
    const LocationAlphabet alphabet = config.location_alphabet();
    std::vector<Diagnostic> diags;
    const WindowMap windows = detail::load_windows(config, alphabet, diags);
    PipelineOptions options = config.pipeline;
    options.retrain_neep_per_window = true;  // skips baseline NEEP training
    const BaselineMap baselines = fit_baselines(windows, alphabet, options, diags);

    nlohmann::ordered_json doc;
    doc["meta"] = run_metadata("fit", to_json(config), config.pipeline.train.seed);
    doc["households"] = nlohmann::ordered_json::array();
    for (const auto& [household, baseline] : baselines) {
      for (DayPeriod period : {DayPeriod::Daytime, DayPeriod::Night}) {
        const auto& T = baseline.periods[period == DayPeriod::Night ? 1 : 0].transition;
        if (!T) continue;
        doc["households"].push_back({{"household_id", household},
                                     {"period", to_string(period)},
                                     {"first_week", format_date(baseline.first_week)},
                                     {"transition_matrix", to_json(*T)}});
      }
    }
    detail::write_output(config.output_path, doc.dump(2) + "\n", out);
    write_diagnostics(diag, diags);
    return kExitOk;
  });
}

// Baseline NEEP checkpoints per (household, period), as JSON.
inline int run_train(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  return detail::guarded(diag, [&] {
    const LocationAlphabet alphabet = config.location_alphabet();
    std::vector<Diagnostic> diags;
    const WindowMap windows = detail::load_windows(config, alphabet, diags);
    PipelineOptions options = config.pipeline;
    options.retrain_neep_per_window = false;
    const BaselineMap baselines = fit_baselines(windows, alphabet, options, diags);

    nlohmann::ordered_json doc;
    doc["meta"] = run_metadata("train", to_json(config), config.pipeline.train.seed);
    doc["models"] = nlohmann::ordered_json::array();
    for (const auto& [household, baseline] : baselines) {
      for (DayPeriod period : {DayPeriod::Daytime, DayPeriod::Night}) {
        const auto& model = baseline.periods[period == DayPeriod::Night ? 1 : 0].neep;
        if (!model) continue;
        doc["models"].push_back({{"household_id", household},
                                 {"period", to_string(period)},
                                 {"checkpoint", to_json(*model, options.train)}});
      }
    }
    detail::write_output(config.output_path, doc.dump(2) + "\n", out);
    write_diagnostics(diag, diags);
    return kExitOk;
  });
}

struct SimulateConfig {
  std::string chain_path;  // {"alphabet": [...], "probs": [[...]], "start": [...]?}
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  std::string output_path;
  std::string report_path;  // default: output_path + ".oracle.json"
  std::string household_id = "sim";
  std::string start_time = "2021-01-04T00:00:00";
  long spacing_seconds = 60;
};

inline nlohmann::ordered_json to_json(const SimulateConfig& c) {
  return {{"chain", c.chain_path},   {"steps", c.steps},
          {"seed", c.seed},        {"household_id", c.household_id},
          {"start_time", c.start_time}, {"spacing_seconds", c.spacing_seconds}};
}

// Analytic quantities of a chain; entries that do not exist for this
// chain are null with the reason alongside.
inline nlohmann::ordered_json oracle_report(const TransitionMatrix& T) {
  nlohmann::ordered_json r;
  r["alphabet"] = T.alphabet().symbols();
  try {
    const StationaryResult st = stationary_distribution(T);
    r["stationary"] = st.distribution.probs;
    r["stationary_flags"] = {{"reducible", st.reducible}, {"periodic", st.periodic}};
    r["shannon_stationary"] = shannon_entropy(st.distribution);
    r["entropy_rate_stationary"] = entropy_rate(T, st.distribution);
  } catch (const Error& e) {
    r["stationary"] = nullptr;
    r["stationary_error"] = e.what();
  }
  try {
    r["ep_rate"] = analytic_ep_rate(T);
  } catch (const Error& e) {
    r["ep_rate"] = nullptr;
    r["ep_rate_error"] = e.what();
  }
  return r;
}

inline int run_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& diag) {
  return detail::guarded(diag, [&] {
    if (config.output_path.empty() || config.output_path == "-") {
      throw Error(ErrorKind::InvalidArgument, "simulate needs an output path");
    }
    if (config.steps == 0) throw Error(ErrorKind::InvalidArgument, "steps must be positive");
    if (config.spacing_seconds <= 0) throw Error(ErrorKind::InvalidArgument, "spacing must be positive");
    const auto start_ts = parse_timestamp(config.start_time);
    if (!start_ts || start_ts->offset) throw Error(ErrorKind::InvalidArgument, "bad start time '" + config.start_time + "'");

    const nlohmann::json spec = detail::read_json_file(config.chain_path);
    const TransitionMatrix T = transition_matrix_from_json(spec);
    ProbabilityDistribution start{std::vector<double>(T.size(), 1.0 / static_cast<double>(T.size())), 1};
    if (spec.contains("start")) {
      start.probs = spec["start"].get<std::vector<double>>();
      if (start.probs.size() != T.size()) throw Error(ErrorKind::InvalidArgument, "start has wrong length");
    } else {
      try {
        const auto st = stationary_distribution(T);
        if (!st.flagged()) start = st.distribution;
      } catch (const Error&) {
      }
    }

    const Trajectory trajectory = simulate_trajectory(T, start, config.steps, config.seed);
    const auto meta = run_metadata("simulate", to_json(config), config.seed);
    std::ostringstream events;
    events << "# " << meta.dump() << '\n' << "household_id,timestamp,location\n";
    const std::chrono::seconds spacing{config.spacing_seconds};
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
      events << config.household_id << ',' << format_civil(start_ts->written + spacing * static_cast<long>(k)) << ','
             << T.alphabet().symbol(trajectory.states[k]) << '\n';
    }

    nlohmann::ordered_json report;
    report["meta"] = meta;
    report["steps"] = config.steps;
    report["oracle"] = oracle_report(T);

    detail::write_output(config.output_path, events.str(), out);
    const std::string report_path =
        config.report_path.empty() ? config.output_path + ".oracle.json" : config.report_path;
    detail::write_output(report_path, report.dump(2) + "\n", out);
    return kExitOk;
  });
}

// Summarizes a transition-matrix file, a NEEP checkpoint, or the output
// of `fit` / `train`.
inline int run_inspect(const std::string& path, std::ostream& out, std::ostream& diag) {
  return detail::guarded(diag, [&] {
    const nlohmann::json doc = detail::read_json_file(path);
    auto describe_matrix = [](const TransitionMatrix& T) {
      nlohmann::ordered_json j = oracle_report(T);
      j["total_transitions"] = T.total_transitions();
      std::vector<std::string> unobserved;
      for (std::size_t i = 0; i < T.size(); ++i) {
        if (T.row_unobserved(i)) unobserved.push_back(T.alphabet().symbol(i));
      }
      j["unobserved_rows"] = unobserved;
      j["matrix"] = to_json(T);
      return j;
    };
    auto describe_model = [](const NeepModel& m) {
      nlohmann::ordered_json j;
      j["alphabet"] = m.alphabet().symbols();
      j["embedding_width"] = m.embedding_width();
      j["hidden"] = m.hidden();
      j["parameter_count"] = m.parameter_count();
      auto table = nlohmann::ordered_json::array();
      for (State a = 0; a < m.states(); ++a) {
        std::vector<double> row;
        for (State b = 0; b < m.states(); ++b) row.push_back(m.delta_s(a, b));
        table.push_back(row);
      }
      j["delta_s"] = std::move(table);
      return j;
    };

    nlohmann::ordered_json summary;
    const std::string format = doc.is_object() ? doc.value("format", std::string()) : std::string();
    if (format == "entropykit.neep") {
      summary["neep"] = describe_model(neep_model_from_json(doc));
    } else if (doc.is_object() && doc.contains("households")) {
      summary["households"] = nlohmann::ordered_json::array();
      for (const auto& h : doc["households"]) {
        summary["households"].push_back({{"household_id", h.at("household_id")},
                                         {"period", h.at("period")},
                                         {"summary", describe_matrix(transition_matrix_from_json(h.at("transition_matrix")))}});
      }
    } else if (doc.is_object() && doc.contains("models")) {
      summary["models"] = nlohmann::ordered_json::array();
      for (const auto& m : doc["models"]) {
        summary["models"].push_back({{"household_id", m.at("household_id")},
                                     {"period", m.at("period")},
                                     {"summary", describe_model(neep_model_from_json(m.at("checkpoint")))}});
      }
    } else {
      summary["transition_matrix"] = describe_matrix(transition_matrix_from_json(doc));
    }
    out << summary.dump(2) << '\n';
    return kExitOk;
  });
}

}  // namespace entropykit
