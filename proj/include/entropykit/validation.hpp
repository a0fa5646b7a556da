#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "entropykit/commands.hpp"
#include "entropykit/entropy.hpp"
#include "entropykit/events.hpp"
#include "entropykit/markov.hpp"
#include "entropykit/neep.hpp"
#include "entropykit/pipeline.hpp"
#include "entropykit/random.hpp"
#include "entropykit/synthetic.hpp"

namespace entropykit {

// Built-in oracle battery behind `entropykit validate`.

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  Breakpoints breakpoints{};  // overridable so a broken cut point can be shown to fail
  TrainConfig train{};
  std::uint64_t seed = 0;
  std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
};

namespace validation {

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

inline TransitionMatrix two_state(double stay_a, double stay_b) {
  return TransitionMatrix::from_probabilities(LocationAlphabet({"A", "B"}),
                                              {{stay_a, 1.0 - stay_a}, {1.0 - stay_b, stay_b}});
}

inline TransitionMatrix ring(double forward) {
  const double back = 1.0 - forward;
  return TransitionMatrix::from_probabilities(LocationAlphabet({"A", "B", "C"}),
                                              {{0.0, forward, back}, {back, 0.0, forward}, {forward, back, 0.0}});
}

inline ProbabilityDistribution uniform(std::size_t n) {
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)), 1};
}

inline double trained_ep(const TransitionMatrix& T, const TrainConfig& config, std::uint64_t seed) {
  const ProbabilityDistribution start = uniform(T.size());
  const Trajectory train_traj = simulate_trajectory(T, start, 100'001, seed + 1);
  const Trajectory eval_traj = simulate_trajectory(T, start, 100'001, seed + 2);
  const TrainResult trained = train(std::span<const Trajectory>(&train_traj, 1), T.alphabet(), config);
  return ep_rate(trained.model, eval_traj);
}

inline CheckResult shannon_exactness() {
  const double uniform5 = shannon_entropy(std::vector<double>(5, 0.2));
  const double one_hot = shannon_entropy(std::vector<double>{0, 0, 1, 0, 0});
  const double mixed = shannon_entropy(std::vector<double>{0.25, 0.25, 0.5});
  const bool ok = std::abs(uniform5 - std::log(5.0)) <= 1e-12 && std::abs(one_hot) <= 1e-12 &&
                  std::abs(mixed - 1.5 * std::numbers::ln2) <= 1e-6;
  return {"1", "shannon exactness", ok,
          "H(uniform5)=" + fmt(uniform5) + " H(one-hot)=" + fmt(one_hot) + " H(.25,.25,.5)=" + fmt(mixed)};
}

inline CheckResult entropy_rate_oracle(std::uint64_t seed) {
  const TransitionMatrix T = two_state(0.9, 0.8);
  const ProbabilityDistribution pi{{2.0 / 3.0, 1.0 / 3.0}, 1};
  auto h2 = [](double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); };
  const double expected = 2.0 / 3.0 * h2(0.1) + 1.0 / 3.0 * h2(0.2);
  const double analytic = entropy_rate(T, pi);
  const Trajectory sim = simulate_trajectory(T, pi, 100'000, seed);
  const TransitionMatrix fitted = fit_transition_matrix(sim, T.alphabet());
  const double estimated = entropy_rate(fitted, estimate_distribution(sim, T.alphabet()));
  const bool ok = std::abs(analytic - expected) <= 1e-6 && std::abs(analytic - 0.383523) <= 1e-6 &&
                  std::abs(estimated - analytic) <= 0.01;
  return {"2", "entropy-rate oracle", ok, "analytic=" + fmt(analytic) + " simulated=" + fmt(estimated)};
}

inline CheckResult ep_nonequilibrium(const TrainConfig& config, std::uint64_t seed) {
  const double sigma = 0.4 * std::log(7.0 / 3.0);
  const double estimate = trained_ep(ring(0.7), config, seed);
  const double rel = std::abs(estimate - sigma) / sigma;
  return {"3", "EP oracle, biased ring", rel < 0.10,
          "ep_rate=" + fmt(estimate) + " analytic=" + fmt(sigma) + " rel_err=" + fmt(rel)};
}

inline CheckResult ep_equilibrium(const TrainConfig& config, std::uint64_t seed) {
  const double estimate = trained_ep(two_state(0.5, 0.5), config, seed);
  return {"4", "EP oracle, symmetric chain", std::abs(estimate) < 0.05, "ep_rate=" + fmt(estimate)};
}

inline CheckResult antisymmetry(std::uint64_t seed) {
  Rng rng(seed);
  const LocationAlphabet rooms = LocationAlphabet::rooms();
  std::size_t violations = 0;
  for (int draw = 0; draw < 10'000; ++draw) {
    Rng init(rng.next());
    const NeepModel m = NeepModel::initialize(rooms, 4, {8}, init, false);
    const State a = rng.below(rooms.size());
    const State b = rng.below(rooms.size());
    if (m.delta_s(a, b) + m.delta_s(b, a) != 0.0 || m.delta_s(a, a) != 0.0) ++violations;
  }
  Rng init(seed + 7);
  const NeepModel m = NeepModel::initialize(rooms, 8, {64, 64}, init, false);
  Trajectory forward;
  for (int k = 0; k < 5000; ++k) forward.states.push_back(rng.below(rooms.size()));
  Trajectory backward{{forward.states.rbegin(), forward.states.rend()}};
  const double f = ep_rate(m, forward);
  const double r = ep_rate(m, backward);
  const bool ok = violations == 0 && f == -r;
  return {"5", "antisymmetry", ok,
          std::to_string(violations) + " violations in 10000 draws; forward=" + fmt(f) + " reversed=" + fmt(r)};
}

inline CheckResult gradient(std::uint64_t seed) {
  const LocationAlphabet rooms = LocationAlphabet::rooms();
  Rng rng(seed);
  const NeepModel m = NeepModel::initialize(rooms, 8, {64, 64}, rng, false);
  std::vector<Transition> batch;
  for (int k = 0; k < 256; ++k) batch.push_back({rng.below(rooms.size()), rng.below(rooms.size())});
  const double err = gradient_check(m, batch, 1e-5, seed, 200);
  return {"6", "gradient check", err < 1e-4, "max_rel_err=" + fmt(err) + " over 200 parameters"};
}

inline CheckResult pipeline_statistics(const Breakpoints& bp, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureRow> rows;
  for (int w = 0; w < 40; ++w) {
    FeatureRow row;
    row.household_id = w < 20 ? "a" : "b";
    row.week_start = sys_days{std::chrono::days{7 * w}};
    for (std::size_t k = 0; k < kMeasureCount; ++k) row.raw[k] = rng.uniform(0.0, 2.0) + (w < 20 ? 0.0 : 5.0);
    rows.push_back(row);
  }
  std::vector<Diagnostic> diags;
  normalize(rows, diags);
  double worst_mean = 0.0, worst_sd = 0.0;
  for (const std::string h : {"a", "b"}) {
    for (std::size_t k = 0; k < kMeasureCount; ++k) {
      double s = 0.0, s2 = 0.0;
      int m = 0;
      for (const auto& r : rows) {
        if (r.household_id != h) continue;
        s += *r.normalized[k];
        ++m;
      }
      const double mean = s / m;
      for (const auto& r : rows) {
        if (r.household_id == h) s2 += (*r.normalized[k] - mean) * (*r.normalized[k] - mean);
      }
      worst_mean = std::max(worst_mean, std::abs(mean));
      worst_sd = std::max(worst_sd, std::abs(std::sqrt(s2 / m) - 1.0));
    }
  }

  std::array<int, 4> freq{};
  const int draws = 100'000;
  for (int i = 0; i < draws; ++i) ++freq[static_cast<std::size_t>(discretize(rng.normal(), bp))];
  double worst_freq = 0.0;
  for (int f : freq) worst_freq = std::max(worst_freq, std::abs(f / static_cast<double>(draws) - 0.25));

  std::vector<FeatureRow> scaled = rows;
  for (auto& r : scaled) {
    for (auto& v : r.raw) v = 3.5 * *v - 11.0;
  }
  normalize(scaled, diags);
  assign_bands(rows, BandMode::Gaussian, bp);
  assign_bands(scaled, BandMode::Gaussian, bp);
  bool bands_match = true;
  for (std::size_t i = 0; i < rows.size(); ++i) bands_match = bands_match && rows[i].band == scaled[i].band;

  const bool ok = worst_mean <= 1e-9 && worst_sd <= 1e-9 && worst_freq <= 0.01 && bands_match;
  return {"7", "pipeline statistics", ok,
          "max|mean|=" + fmt(worst_mean) + " max|sd-1|=" + fmt(worst_sd) + " max|freq-0.25|=" + fmt(worst_freq) +
              (bands_match ? " affine-invariant" : " affine rescale changed bands")};
}

inline CheckResult windowing() {
  const std::string corpus =
      "household_id,timestamp,location\n"
      "h1,2021-03-01T05:59:59,kitchen\n"
      "h1,2021-03-01T06:00:00,kitchen\n"
      "h1,2021-03-01T17:59:59,lounge\n"
      "h1,2021-03-01T18:00:00,bedroom\n"
      "h1,2021-03-02T00:00:00,bedroom\n"
      "h1,2021-03-07T12:00:00,hallway\n"
      "h2,2021-03-08T23:59:59,bathroom\n"
      "h2,2021-03-08T07:00:00,garage\n";
  std::istringstream in(corpus);
  const ParseResult parsed = parse_events(in, LocationAlphabet::rooms());
  const WindowMap windows = slice_windows(parsed.events);
  std::size_t total = 0;
  for (const auto& [key, t] : windows) total += t.size();

  using namespace std::chrono;
  auto at = [](int h, int m, int s) { return local_days{year{2021} / 3 / 1} + hours{h} + minutes{m} + seconds{s}; };
  const bool boundaries = period_of(at(5, 59, 59)) == DayPeriod::Night && period_of(at(6, 0, 0)) == DayPeriod::Daytime &&
                          period_of(at(17, 59, 59)) == DayPeriod::Daytime &&
                          period_of(at(18, 0, 0)) == DayPeriod::Night && period_of(at(0, 0, 0)) == DayPeriod::Night;
  const WindowKey sunday{"h1", sys_days{year{2021} / 3 / 1}, sys_days{year{2021} / 3 / 7}, DayPeriod::Daytime};
  const bool ok = total == parsed.events.size() && parsed.events.size() == 7 && parsed.diagnostics.size() == 1 &&
                  boundaries && windows.count(sunday) == 1;
  return {"8", "windowing partition", ok,
          std::to_string(total) + " windowed of " + std::to_string(parsed.events.size()) + " accepted events"};
}

inline std::filesystem::path synthetic_corpus(const std::filesystem::path& dir, std::size_t weeks, std::uint64_t seed) {
  const auto path = dir / ("entropykit-validate-" + std::to_string(weeks) + "w-" + std::to_string(seed) + ".csv");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write scratch file " + path.string());
  SyntheticHousehold spec;
  spec.weeks = weeks;
  spec.seed = seed;
  spec.events_per_period = 24;
  const LocationAlphabet rooms = LocationAlphabet::rooms();
  const auto day = TransitionMatrix::from_probabilities(
      rooms, {{0.1, 0.3, 0.2, 0.2, 0.2}, {0.3, 0.2, 0.1, 0.1, 0.3}, {0.1, 0.1, 0.3, 0.3, 0.2},
              {0.1, 0.1, 0.4, 0.2, 0.2}, {0.2, 0.2, 0.2, 0.2, 0.2}});
  const auto night = TransitionMatrix::from_probabilities(
      rooms, {{0.1, 0.7, 0.0, 0.0, 0.2}, {0.2, 0.7, 0.0, 0.0, 0.1}, {0.1, 0.2, 0.2, 0.3, 0.2},
              {0.1, 0.2, 0.3, 0.2, 0.2}, {0.3, 0.4, 0.1, 0.1, 0.1}});
  write_synthetic_events(out, spec, day, night);
  return path;
}

inline RunConfig features_config(const std::filesystem::path& input, const TrainConfig& train, std::uint64_t seed) {
  RunConfig config;
  config.inputs = {input.string()};
  config.pipeline.train = train;
  config.pipeline.train.epochs = 20;
  config.pipeline.train.seed = seed;
  return config;
}

inline CheckResult end_to_end_determinism(const ValidationOptions& options) {
  const auto input = synthetic_corpus(options.scratch_dir, 20, options.seed);
  const RunConfig config = features_config(input, options.train, options.seed);
  std::ostringstream first, second, diag1, diag2;
  const int rc1 = run_features(config, first, diag1);
  const int rc2 = run_features(config, second, diag2);
  std::filesystem::remove(input);
  const bool ok = rc1 == 0 && rc2 == 0 && first.str() == second.str() && diag1.str() == diag2.str();
  return {"9", "end-to-end determinism", ok,
          "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) + ", " + std::to_string(first.str().size()) +
              " bytes, identical=" + (first.str() == second.str() ? "yes" : "no")};
}

inline CheckResult baseline_protocol(const ValidationOptions& options) {
  const auto input = synthetic_corpus(options.scratch_dir, 20, options.seed + 1);
  RunConfig config = features_config(input, options.train, options.seed);
  std::ostringstream out, diag;
  const int rc = run_features(config, out, diag);
  std::filesystem::remove(input);
  std::istringstream in(out.str());
  const auto table = parse_feature_table(in, TableFormat::Csv);
  return {"10", "baseline protocol", rc == 0 && table.rows.size() == 4,
          std::to_string(table.rows.size()) + " feature rows from 20 weeks with a 16-week baseline"};
}

}  // namespace validation

inline std::vector<CheckResult> run_validation(
    const ValidationOptions& options = {},
    const std::function<void(const CheckResult&)>& on_result = [](const CheckResult&) {}) {
  using Clock = std::chrono::steady_clock;
  struct Check {
    const char* id;
    const char* name;
    std::function<CheckResult()> run;
  };
  const std::vector<Check> checks{
      {"1", "shannon exactness", [] { return validation::shannon_exactness(); }},
      {"2", "entropy-rate oracle", [&] { return validation::entropy_rate_oracle(options.seed); }},
      {"3", "EP oracle, biased ring", [&] { return validation::ep_nonequilibrium(options.train, options.seed); }},
      {"4", "EP oracle, symmetric chain", [&] { return validation::ep_equilibrium(options.train, options.seed); }},
      {"5", "antisymmetry", [&] { return validation::antisymmetry(options.seed); }},
      {"6", "gradient check", [&] { return validation::gradient(options.seed); }},
      {"7", "pipeline statistics", [&] { return validation::pipeline_statistics(options.breakpoints, options.seed); }},
      {"8", "windowing partition", [] { return validation::windowing(); }},
      {"9", "end-to-end determinism", [&] { return validation::end_to_end_determinism(options); }},
      {"10", "baseline protocol", [&] { return validation::baseline_protocol(options); }},
  };
  std::vector<CheckResult> results;
  for (const auto& check : checks) {
    const auto start = Clock::now();
    CheckResult r;
    try {
      r = check.run();
    } catch (const std::exception& e) {
      r = {check.id, check.name, false, std::string("threw: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace entropykit
