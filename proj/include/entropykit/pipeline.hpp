#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entropykit/diagnostics.hpp"
#include "entropykit/entropy.hpp"
#include "entropykit/error.hpp"
#include "entropykit/events.hpp"
#include "entropykit/markov.hpp"
#include "entropykit/neep.hpp"

namespace entropykit {

enum class MeasureKind : std::size_t {
  ShannonDay,
  ShannonNight,
  EntropyRateDay,
  EntropyRateNight,
  EpDay,
  EpNight,
};

inline constexpr std::size_t kMeasureCount = 6;

inline constexpr std::array<MeasureKind, kMeasureCount> kAllMeasures{
    MeasureKind::ShannonDay,  MeasureKind::ShannonNight, MeasureKind::EntropyRateDay,
    MeasureKind::EntropyRateNight, MeasureKind::EpDay,   MeasureKind::EpNight};

inline std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::ShannonDay: return "shannon_day";
    case MeasureKind::ShannonNight: return "shannon_night";
    case MeasureKind::EntropyRateDay: return "entropy_rate_day";
    case MeasureKind::EntropyRateNight: return "entropy_rate_night";
    case MeasureKind::EpDay: return "ep_day";
    case MeasureKind::EpNight: return "ep_night";
  }
  return "?";
}

enum class MeasureFamily { Shannon, EntropyRate, Ep };

inline MeasureKind measure_kind(MeasureFamily family, DayPeriod period) {
  const std::size_t base = static_cast<std::size_t>(family) * 2;
  return static_cast<MeasureKind>(base + (period == DayPeriod::Night ? 1 : 0));
}

enum class Band { VeryLow, Low, High, VeryHigh };

inline std::string_view to_string(Band b) {
  switch (b) {
    case Band::VeryLow: return "very_low";
    case Band::Low: return "low";
    case Band::High: return "high";
    case Band::VeryHigh: return "very_high";
  }
  return "?";
}

inline std::optional<Band> parse_band(std::string_view s) {
  if (s == "very_low") return Band::VeryLow;
  if (s == "low") return Band::Low;
  if (s == "high") return Band::High;
  if (s == "very_high") return Band::VeryHigh;
  return std::nullopt;
}

// Equal-probability cut points of the standard normal.
struct Breakpoints {
  double low = -0.6745;
  double mid = 0.0;
  double high = 0.6745;
};

// Intervals are closed on the left: [low, mid) is Low, [mid, high) is High.
inline Band discretize(double z, const Breakpoints& bp = {}) {
  if (!std::isfinite(z)) throw Error(ErrorKind::InvalidArgument, "cannot discretize a non-finite z-score");
  if (z < bp.low) return Band::VeryLow;
  if (z < bp.mid) return Band::Low;
  if (z < bp.high) return Band::High;
  return Band::VeryHigh;
}

template <typename T>
using PerMeasure = std::array<T, kMeasureCount>;

struct FeatureRow {
  std::string household_id;
  sys_days week_start;
  PerMeasure<std::optional<double>> raw{};
  PerMeasure<std::optional<double>> normalized{};
  PerMeasure<std::optional<Band>> band{};
  PerMeasure<int> days_present{};
  std::vector<std::string> labels;

  std::optional<double>& raw_at(MeasureKind k) { return raw[static_cast<std::size_t>(k)]; }
  const std::optional<double>& raw_at(MeasureKind k) const { return raw[static_cast<std::size_t>(k)]; }
};

enum class MarginalMode { Empirical, Stationary };
enum class BandMode { Gaussian, Quartile };

struct PipelineOptions {
  std::size_t baseline_weeks = 16;
  double smoothing_alpha = 0.0;
  MarginalMode marginal = MarginalMode::Empirical;
  bool refit_transition = false;         // refit T on the preceding baseline_weeks for every week
  bool retrain_neep_per_window = false;  // train NEEP on each evaluated week instead of the baseline
  bool include_baseline_weeks = false;
  BandMode band_mode = BandMode::Gaussian;
  Breakpoints breakpoints{};
  TrainConfig train{};
};

struct PeriodBaseline {
  std::optional<TransitionMatrix> transition;
  std::optional<NeepModel> neep;
};

struct HouseholdBaseline {
  sys_days first_week;
  std::size_t weeks = 0;
  std::array<PeriodBaseline, 2> periods;  // indexed by DayPeriod

  sys_days baseline_end(std::size_t baseline_weeks) const {
    return first_week + std::chrono::days{7 * static_cast<long>(baseline_weeks)};
  }
};

using BaselineMap = std::map<std::string, HouseholdBaseline>;

namespace detail {

inline std::size_t period_index(DayPeriod p) { return p == DayPeriod::Night ? 1 : 0; }

struct HouseholdSpan {
  sys_days first_week;
  sys_days last_week;
};

inline std::map<std::string, HouseholdSpan> household_spans(const WindowMap& windows) {
  std::map<std::string, HouseholdSpan> spans;
  for (const auto& [key, trajectory] : windows) {
    auto [it, inserted] = spans.try_emplace(key.household_id, HouseholdSpan{key.week_start, key.week_start});
    if (!inserted) {
      it->second.first_week = std::min(it->second.first_week, key.week_start);
      it->second.last_week = std::max(it->second.last_week, key.week_start);
    }
  }
  return spans;
}

inline std::vector<Trajectory> collect(const WindowMap& windows, const std::string& household, DayPeriod period,
                                       sys_days from, sys_days to) {
  std::vector<Trajectory> out;
  const WindowKey lo{household, from, from, DayPeriod::Daytime};
  for (auto it = windows.lower_bound(lo); it != windows.end(); ++it) {
    const auto& key = it->first;
    if (key.household_id != household || key.week_start >= to) break;
    if (key.period == period) out.push_back(it->second);
  }
  return out;
}

inline std::optional<TransitionMatrix> try_fit(const std::vector<Trajectory>& trajectories,
                                               const LocationAlphabet& alphabet, double alpha,
                                               const std::string& household, DayPeriod period,
                                               std::vector<Diagnostic>& diags) {
  try {
    return fit_transition_matrix(trajectories, alphabet, alpha);
  } catch (const Error& e) {
    diags.push_back({"baseline", 0, household, "transition matrix unavailable",
                     std::string(to_string(period)) + ": " + e.what()});
    return std::nullopt;
  }
}

inline std::optional<NeepModel> try_train(const std::vector<Trajectory>& trajectories,
                                          const LocationAlphabet& alphabet, const TrainConfig& config,
                                          const std::string& household, DayPeriod period,
                                          std::vector<Diagnostic>& diags) {
  try {
    return train(trajectories, alphabet, config).model;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData && e.kind() != ErrorKind::Diverged) throw;
    diags.push_back({"baseline", 0, household, "entropy production model unavailable",
                     std::string(to_string(period)) + ": " + e.what()});
    return std::nullopt;
  }
}

}  // namespace detail

// Fits T (and, unless retraining per window, the NEEP model) for every
// (household, period) on the household's first `baseline_weeks` weeks.
// Households spanning fewer weeks are skipped with a diagnostic.
inline BaselineMap fit_baselines(const WindowMap& windows, const LocationAlphabet& alphabet,
                                 const PipelineOptions& options, std::vector<Diagnostic>& diags) {
  if (options.baseline_weeks == 0) throw Error(ErrorKind::InvalidArgument, "baseline weeks must be positive");
  BaselineMap out;
  for (const auto& [household, span] : detail::household_spans(windows)) {
    const auto weeks = static_cast<std::size_t>((span.last_week - span.first_week).count() / 7 + 1);
    if (weeks < options.baseline_weeks) {
      diags.push_back({"baseline", 0, household, "insufficient weeks",
                       std::to_string(weeks) + " weeks of data, baseline needs " +
                           std::to_string(options.baseline_weeks)});
      continue;
    }
    HouseholdBaseline baseline;
    baseline.first_week = span.first_week;
    baseline.weeks = weeks;
    const sys_days end = baseline.baseline_end(options.baseline_weeks);
    for (DayPeriod period : {DayPeriod::Daytime, DayPeriod::Night}) {
      const auto trajectories = detail::collect(windows, household, period, span.first_week, end);
      auto& slot = baseline.periods[detail::period_index(period)];
      slot.transition = detail::try_fit(trajectories, alphabet, options.smoothing_alpha, household, period, diags);
      if (!options.retrain_neep_per_window) {
        slot.neep = detail::try_train(trajectories, alphabet, options.train, household, period, diags);
      }
    }
    out.emplace(household, std::move(baseline));
  }
  return out;
}

// Per-day measures averaged over each evaluated week. A kind is missing
// for a week when no day of that week could produce it.
inline std::vector<FeatureRow> weekly_measures(const WindowMap& windows, const LocationAlphabet& alphabet,
                                               const BaselineMap& baselines, const PipelineOptions& options,
                                               std::vector<Diagnostic>& diags) {
  using std::chrono::days;
  std::vector<FeatureRow> rows;
  for (const auto& [household, baseline] : baselines) {
    const sys_days end = baseline.baseline_end(options.baseline_weeks);

    std::map<sys_days, std::vector<std::pair<const WindowKey*, const Trajectory*>>> weeks;
    const sys_days earliest{std::chrono::days::min()};
    const WindowKey lo{household, earliest, earliest, DayPeriod::Daytime};
    for (auto it = windows.lower_bound(lo); it != windows.end() && it->first.household_id == household; ++it) {
      if (!options.include_baseline_weeks && it->first.week_start < end) continue;
      weeks[it->first.week_start].emplace_back(&it->first, &it->second);
    }

    std::array<std::optional<ProbabilityDistribution>, 2> stationary;
    if (options.marginal == MarginalMode::Stationary && !options.refit_transition) {
      for (std::size_t p = 0; p < 2; ++p) {
        if (baseline.periods[p].transition) {
          stationary[p] = stationary_distribution(*baseline.periods[p].transition).distribution;
        }
      }
    }

    for (const auto& [week, entries] : weeks) {
      FeatureRow row;
      row.household_id = household;
      row.week_start = week;
      PerMeasure<double> sums{};

      std::array<std::optional<TransitionMatrix>, 2> refit;
      std::array<std::optional<NeepModel>, 2> retrained;
      std::array<std::optional<ProbabilityDistribution>, 2> refit_stationary;
      for (DayPeriod period : {DayPeriod::Daytime, DayPeriod::Night}) {
        const std::size_t p = detail::period_index(period);
        if (options.refit_transition) {
          const auto history = detail::collect(windows, household, period,
                                               week - days{7 * static_cast<long>(options.baseline_weeks)}, week);
          refit[p] = detail::try_fit(history, alphabet, options.smoothing_alpha, household, period, diags);
          if (refit[p] && options.marginal == MarginalMode::Stationary) {
            refit_stationary[p] = stationary_distribution(*refit[p]).distribution;
          }
        }
        if (options.retrain_neep_per_window) {
          const auto current = detail::collect(windows, household, period, week, week + days{7});
          retrained[p] = detail::try_train(current, alphabet, options.train, household, period, diags);
        }
      }

      for (const auto& [key, trajectory] : entries) {
        const std::size_t p = detail::period_index(key->period);
        auto record = [&](MeasureFamily family, double value) {
          const auto k = static_cast<std::size_t>(measure_kind(family, key->period));
          sums[k] += value;
          ++row.days_present[k];
        };

        const ProbabilityDistribution empirical = estimate_distribution(*trajectory, alphabet);
        record(MeasureFamily::Shannon, shannon_entropy(empirical));

        const auto& T = options.refit_transition ? refit[p] : baseline.periods[p].transition;
        if (T) {
          const auto& st = options.refit_transition ? refit_stationary[p] : stationary[p];
          record(MeasureFamily::EntropyRate,
                 entropy_rate(*T, options.marginal == MarginalMode::Stationary ? *st : empirical));
        }

        const auto& model = options.retrain_neep_per_window ? retrained[p] : baseline.periods[p].neep;
        if (model && trajectory->size() >= 2) record(MeasureFamily::Ep, ep_rate(*model, *trajectory));
      }

      for (std::size_t k = 0; k < kMeasureCount; ++k) {
        if (row.days_present[k] > 0) row.raw[k] = sums[k] / row.days_present[k];
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// Per-household z-scores using the population standard deviation over
// that household's non-missing weeks of each kind.
inline void normalize(std::vector<FeatureRow>& rows, std::vector<Diagnostic>& diags) {
  std::map<std::string, std::vector<std::size_t>> by_household;
  for (std::size_t i = 0; i < rows.size(); ++i) by_household[rows[i].household_id].push_back(i);

  for (const auto& [household, members] : by_household) {
    for (MeasureKind kind : kAllMeasures) {
      const auto k = static_cast<std::size_t>(kind);
      std::vector<std::size_t> present;
      for (std::size_t i : members) {
        rows[i].normalized[k].reset();
        if (rows[i].raw[k]) present.push_back(i);
      }
      if (present.empty()) continue;
      if (present.size() < 2) {
        diags.push_back({"normalize", 0, household, "too few weeks", std::string(to_string(kind))});
        continue;
      }
      double mean = 0.0;
      for (std::size_t i : present) mean += *rows[i].raw[k];
      mean /= static_cast<double>(present.size());
      double var = 0.0;
      for (std::size_t i : present) var += (*rows[i].raw[k] - mean) * (*rows[i].raw[k] - mean);
      const double sd = std::sqrt(var / static_cast<double>(present.size()));
      if (sd < 1e-12) {
        diags.push_back({"normalize", 0, household, "constant series", std::string(to_string(kind))});
        continue;
      }
      for (std::size_t i : present) rows[i].normalized[k] = (*rows[i].raw[k] - mean) / sd;
    }
  }
}

// Gaussian mode cuts each z-score at the breakpoints. Quartile mode ranks
// a household's z-scores per kind and splits them into four equal groups
// (tied values share the group of their lowest rank).
inline void assign_bands(std::vector<FeatureRow>& rows, BandMode mode, const Breakpoints& breakpoints = {}) {
  for (auto& row : rows) {
    for (std::size_t k = 0; k < kMeasureCount; ++k) {
      row.band[k] = row.normalized[k] ? std::optional<Band>(discretize(*row.normalized[k], breakpoints))
                                      : std::nullopt;
    }
  }
  if (mode == BandMode::Gaussian) return;

  std::map<std::string, std::vector<std::size_t>> by_household;
  for (std::size_t i = 0; i < rows.size(); ++i) by_household[rows[i].household_id].push_back(i);
  for (const auto& [household, members] : by_household) {
    for (std::size_t k = 0; k < kMeasureCount; ++k) {
      std::vector<double> values;
      for (std::size_t i : members) {
        if (rows[i].normalized[k]) values.push_back(*rows[i].normalized[k]);
      }
      std::sort(values.begin(), values.end());
      const auto m = values.size();
      for (std::size_t i : members) {
        if (!rows[i].normalized[k]) continue;
        const auto rank = static_cast<std::size_t>(
            std::lower_bound(values.begin(), values.end(), *rows[i].normalized[k]) - values.begin());
        rows[i].band[k] = static_cast<Band>(std::min<std::size_t>(4 * rank / m, 3));
      }
    }
  }
}

struct FeatureResult {
  std::vector<FeatureRow> rows;
  std::vector<Diagnostic> diagnostics;
};

// Baseline fitting, weekly measures, normalization and banding.
inline FeatureResult compute_features(const WindowMap& windows, const LocationAlphabet& alphabet,
                                      const PipelineOptions& options) {
  FeatureResult result;
  const BaselineMap baselines = fit_baselines(windows, alphabet, options, result.diagnostics);
  result.rows = weekly_measures(windows, alphabet, baselines, options, result.diagnostics);
  normalize(result.rows, result.diagnostics);
  assign_bands(result.rows, options.band_mode, options.breakpoints);
  return result;
}

}  // namespace entropykit
