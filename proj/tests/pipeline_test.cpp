#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "entropykit/pipeline.hpp"
#include "entropykit/synthetic.hpp"

namespace {

using namespace entropykit;
using namespace std::chrono;

constexpr auto kShannonDay = static_cast<std::size_t>(MeasureKind::ShannonDay);

const sys_days kMonday{year{2021} / 3 / 1};

FeatureRow row_with(const std::string& household, int week, std::optional<double> v) {
  FeatureRow r;
  r.household_id = household;
  r.week_start = kMonday + days{7 * week};
  r.raw.fill(v);
  return r;
}

// ---- weekly aggregation ----------------------------------------------------

TEST(WeeklyMeasures, AveragesPresentDaysOnly) {
  const auto rooms = LocationAlphabet::rooms();
  WindowMap windows;
  windows[{"h", kMonday, kMonday, DayPeriod::Daytime}].states = {0, 1};
  const sys_days w1 = kMonday + days{7};
  windows[{"h", w1, w1, DayPeriod::Daytime}].states = {0, 1};
  windows[{"h", w1, w1 + days{3}, DayPeriod::Daytime}].states = {2, 2, 2};
  windows[{"h", w1, w1 + days{3}, DayPeriod::Night}].states = {0, 1, 2, 3};

  BaselineMap baselines;
  baselines["h"].first_week = kMonday;
  baselines["h"].weeks = 2;
  PipelineOptions options;
  options.baseline_weeks = 1;
  std::vector<Diagnostic> diags;
  const auto rows = weekly_measures(windows, rooms, baselines, options, diags);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].week_start, w1);
  EXPECT_NEAR(*rows[0].raw[kShannonDay], std::log(2.0) / 2, 1e-15);
  EXPECT_EQ(rows[0].days_present[kShannonDay], 2);
  EXPECT_NEAR(*rows[0].raw_at(MeasureKind::ShannonNight), std::log(4.0), 1e-15);
  EXPECT_EQ(rows[0].days_present[static_cast<std::size_t>(MeasureKind::ShannonNight)], 1);
  // No transition matrix or model: those kinds are missing, not zero.
  EXPECT_FALSE(rows[0].raw_at(MeasureKind::EntropyRateDay));
  EXPECT_FALSE(rows[0].raw_at(MeasureKind::EpNight));

  options.include_baseline_weeks = true;
  EXPECT_EQ(weekly_measures(windows, rooms, baselines, options, diags).size(), 2u);
}

// ---- normalization -----------------------------------------------------------

TEST(Normalize, PopulationStandardDeviation) {
  std::vector<FeatureRow> rows{row_with("h", 0, 1.0), row_with("h", 1, 2.0), row_with("h", 2, 3.0)};
  std::vector<Diagnostic> diags;
  normalize(rows, diags);
  const double z = 1.0 / std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(z, 1.224745, 1e-6);
  EXPECT_NEAR(*rows[0].normalized[kShannonDay], -z, 1e-12);
  EXPECT_NEAR(*rows[1].normalized[kShannonDay], 0.0, 1e-12);
  EXPECT_NEAR(*rows[2].normalized[kShannonDay], z, 1e-12);
  EXPECT_TRUE(diags.empty());
}

TEST(Normalize, HouseholdsAreIndependent) {
  std::vector<FeatureRow> rows{row_with("a", 0, 1.0), row_with("b", 0, 100.0), row_with("a", 1, 3.0),
                               row_with("b", 1, 300.0)};
  std::vector<Diagnostic> diags;
  normalize(rows, diags);
  for (const auto& r : rows) EXPECT_NEAR(std::abs(*r.normalized[kShannonDay]), 1.0, 1e-12);
}

TEST(Normalize, ConstantAndShortSeriesAreMissing) {
  std::vector<FeatureRow> rows{row_with("c", 0, 2.0), row_with("c", 1, 2.0), row_with("s", 0, 5.0)};
  std::vector<Diagnostic> diags;
  normalize(rows, diags);
  for (const auto& r : rows) EXPECT_FALSE(r.normalized[kShannonDay]);
  bool constant = false, short_series = false;
  for (const auto& d : diags) {
    constant = constant || (d.household == "c" && d.reason == "constant series");
    short_series = short_series || (d.household == "s" && d.reason == "too few weeks");
  }
  EXPECT_TRUE(constant);
  EXPECT_TRUE(short_series);
}

TEST(Normalize, MissingWeeksAreSkipped) {
  std::vector<FeatureRow> rows{row_with("h", 0, 1.0), row_with("h", 1, std::nullopt), row_with("h", 2, 3.0)};
  std::vector<Diagnostic> diags;
  normalize(rows, diags);
  EXPECT_NEAR(*rows[0].normalized[kShannonDay], -1.0, 1e-12);
  EXPECT_FALSE(rows[1].normalized[kShannonDay]);
  EXPECT_NEAR(*rows[2].normalized[kShannonDay], 1.0, 1e-12);
}

TEST(Normalize, AffineInvarianceAndMonotonicity) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FeatureRow> rows;
    for (int w = 0; w < 12; ++w) rows.push_back(row_with("h", w, rng.uniform(-3.0, 3.0)));
    const double scale = rng.uniform(0.1, 10.0), shift = rng.uniform(-50.0, 50.0);
    auto scaled = rows;
    for (auto& r : scaled)
      for (auto& v : r.raw) v = scale * *v + shift;
    std::vector<Diagnostic> diags;
    normalize(rows, diags);
    normalize(scaled, diags);
    assign_bands(rows, BandMode::Gaussian);
    assign_bands(scaled, BandMode::Gaussian);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_NEAR(*rows[i].normalized[0], *scaled[i].normalized[0], 1e-9);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (*rows[i].raw[0] < *rows[j].raw[0]) EXPECT_LT(*rows[i].normalized[0], *rows[j].normalized[0]);
      }
    }
  }
}

// ---- banding -----------------------------------------------------------------

TEST(Discretize, BoundariesAreLeftClosed) {
  EXPECT_EQ(discretize(-0.6746), Band::VeryLow);
  EXPECT_EQ(discretize(-0.6745), Band::Low);
  EXPECT_EQ(discretize(-1e-300), Band::Low);
  EXPECT_EQ(discretize(0.0), Band::High);
  EXPECT_EQ(discretize(0.6744), Band::High);
  EXPECT_EQ(discretize(0.6745), Band::VeryHigh);
  EXPECT_THROW(discretize(std::nan("")), Error);
  EXPECT_THROW(discretize(INFINITY), Error);
}

TEST(Discretize, StandardNormalFillsQuartiles) {
  Rng rng(31);
  std::array<int, 4> freq{};
  const int draws = 200'000;
  for (int i = 0; i < draws; ++i) ++freq[static_cast<std::size_t>(discretize(rng.normal()))];
  for (int f : freq) EXPECT_NEAR(f / static_cast<double>(draws), 0.25, 0.01);
}

TEST(Discretize, BandNamesRoundTrip) {
  for (Band b : {Band::VeryLow, Band::Low, Band::High, Band::VeryHigh}) EXPECT_EQ(parse_band(to_string(b)), b);
  EXPECT_FALSE(parse_band("medium"));
}

TEST(AssignBands, QuartileModeSplitsEvenly) {
  std::vector<FeatureRow> rows;
  for (int w = 0; w < 8; ++w) rows.push_back(row_with("h", w, std::exp(w)));  // skewed
  std::vector<Diagnostic> diags;
  normalize(rows, diags);
  assign_bands(rows, BandMode::Quartile);
  std::array<int, 4> freq{};
  for (const auto& r : rows) ++freq[static_cast<std::size_t>(*r.band[0])];
  EXPECT_EQ(freq, (std::array<int, 4>{2, 2, 2, 2}));
  EXPECT_EQ(*rows[0].band[0], Band::VeryLow);
  EXPECT_EQ(*rows[7].band[0], Band::VeryHigh);
}

TEST(AssignBands, MissingStaysMissing) {
  std::vector<FeatureRow> rows{row_with("h", 0, std::nullopt)};
  assign_bands(rows, BandMode::Gaussian);
  EXPECT_FALSE(rows[0].band[0]);
}

// ---- end to end ------------------------------------------------------------

WindowMap synthetic_windows(std::size_t weeks, const std::string& household = "h1") {
  const LocationAlphabet abc({"A", "B", "C"});
  const auto day = TransitionMatrix::from_probabilities(abc, {{0, 0.7, 0.3}, {0.3, 0, 0.7}, {0.7, 0.3, 0}});
  const auto night = TransitionMatrix::from_probabilities(abc, {{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}});
  SyntheticHousehold spec;
  spec.household_id = household;
  spec.weeks = weeks;
  spec.events_per_period = 24;
  std::stringstream csv;
  write_synthetic_events(csv, spec, day, night);
  return slice_windows(parse_events(csv, abc).events);
}

PipelineOptions quick_options() {
  PipelineOptions options;
  options.train.hidden = {8};
  options.train.epochs = 2;
  return options;
}

TEST(ComputeFeatures, BaselineWeeksAreExcluded) {
  const auto result = compute_features(synthetic_windows(20), LocationAlphabet({"A", "B", "C"}), quick_options());
  ASSERT_EQ(result.rows.size(), 4u);
  EXPECT_EQ(result.rows[0].week_start, sys_days{year{2021} / 1 / 4} + days{7 * 16});
  for (const auto& row : result.rows) {
    for (MeasureKind k : kAllMeasures) {
      EXPECT_TRUE(row.raw_at(k)) << to_string(k);
      EXPECT_EQ(row.days_present[static_cast<std::size_t>(k)], 7);
    }
  }
}

TEST(ComputeFeatures, ShortHouseholdIsSkippedWithDiagnostic) {
  auto windows = synthetic_windows(20);
  windows.merge(synthetic_windows(10, "h2"));
  const auto result = compute_features(windows, LocationAlphabet({"A", "B", "C"}), quick_options());
  for (const auto& row : result.rows) EXPECT_EQ(row.household_id, "h1");
  bool reported = false;
  for (const auto& d : result.diagnostics) reported = reported || (d.household == "h2" && d.reason == "insufficient weeks");
  EXPECT_TRUE(reported);
}

TEST(ComputeFeatures, StationaryMarginalAndRefit) {
  const auto windows = synthetic_windows(18);
  auto options = quick_options();
  options.marginal = MarginalMode::Stationary;
  options.refit_transition = true;
  const auto result = compute_features(windows, LocationAlphabet({"A", "B", "C"}), options);
  ASSERT_EQ(result.rows.size(), 2u);
  // The night chain is doubly stochastic, so its stationary marginal is uniform.
  const double xi = *result.rows[0].raw_at(MeasureKind::EntropyRateNight);
  EXPECT_NEAR(xi, -(0.5 * std::log(0.5) + 0.5 * std::log(0.25)), 0.05);
}

}  // namespace
