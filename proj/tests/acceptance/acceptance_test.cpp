// Acceptance battery. Each criterion is one test; every oracle below is
// computed here from first principles rather than taken from the library.
// Prints one PASS/FAIL line per criterion after the gtest output.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "entropykit/entropykit.hpp"

namespace {

using namespace entropykit;
using namespace std::chrono;

TransitionMatrix chain(const LocationAlphabet& alphabet, std::vector<std::vector<double>> rows) {
  return TransitionMatrix::from_probabilities(alphabet, std::move(rows));
}

const LocationAlphabet kAB({"A", "B"});
const LocationAlphabet kABC({"A", "B", "C"});

double trained_then_evaluated(const TransitionMatrix& T, std::uint64_t seed) {
  const std::size_t n = T.size();
  const ProbabilityDistribution start{std::vector<double>(n, 1.0 / static_cast<double>(n)), 1};
  const Trajectory training = simulate_trajectory(T, start, 100'001, seed);
  const Trajectory evaluation = simulate_trajectory(T, start, 100'001, seed + 1000);
  const TrainResult r = train(std::span<const Trajectory>(&training, 1), T.alphabet(), TrainConfig{});
  return ep_rate(r.model, evaluation);
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "entropykit-acceptance";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_corpus(const std::filesystem::path& path, std::size_t weeks, std::uint64_t seed) {
  const auto day = chain(kABC, {{0.1, 0.6, 0.3}, {0.3, 0.1, 0.6}, {0.6, 0.3, 0.1}});
  const auto night = chain(kABC, {{0.8, 0.1, 0.1}, {0.2, 0.6, 0.2}, {0.1, 0.1, 0.8}});
  SyntheticHousehold spec;
  spec.weeks = weeks;
  spec.events_per_period = 24;
  spec.seed = seed;
  std::ofstream out(path, std::ios::binary);
  write_synthetic_events(out, spec, day, night);
}

RunConfig corpus_config(const std::filesystem::path& input) {
  RunConfig c;
  c.inputs = {input.string()};
  c.alphabet = kABC.symbols();
  c.pipeline.train.epochs = 10;
  c.pipeline.train.seed = 42;
  return c;
}

// ---- 1 ---------------------------------------------------------------------

TEST(Acceptance, C01_ShannonExactness) {
  double uniform = 0.0;
  for (int i = 0; i < 5; ++i) uniform -= 0.2 * std::log(0.2);
  EXPECT_NEAR(shannon_entropy(std::vector<double>(5, 0.2)), uniform, 1e-12);
  EXPECT_NEAR(uniform, std::log(5.0), 1e-12);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0, 0, 1, 0, 0}), 0.0, 1e-12);
  const double mixed = -(0.25 * std::log(0.25) + 0.25 * std::log(0.25) + 0.5 * std::log(0.5));
  EXPECT_NEAR(mixed, 1.0397208, 1e-6);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0.25, 0.25, 0.5}), 1.0397208, 1e-6);
}

// ---- 2 ---------------------------------------------------------------------

TEST(Acceptance, C02_EntropyRateOracle) {
  const auto T = chain(kAB, {{0.9, 0.1}, {0.2, 0.8}});
  // Stationary by hand: pi_A * 0.1 = pi_B * 0.2.
  const double pa = 0.2 / 0.3, pb = 0.1 / 0.3;
  const double hand = -pa * (0.9 * std::log(0.9) + 0.1 * std::log(0.1)) - pb * (0.2 * std::log(0.2) + 0.8 * std::log(0.8));
  EXPECT_NEAR(hand, 0.383523, 1e-6);

  const auto st = stationary_distribution(T);
  EXPECT_FALSE(st.flagged());
  const double analytic = entropy_rate(T, st.distribution);
  EXPECT_NEAR(analytic, hand, 1e-6);

  const Trajectory sim = simulate_trajectory(T, st.distribution, 100'000, 7);
  const double estimated = entropy_rate(fit_transition_matrix(sim, kAB), estimate_distribution(sim, kAB));
  EXPECT_NEAR(estimated, analytic, 0.01);
}

// ---- 3 ---------------------------------------------------------------------

TEST(Acceptance, C03_EpNonequilibriumRing) {
  const auto T = chain(kABC, {{0, 0.7, 0.3}, {0.3, 0, 0.7}, {0.7, 0.3, 0}});
  // Uniform stationary distribution; each of the three edges carries net
  // flux (0.7 - 0.3)/3 with log ratio ln(7/3).
  const double sigma = 3 * ((0.7 - 0.3) / 3.0) * std::log(0.7 / 0.3);
  EXPECT_NEAR(analytic_ep_rate(T), sigma, 1e-12);
  const double estimate = trained_then_evaluated(T, 1);
  std::printf("  ring: ep_rate=%.6f sigma=%.6f rel_err=%.4f\n", estimate, sigma, std::abs(estimate - sigma) / sigma);
  EXPECT_LT(std::abs(estimate - sigma) / sigma, 0.10);
}

// ---- 4 ---------------------------------------------------------------------

TEST(Acceptance, C04_EpEquilibrium) {
  const auto T = chain(kAB, {{0.5, 0.5}, {0.5, 0.5}});
  const double estimate = trained_then_evaluated(T, 2);
  std::printf("  symmetric: ep_rate=%.6f\n", estimate);
  EXPECT_LT(std::abs(estimate), 0.05);
}

// ---- 5 ---------------------------------------------------------------------

TEST(Acceptance, C05_Antisymmetry) {
  const auto rooms = LocationAlphabet::rooms();
  Rng rng(5);
  std::size_t violations = 0;
  for (int draw = 0; draw < 10'000; ++draw) {
    Rng init(rng.next());
    const auto m = NeepModel::initialize(rooms, 2 + rng.below(4), {4 + rng.below(8)}, init, false);
    const State a = rng.below(5), b = rng.below(5);
    if (m.delta_s(a, b) + m.delta_s(b, a) != 0.0) ++violations;
  }
  EXPECT_EQ(violations, 0u);

  Rng init(55);
  const auto model = NeepModel::initialize(rooms, 8, {64, 64}, init, false);
  for (int trial = 0; trial < 10; ++trial) {
    Trajectory forward;
    for (int k = 0; k < 1000; ++k) forward.states.push_back(rng.below(5));
    const Trajectory backward{{forward.states.rbegin(), forward.states.rend()}};
    EXPECT_EQ(ep_rate(model, backward), -ep_rate(model, forward));
  }
}

// ---- 6 ---------------------------------------------------------------------

TEST(Acceptance, C06_GradientCheck) {
  const auto rooms = LocationAlphabet::rooms();
  const TrainConfig defaults;
  for (std::uint64_t seed : {6, 66}) {
    Rng rng(seed);
    const auto m = NeepModel::initialize(rooms, defaults.embedding_width, defaults.hidden, rng, false);
    std::vector<Transition> batch;
    for (std::size_t k = 0; k < defaults.batch_size; ++k) batch.push_back({rng.below(5), rng.below(5)});
    const double err = gradient_check(m, batch, 1e-5, seed, 150);
    std::printf("  seed %llu: max_rel_err=%.3g\n", static_cast<unsigned long long>(seed), err);
    EXPECT_LT(err, 1e-4);
  }
}

// ---- 7 ---------------------------------------------------------------------

TEST(Acceptance, C07_PipelineStatistics) {
  Rng rng(7);
  std::vector<FeatureRow> rows;
  for (const std::string h : {"a", "b", "c"}) {
    for (int w = 0; w < 30; ++w) {
      FeatureRow r;
      r.household_id = h;
      r.week_start = sys_days{days{7 * w}};
      for (auto& v : r.raw) v = std::exp(rng.normal()) * (h == "b" ? 100.0 : 1.0);
      rows.push_back(r);
    }
  }
  std::vector<Diagnostic> diags;
  normalize(rows, diags);
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> series;
  for (const auto& r : rows)
    for (std::size_t k = 0; k < kMeasureCount; ++k) series[{r.household_id, k}].push_back(*r.normalized[k]);
  for (const auto& [key, zs] : series) {
    double mean = 0.0, var = 0.0;
    for (double z : zs) mean += z;
    mean /= static_cast<double>(zs.size());
    for (double z : zs) var += (z - mean) * (z - mean);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(var / static_cast<double>(zs.size())), 1.0, 1e-9);
  }

  std::array<int, 4> freq{};
  for (int i = 0; i < 100'000; ++i) ++freq[static_cast<std::size_t>(discretize(rng.normal()))];
  for (int f : freq) EXPECT_NEAR(f / 100'000.0, 0.25, 0.01);

  auto rescaled = rows;
  for (auto& r : rescaled)
    for (auto& v : r.raw) v = 0.37 * *v + 12.5;
  normalize(rescaled, diags);
  assign_bands(rows, BandMode::Gaussian);
  assign_bands(rescaled, BandMode::Gaussian);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].band, rescaled[i].band);
}

// ---- 8 ---------------------------------------------------------------------

TEST(Acceptance, C08_WindowingPartition) {
  auto at = [](int h, int m, int s) { return local_days{year{2021} / 3 / 1} + hours{h} + minutes{m} + seconds{s}; };
  EXPECT_EQ(period_of(at(5, 59, 59)), DayPeriod::Night);
  EXPECT_EQ(period_of(at(6, 0, 0)), DayPeriod::Daytime);
  EXPECT_EQ(period_of(at(17, 59, 59)), DayPeriod::Daytime);
  EXPECT_EQ(period_of(at(18, 0, 0)), DayPeriod::Night);
  EXPECT_EQ(period_of(at(0, 0, 0)), DayPeriod::Night);

  const auto rooms = LocationAlphabet::rooms();
  std::vector<std::string> corpora{
      "household_id,timestamp,location\n"
      "h1,2021-03-01T05:59:59,kitchen\n"
      "h1,2021-03-01T06:00:00,kitchen\n"
      "h1,2021-03-01T17:59:59,lounge\n"
      "h1,2021-03-01T18:00:00,bedroom\n"
      "h1,2021-03-02T00:00:00,bedroom\n"
      "h2,2021-03-08T07:00:00,garage\n"};
  Rng rng(8);
  for (int c = 0; c < 25; ++c) {
    std::ostringstream body;
    body << "household_id,timestamp,location\n";
    for (int i = 0; i < 500; ++i) {
      const auto t = local_days{year{2021} / 1 / 1} + seconds{static_cast<long>(rng.below(90L * 86400))};
      body << "h" << rng.below(4) << ',' << format_civil(t) << ',' << (rng.below(20) == 0 ? "attic" : rooms.symbol(rng.below(5)))
           << '\n';
    }
    corpora.push_back(body.str());
  }
  for (const auto& text : corpora) {
    std::istringstream in(text);
    const auto parsed = parse_events(in, rooms);
    std::size_t total = 0;
    for (const auto& [key, t] : slice_windows(parsed.events)) {
      total += t.size();
    }
    EXPECT_EQ(total, parsed.events.size());
  }

  // Each accepted event of the hand corpus lands in the expected window.
  std::istringstream in(corpora[0]);
  const auto windows = slice_windows(parse_events(in, rooms).events);
  const sys_days mon{year{2021} / 3 / 1};
  auto size_of = [&](sys_days day, DayPeriod p) {
    const auto it = windows.find({"h1", mon, day, p});
    return it == windows.end() ? std::size_t{0} : it->second.size();
  };
  EXPECT_EQ(size_of(mon, DayPeriod::Night), 2u);    // 05:59:59 and 18:00:00
  EXPECT_EQ(size_of(mon, DayPeriod::Daytime), 2u);  // 06:00:00 and 17:59:59
  EXPECT_EQ(size_of(mon + days{1}, DayPeriod::Night), 1u);
}

// ---- 9 ---------------------------------------------------------------------

TEST(Acceptance, C09_EndToEndDeterminism) {
  const auto path = scratch_dir() / "determinism.csv";
  write_corpus(path, 20, 9);
  const auto config = corpus_config(path);
  std::ostringstream first, second, d1, d2;
  ASSERT_EQ(run_features(config, first, d1), kExitOk) << d1.str();
  ASSERT_EQ(run_features(config, second, d2), kExitOk) << d2.str();
  EXPECT_FALSE(first.str().empty());
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(d1.str(), d2.str());
}

// ---- 10 --------------------------------------------------------------------

TEST(Acceptance, C10_BaselineProtocol) {
  const auto path = scratch_dir() / "baseline.csv";
  write_corpus(path, 20, 10);
  auto config = corpus_config(path);
  config.pipeline.baseline_weeks = 16;
  std::ostringstream out, diag;
  ASSERT_EQ(run_features(config, out, diag), kExitOk) << diag.str();
  std::istringstream in(out.str());
  const auto table = parse_feature_table(in, TableFormat::Csv);
  ASSERT_EQ(table.rows.size(), 4u);
  const sys_days first{year{2021} / 1 / 4};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(table.rows[i].week_start, first + days{7 * (16 + static_cast<long>(i))});
}

// One line per criterion, in order, after the normal gtest report.
class CriterionReport : public testing::EmptyTestEventListener {
 public:
  void OnTestEnd(const testing::TestInfo& info) override {
    lines_.push_back(std::string(info.result()->Passed() ? "PASS " : "FAIL ") + info.name() + " (" +
                     std::to_string(info.result()->elapsed_time()) + " ms)");
  }
  void OnTestProgramEnd(const testing::UnitTest&) override {
    std::printf("\nacceptance criteria:\n");
    for (const auto& l : lines_) std::printf("%s\n", l.c_str());
  }

 private:
  std::vector<std::string> lines_;
};

}  // namespace

int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  testing::UnitTest::GetInstance()->listeners().Append(new CriterionReport);
  return RUN_ALL_TESTS();
}
