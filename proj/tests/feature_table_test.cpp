#include <gtest/gtest.h>

#include <sstream>

#include "entropykit/feature_table.hpp"

namespace {

using namespace entropykit;
using namespace std::chrono;

const sys_days kMonday{year{2021} / 3 / 1};

std::vector<FeatureRow> sample_rows() {
  Rng rng(14);
  std::vector<FeatureRow> rows;
  for (const std::string h : {"h1", "h,2"}) {
    for (int w = 0; w < 3; ++w) {
      FeatureRow r;
      r.household_id = h;
      r.week_start = kMonday + days{7 * w};
      for (std::size_t k = 0; k < kMeasureCount; ++k) {
        if (w == 1 && k == 4) continue;  // one missing measure
        r.raw[k] = rng.uniform(0.0, 2.0) / 3.0;
        r.normalized[k] = rng.normal();
        r.band[k] = discretize(*r.normalized[k]);
        r.days_present[k] = 1 + static_cast<int>(rng.below(7));
      }
      rows.push_back(std::move(r));
    }
  }
  rows[0].labels = {"fall", "hospital visit"};
  return rows;
}

void expect_same(const std::vector<FeatureRow>& a, const std::vector<FeatureRow>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].household_id, b[i].household_id);
    EXPECT_EQ(a[i].week_start, b[i].week_start);
    EXPECT_EQ(a[i].labels, b[i].labels);
    EXPECT_EQ(a[i].band, b[i].band);
    EXPECT_EQ(a[i].days_present, b[i].days_present);
    for (std::size_t k = 0; k < kMeasureCount; ++k) {
      ASSERT_EQ(a[i].raw[k].has_value(), b[i].raw[k].has_value());
      ASSERT_EQ(a[i].normalized[k].has_value(), b[i].normalized[k].has_value());
      if (a[i].raw[k]) EXPECT_NEAR(*a[i].raw[k], *b[i].raw[k], 1e-12);
      if (a[i].normalized[k]) EXPECT_NEAR(*a[i].normalized[k], *b[i].normalized[k], 1e-12);
    }
  }
}

TEST(FeatureTable, CsvRoundTrip) {
  const auto rows = sample_rows();
  std::stringstream out;
  emit_feature_table(out, rows, TableFormat::Csv, {{"tool", "entropykit"}, {"seed", 3}});
  const auto table = parse_feature_table(out, TableFormat::Csv);
  EXPECT_EQ(table.metadata.at("seed"), 3);
  expect_same(rows, table.rows);
}

TEST(FeatureTable, JsonlRoundTrip) {
  const auto rows = sample_rows();
  std::stringstream out;
  emit_feature_table(out, rows, TableFormat::Jsonl, {{"tool", "entropykit"}});
  std::string first;
  std::getline(out, first);
  EXPECT_EQ(nlohmann::json::parse(first).at("meta").at("tool"), "entropykit");
  out.seekg(0);
  expect_same(rows, parse_feature_table(out, TableFormat::Jsonl).rows);
}

TEST(FeatureTable, CsvLayout) {
  std::stringstream out;
  emit_feature_table(out, sample_rows(), TableFormat::Csv, {});
  std::string line;
  std::getline(out, line);
  EXPECT_EQ(line.rfind("# ", 0), 0u);
  std::getline(out, line);
  EXPECT_EQ(line.rfind("household_id,week_start,shannon_day_raw,shannon_day_z,shannon_day_band,shannon_day_days,", 0), 0u);
  EXPECT_EQ(feature_columns().size(), 2 + 4 * kMeasureCount + 1);
  std::getline(out, line);
  EXPECT_NE(line.find("2021-03-01"), std::string::npos);
  EXPECT_NE(line.find("fall;hospital visit"), std::string::npos);
}

TEST(FeatureTable, RejectsGarbage) {
  std::stringstream bad("# {}\n" + [] {
    std::string h;
    for (const auto& c : feature_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
  }() + "\nh1,2021-03-01,notanumber\n");
  EXPECT_THROW(parse_feature_table(bad, TableFormat::Csv), Error);
}

TEST(Labels, ParseAndJoinByIsoWeek) {
  std::istringstream in(
      "household_id,date,label\n"
      "h1,2021-03-03,fall\n"
      "h1,2021-03-14,er visit\n"  // Sunday: week of 2021-03-08
      "ghost,2021-03-03,fall\n"
      "h1,2021-06-01,late\n"
      "h1,2021-13-01,bad\n");
  std::vector<Diagnostic> diags;
  const auto labels = parse_labels(in, diags);
  ASSERT_EQ(labels.size(), 4u);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].reason, "bad date");

  std::vector<FeatureRow> rows(2);
  rows[0].household_id = rows[1].household_id = "h1";
  rows[0].week_start = kMonday;
  rows[1].week_start = kMonday + days{7};
  join_labels(rows, labels, diags);
  EXPECT_EQ(rows[0].labels, std::vector<std::string>{"fall"});
  EXPECT_EQ(rows[1].labels, std::vector<std::string>{"er visit"});
  ASSERT_EQ(diags.size(), 3u);
  EXPECT_EQ(diags[1].reason, "unknown household");
  EXPECT_EQ(diags[2].reason, "no feature row for week");
}

TEST(Labels, AliasesAndMissingColumns) {
  std::istringstream aliased("event,week_start,household_id\nfall,2021-03-01,h1\n");
  std::vector<Diagnostic> diags;
  EXPECT_EQ(parse_labels(aliased, diags).at(0).name, "fall");
  std::istringstream missing("household_id,date\nh1,2021-03-01\n");
  EXPECT_THROW(parse_labels(missing, diags), Error);
}

}  // namespace
