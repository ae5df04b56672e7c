#include <gtest/gtest.h>

#include "summswap/report.hpp"

using namespace summswap;

namespace {

const std::string kUp = "\xE2\x86\x91", kDown = "\xE2\x86\x93", kDash = "\xE2\x80\x94";

TestResult result(const std::string& name, const std::string& tier) {
  TestResult r;
  r.feature_name = name;
  r.tier = tier;
  return r;
}

ReportTable sample_table() {
  return build_table({
      {"bart", "T\xE2\x86\x92" "B", {result("entity_mentions", kUp + kUp + kUp), result("length", kDash)}},
      {"bart", "B\xE2\x86\x92" "T", {result("entity_mentions", kDown), result("length", kDash)}},
      {"lead3", "T\xE2\x86\x92" "B", {result("entity_mentions", kDash), result("length", kUp + kUp + kUp + kUp)}},
  });
}

}  // namespace

TEST(Tier, ParseAndCodes) {
  EXPECT_EQ(parse_tier(kDash), TierCell{});
  EXPECT_EQ(parse_tier(kUp + kUp), (TierCell{Direction::Up, 2}));
  EXPECT_THROW(parse_tier(kUp + kDown), Error);
  EXPECT_THROW(parse_tier(kUp + kUp + kUp + kUp + kUp), Error);
  EXPECT_THROW(parse_tier("x"), Error);
  EXPECT_EQ(tier_code(kDown + kDown + kDown), "d3");
  EXPECT_EQ(tier_code(kDash), "ns");
  for (const auto& code : {"ns", "u1", "u4", "d2"}) EXPECT_EQ(tier_code(tier_from_code(code)), code);
  EXPECT_THROW(tier_from_code("u5"), Error);
}

TEST(BuildTable, OrderAndShape) {
  const auto t = sample_table();
  EXPECT_EQ(t.rows, (std::vector<std::string>{"entity_mentions", "length"}));
  ASSERT_EQ(t.columns.size(), 3u);
  EXPECT_EQ(t.columns[0].header(), "bart:T\xE2\x86\x92" "B");
  EXPECT_EQ(t.columns[2].model_id, "lead3");
  EXPECT_EQ(t.cells[1][2], kUp + kUp + kUp + kUp);
}

TEST(BuildTable, InconsistentFeatures) {
  EXPECT_THROW(build_table({{"m", "d1", {result("a", kDash)}}, {"m", "d2", {result("b", kDash)}}}), Error);
  EXPECT_THROW(build_table({{"m", "d1", {result("a", kDash), result("b", kDash)}}, {"m", "d2", {result("a", kDash)}}}),
               Error);
}

TEST(Csv, RoundTrip) {
  const auto t = sample_table();
  const auto csv = table_to_csv(t);
  EXPECT_EQ(csv.substr(0, 8), "feature,");
  EXPECT_NE(csv.find("entity_mentions,u3,d1,ns"), std::string::npos);
  EXPECT_EQ(parse_table_csv(csv), t);
  EXPECT_THROW(parse_table_csv(""), Error);
  EXPECT_THROW(parse_table_csv("row,m:d\nx,u1\n"), Error);
  EXPECT_THROW(parse_table_csv("feature,m:d\nx,u1,u2\n"), Error);
  EXPECT_THROW(parse_table_csv("feature,nocolon\n"), Error);
}

TEST(Drift, Classification) {
  EXPECT_EQ(classify_drift(kDash, kUp), DriftKind::IncreasedSignificance);
  EXPECT_EQ(classify_drift(kUp, kUp + kUp), DriftKind::IncreasedSignificance);
  EXPECT_EQ(classify_drift(kUp + kUp, kUp), DriftKind::None);
  EXPECT_EQ(classify_drift(kUp, kDown), DriftKind::DirectionChange);
  EXPECT_EQ(classify_drift(kUp, kDash), DriftKind::None);
  EXPECT_EQ(classify_drift(kDash, kDash), DriftKind::None);
}

TEST(Drift, SelfComparisonIsClean) {
  const auto t = sample_table();
  for (const auto& d : compare_tables(t, t)) EXPECT_EQ(d.kind, DriftKind::None);
  auto other = t;
  other.rows.pop_back();
  other.cells.pop_back();
  EXPECT_THROW(compare_tables(t, other), Error);
}

TEST(Markdown, GlyphsAndMarkers) {
  const auto base = sample_table();
  auto variant = base;
  variant.cells[0][1] = kUp;
  variant.cells[1][0] = kDown;
  const auto drift = compare_tables(base, variant);
  const auto md = render_markdown(variant, drift);
  EXPECT_NE(md.find("| feature | bart T\xE2\x86\x92" "B |"), std::string::npos);
  EXPECT_NE(md.find(kUp + " !"), std::string::npos);
  EXPECT_NE(md.find(kDown + " *"), std::string::npos);
  const auto csv = drift_to_csv(base, variant, drift);
  EXPECT_NE(csv.find("direction_change"), std::string::npos);
  EXPECT_NE(csv.find("increased_significance"), std::string::npos);
}

TEST(Csv, ResultsAndFightinWords) {
  TestResult r = result("phrase:administration", kUp + kUp + kUp);
  r.direction = Direction::Up;
  r.n = 40;
  r.t_stat = 5.5;
  r.p_value = 1e-6;
  EXPECT_EQ(results_to_csv({r}), "feature,direction,n,t,p,tier\nphrase:administration,up,40,5.5,1e-06,u3\n");
  EXPECT_EQ(fightin_words_to_csv({{"a,b", 1.5, 2, 0}}), "token,z,count_a,count_b\n\"a,b\",1.5,2,0\n");
  EXPECT_EQ(format_number(INFINITY), "inf");
}
