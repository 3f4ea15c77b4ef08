#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace screenseg;

namespace {

const LabeledRect G1{BlockClass::Text, Rect(0, 0, 100, 20)};
const LabeledRect G2{BlockClass::Text, Rect(0, 50, 100, 20)};

}  // namespace

TEST(Counts, Conventions) {
  EXPECT_DOUBLE_EQ((ClassCounts{0, 0, 0}).precision(), 1.0);
  EXPECT_DOUBLE_EQ((ClassCounts{0, 0, 0}).recall(), 1.0);
  EXPECT_DOUBLE_EQ((ClassCounts{0, 0, 3}).precision(), 0.0);
  EXPECT_DOUBLE_EQ((ClassCounts{0, 0, 3}).recall(), 0.0);
  EXPECT_DOUBLE_EQ((ClassCounts{0, 2, 0}).recall(), 0.0);
  EXPECT_DOUBLE_EQ((ClassCounts{0, 0, 3}).hmean(), 0.0);
}

TEST(Match, TwoOfThree) {
  const std::vector<ScoredBox> preds = {{BlockClass::Text, G1.rect, 0.9},
                                        {BlockClass::Text, G2.rect, 0.8},
                                        {BlockClass::Text, Rect(300, 300, 10, 10), 0.7}};
  const auto r = match_and_score(preds, {G1, G2});
  const auto& k = r.per_class.at(BlockClass::Text);
  EXPECT_NEAR(k.precision(), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(k.recall(), 1.0);
  EXPECT_NEAR(k.hmean(), 0.8, 1e-12);
}

TEST(Match, PerfectAndEmpty) {
  const auto r = match_and_score({{BlockClass::Text, G1.rect, 1}, {BlockClass::Text, G2.rect, 1}}, {G1, G2});
  for (const auto& [c, k] : r.per_class) {
    EXPECT_DOUBLE_EQ(k.precision(), 1.0);
    EXPECT_DOUBLE_EQ(k.recall(), 1.0);
  }
  EXPECT_DOUBLE_EQ(r.overall.hmean(), 1.0);
  const auto none = match_and_score({}, {G1});
  EXPECT_DOUBLE_EQ(none.overall.recall(), 0.0);
}

TEST(Match, ClassMustAgreeAndThresholdInclusive) {
  const auto wrong_cls = match_and_score({{BlockClass::Icon, G1.rect, 1}}, {G1});
  EXPECT_EQ(wrong_cls.overall.tp, 0u);
  EXPECT_EQ(wrong_cls.overall.fp, 1u);
  EXPECT_EQ(wrong_cls.overall.fn, 1u);
  // IoU exactly 0.75
  const auto edge = match_and_score({{BlockClass::Text, Rect(0, 0, 75, 20), 1}}, {G1});
  EXPECT_EQ(edge.overall.tp, 1u);
}

TEST(Match, OneGroundTruthMatchedOnce) {
  const auto r = match_and_score({{BlockClass::Text, G1.rect, 0.9}, {BlockClass::Text, G1.rect, 0.8}}, {G1});
  EXPECT_EQ(r.overall.tp, 1u);
  EXPECT_EQ(r.overall.fp, 1u);
}

TEST(AveragePrecision, HandComputed) {
  EXPECT_NEAR(*average_precision({{0.9, true}, {0.8, false}, {0.7, true}}, 2), 0.5 + 0.5 * (2.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(*average_precision({{0.9, true}, {0.8, true}}, 2), 1.0);
  EXPECT_DOUBLE_EQ(*average_precision({{0.9, false}}, 1), 0.0);
  EXPECT_FALSE(average_precision({{0.9, false}}, 0).has_value());
  // ranking is by score, not input order
  EXPECT_NEAR(*average_precision({{0.7, true}, {0.8, false}, {0.9, true}}, 2), 0.8333333333333, 1e-9);
}

TEST(AveragePrecision, BoundedAndMonotoneInRecall) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> s(0, 1);
  std::bernoulli_distribution hit(0.5);
  for (int i = 0; i < 500; ++i) {
    std::vector<RankedHit> hits;
    std::size_t tp = 0;
    for (int k = 0; k < 20; ++k) {
      hits.push_back({s(rng), hit(rng)});
      tp += hits.back().tp;
    }
    const auto ap = *average_precision(hits, tp + 3);
    ASSERT_GE(ap, 0.0);
    ASSERT_LE(ap, 1.0);
    const auto ap_all = *average_precision(hits, std::max<std::size_t>(tp, 1));
    ASSERT_GE(ap_all + 1e-12, ap);
  }
}

TEST(Evaluator, ReportListsDetectorClassesAndFormats) {
  Evaluator ev(0.75);
  ev.add({{BlockClass::Text, G1.rect, 0.9}}, {G1});
  const auto r = ev.report();
  EXPECT_EQ(r.per_class.size(), 3u);
  EXPECT_TRUE(r.ap.count(BlockClass::Text));
  EXPECT_FALSE(r.ap.count(BlockClass::Image));
  ASSERT_TRUE(r.map.has_value());
  EXPECT_DOUBLE_EQ(*r.map, 1.0);
  const auto text = format_report(r);
  EXPECT_NE(text.find("IoU >= 0.750"), std::string::npos);
  EXPECT_NE(text.find("overall"), std::string::npos);
  const auto j = report_to_json(r);
  EXPECT_EQ(j["classes"]["text"]["tp"], 1);
  EXPECT_TRUE(j["classes"]["image"]["ap"].is_null());
}
