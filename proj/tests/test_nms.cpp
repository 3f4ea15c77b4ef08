#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace screenseg;

namespace {

const Proposal A{Rect::from_center(100, 100, 40, 20), BlockClass::Image, 0.9};
const Proposal B{Rect::from_center(104, 102, 44, 22), BlockClass::Image, 0.3};

std::vector<Proposal> random_set(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(0, 200), size(5, 60), score(0.01, 1.0);
  std::uniform_int_distribution<int> cls(0, 2);
  std::vector<Proposal> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({Rect(pos(rng), pos(rng), size(rng), size(rng)), static_cast<BlockClass>(cls(rng)), score(rng)});
  }
  return out;
}

}  // namespace

TEST(WeightedNms, WorkedExample) {
  EXPECT_NEAR(iou(A.rect, B.rect), 0.69, 0.01);
  const auto out = weighted_nms({A, B}, 0.2);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out[0].rect.cx(), 101.0, 1e-12);
  EXPECT_NEAR(out[0].rect.cy(), 100.5, 1e-12);
  EXPECT_NEAR(out[0].rect.w(), 41.0, 1e-12);
  EXPECT_NEAR(out[0].rect.h(), 20.5, 1e-12);
  EXPECT_DOUBLE_EQ(out[0].score, 0.9);
}

TEST(WeightedNms, TrivialCases) {
  EXPECT_TRUE(weighted_nms({}, 0.2).empty());
  const auto one = weighted_nms({A}, 0.2);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0].rect.x(), A.rect.x(), 1e-12);
  EXPECT_NEAR(one[0].rect.w(), A.rect.w(), 1e-12);
  // IoU 0.1 apart: separate clusters, unchanged
  const Proposal c{Rect(0, 0, 10, 10), BlockClass::Text, 0.8};
  const Proposal d{Rect(0, 0, 10, 10 * 0.1), BlockClass::Text, 0.7};
  ASSERT_NEAR(iou(c.rect, d.rect), 0.1, 1e-12);
  EXPECT_EQ(weighted_nms({c, d}, 0.2).size(), 2u);
  // different classes never fuse
  Proposal b2 = B;
  b2.cls = BlockClass::Icon;
  EXPECT_EQ(weighted_nms({A, b2}, 0.2).size(), 2u);
  Proposal zero = A;
  zero.score = 0;
  EXPECT_THROW(weighted_nms({zero}, 0.2), InputError);
}

TEST(WeightedNms, ClusterCountMatchesUnionFindOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> n(0, 50);
  for (int i = 0; i < 1000; ++i) {
    const auto ps = random_set(rng, n(rng));
    ASSERT_EQ(weighted_nms(ps, 0.2).size(), oracle::cluster_count(ps, 0.2)) << "set " << i;
  }
}

TEST(WeightedNms, PermutationInvariant) {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 50; ++i) {
    auto ps = random_set(rng, 30);
    const auto a = weighted_nms(ps, 0.2);
    std::shuffle(ps.begin(), ps.end(), rng);
    const auto b = weighted_nms(ps, 0.2);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      ASSERT_EQ(a[k].cls, b[k].cls);
      ASSERT_NEAR(a[k].rect.cx(), b[k].rect.cx(), 1e-9);
      ASSERT_NEAR(a[k].rect.w(), b[k].rect.w(), 1e-9);
    }
  }
}

TEST(GreedyNms, Examples) {
  const auto out = greedy_nms({B, A}, 0.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], A);
  const Proposal far{Rect(500, 500, 10, 10), BlockClass::Image, 0.2};
  EXPECT_EQ(greedy_nms({A, far}, 0.5).size(), 2u);
  EXPECT_EQ(greedy_nms({A, B}, 1.0).size(), 2u);
  EXPECT_EQ(greedy_nms({A, A}, 1.0).size(), 1u);
}

TEST(SoftNms, Examples) {
  const double o = iou(A.rect, B.rect);
  const auto out = soft_nms({A, B}, 0.001);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].score, 0.9);
  EXPECT_NEAR(out[1].score, 0.3 * (1 - o), 1e-12);
  EXPECT_NEAR(out[1].score, 0.093, 0.002);
  const Proposal far{Rect(500, 500, 10, 10), BlockClass::Image, 0.2};
  const auto apart = soft_nms({A, far}, 0.001);
  EXPECT_DOUBLE_EQ(apart[1].score, 0.2);
  EXPECT_EQ(soft_nms({A, B, A}, 0.0).size(), 3u);
  EXPECT_EQ(soft_nms({A, B}, 0.1).size(), 1u);
}

TEST(NmsProperties, OutputsNoLargerAndScoresBounded) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const auto ps = random_set(rng, 40);
    for (const auto& out : {weighted_nms(ps, 0.2), greedy_nms(ps, 0.5), soft_nms(ps, 0.001)}) {
      ASSERT_LE(out.size(), ps.size());
      for (const auto& p : out) {
        ASSERT_GT(p.score, 0.0);
        ASSERT_LE(p.score, 1.0);
      }
    }
    // greedy keeps no same-class pair at or above its threshold
    const auto g = greedy_nms(ps, 0.5);
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b)
        if (g[a].cls == g[b].cls) { ASSERT_LT(iou(g[a].rect, g[b].rect), 0.5); }
  }
}
