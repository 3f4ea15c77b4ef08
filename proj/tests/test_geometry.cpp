#include <gtest/gtest.h>

#include <random>

#include "screenseg/geometry.hpp"
#include "screenseg/rng.hpp"

using namespace screenseg;

TEST(Rect, RejectsDegenerate) {
  EXPECT_THROW(Rect(0, 0, 0, 5), std::invalid_argument);
  EXPECT_THROW(Rect(0, 0, 5, -1), std::invalid_argument);
  EXPECT_THROW(Rect(std::nan(""), 0, 5, 5), std::invalid_argument);
  EXPECT_NO_THROW(Rect(-3, -3, 1, 1));
}

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou(Rect(0, 0, 10, 10), Rect(0, 0, 10, 10)), 1.0);
  EXPECT_DOUBLE_EQ(iou(Rect(0, 0, 10, 10), Rect(20, 20, 5, 5)), 0.0);
  EXPECT_NEAR(iou(Rect(0, 0, 10, 10), Rect(5, 0, 10, 10)), 50.0 / 150.0, 1e-12);
  // touching edges share no area
  EXPECT_DOUBLE_EQ(iou(Rect(0, 0, 10, 10), Rect(10, 0, 10, 10)), 0.0);
  EXPECT_FALSE(intersects(Rect(0, 0, 10, 10), Rect(10, 0, 10, 10)));
}

TEST(UnionRect, Examples) {
  EXPECT_EQ(union_rect(Rect(0, 0, 10, 10), Rect(5, 5, 10, 10)), Rect(0, 0, 15, 15));
  EXPECT_EQ(union_rect(Rect(0, 0, 2, 2), Rect(8, 0, 2, 2)), Rect(0, 0, 10, 2));
  EXPECT_EQ(union_rect(Rect(1, 2, 3, 4), Rect(1, 2, 3, 4)), Rect(1, 2, 3, 4));
}

TEST(ContainsFrac, Examples) {
  EXPECT_DOUBLE_EQ(contains_frac(Rect(5, 0, 10, 10), Rect(0, 0, 10, 10)), 0.5);
  EXPECT_DOUBLE_EQ(contains_frac(Rect(0, 0, 100, 100), Rect(10, 10, 5, 5)), 1.0);
  EXPECT_DOUBLE_EQ(contains_frac(Rect(0, 0, 10, 10), Rect(50, 50, 5, 5)), 0.0);
}

TEST(ClipTo, InsideOutsidePartial) {
  EXPECT_EQ(*clip_to(Rect(-5, -5, 10, 10), 100, 100), Rect(0, 0, 5, 5));
  EXPECT_FALSE(clip_to(Rect(200, 0, 10, 10), 100, 100).has_value());
  EXPECT_EQ(*clip_to(Rect(1, 1, 2, 2), 100, 100), Rect(1, 1, 2, 2));
}

TEST(ToPixels, RoundsHalfUpAndClamps) {
  const auto s = to_pixels(Rect(0.5, 1.49, 2.0, 200), 10, 10);
  EXPECT_EQ(s.x0, 1);
  EXPECT_EQ(s.y0, 1);
  EXPECT_EQ(s.x1, 3);
  EXPECT_EQ(s.y1, 10);
}

TEST(GeometryProperties, RandomPairs) {
  auto rng = make_rng(11, "geometry");
  std::uniform_real_distribution<double> pos(-50, 50), size(0.5, 60);
  for (int i = 0; i < 2000; ++i) {
    const Rect a(pos(rng), pos(rng), size(rng), size(rng));
    const Rect b(pos(rng), pos(rng), size(rng), size(rng));
    const double v = iou(a, b);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    ASSERT_DOUBLE_EQ(v, iou(b, a));
    const Rect u = union_rect(a, b);
    ASSERT_NEAR(contains_frac(u, a), 1.0, 1e-12);
    ASSERT_NEAR(contains_frac(u, b), 1.0, 1e-12);
    ASSERT_LE(v, std::min(contains_frac(a, b), contains_frac(b, a)) + 1e-12);
  }
}

TEST(Rng, DerivedStreamsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
  auto r1 = make_rng(5, "x", 3), r2 = make_rng(5, "x", 3);
  EXPECT_EQ(r1(), r2());
}
