#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"

using namespace screenseg;

namespace {

GrayImage step_image(int w, int h, int col) {
  GrayImage g(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = col; x < w; ++x) g.at(x, y) = 255;
  return g;
}

}  // namespace

TEST(Luma, Examples) {
  EXPECT_EQ(luma(Rgb{255, 255, 255}), 255);
  EXPECT_EQ(luma(Rgb{0, 0, 0}), 0);
  EXPECT_EQ(luma(Rgb{0, 0, 255}), 29);
}

TEST(Otsu, TwoLevelImage) {
  GrayImage g(10, 4, 0);
  for (int y = 0; y < 4; ++y)
    for (int x = 5; x < 10; ++x) g.at(x, y) = 255;
  const auto m = otsu_binarize(g);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 10; ++x) EXPECT_EQ(m.get(x, y), x >= 5);
}

TEST(Otsu, BimodalMatchesExhaustive) {
  Histogram h{};
  h[50] = 300;
  h[200] = 100;
  const int t = otsu_threshold(h);
  EXPECT_EQ(t, oracle::otsu_exhaustive(h));
  EXPECT_GE(t, 50);
  EXPECT_LT(t, 200);
}

TEST(Otsu, ConstantImageGivesEmptyMask) {
  GrayImage g(6, 6, 77);
  EXPECT_EQ(otsu_threshold(g), 77);
  EXPECT_EQ(otsu_binarize(g).count(), 0u);
  EXPECT_EQ(otsu_binarize(g, true).count(), 36u);
}

TEST(Otsu, RandomHistogramsMatchExhaustive) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> bins(1, 12), val(0, 255), cnt(1, 500);
  for (int i = 0; i < 200; ++i) {
    Histogram h{};
    const int n = bins(rng);
    for (int k = 0; k < n; ++k) h[val(rng)] += cnt(rng);
    int occupied = 0;
    for (auto c : h) occupied += c > 0;
    if (occupied < 2) continue;
    ASSERT_EQ(otsu_threshold(h), oracle::otsu_exhaustive(h)) << "histogram " << i;
  }
}

TEST(MedianBlur, ImpulseRemoved) {
  GrayImage g(7, 7, 0);
  g.at(3, 3) = 255;
  EXPECT_EQ(median_blur(g, 3).at(3, 3), 0);
}

TEST(MedianBlur, WindowOneToNine) {
  GrayImage g(3, 3);
  for (int i = 0; i < 9; ++i) g.data[i] = static_cast<std::uint8_t>(i + 1);
  EXPECT_EQ(median_blur(g, 3).at(1, 1), 5);
}

TEST(MedianBlur, MatchesSortedOracle) {
  std::mt19937_64 rng(5);
  for (int k : {3, 5, 7}) {
    const auto g = oracle::random_gray(rng, 23, 17);
    const auto m = median_blur(g, k);
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x) ASSERT_EQ(m.at(x, y), oracle::median_sorted(g, x, y, k));
  }
  EXPECT_THROW(median_blur(GrayImage(4, 4), 4), std::invalid_argument);
}

TEST(Clahe, ConstantStaysConstant) {
  GrayImage g(40, 30, 90);
  const auto out = clahe(g, 2.0, 8);
  for (auto v : out.data) ASSERT_EQ(v, out.data.front());
}

TEST(Clahe, SingleTileIsClippedCdf) {
  std::mt19937_64 rng(8);
  const auto g = oracle::random_gray(rng, 16, 16);
  const double clip = 2.0;
  // direct construction
  std::array<double, 256> h{};
  for (auto v : g.data) h[v] += 1;
  const double limit = clip * 256 / 256.0;
  double excess = 0;
  for (auto& c : h) {
    excess += std::max(0.0, c - limit);
    c = std::min(c, limit);
  }
  std::array<double, 256> cdf{};
  double acc = 0;
  for (int v = 0; v < 256; ++v) {
    acc += h[v] + excess / 256.0;
    cdf[v] = acc * 255.0 / 256.0;
  }
  const auto out = clahe(g, clip, 16);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    ASSERT_NEAR(out.data[i], cdf[g.data[i]], 0.5 + 1e-3);
  }
  for (std::size_t i = 0; i < g.data.size(); ++i)
    for (std::size_t j = 0; j < g.data.size(); ++j)
      if (g.data[i] <= g.data[j]) { ASSERT_LE(out.data[i], out.data[j]); }
}

TEST(Clahe, TileMappingMonotone) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto g = oracle::random_gray(rng, 8, 8);
    const auto lut = clahe_tile_mapping(histogram(g), 1.5);
    for (int v = 1; v < 256; ++v) ASSERT_LE(lut[v - 1], lut[v]);
  }
}

TEST(Laplacian, Examples) {
  for (auto v : laplacian(GrayImage(5, 5, 40)).data) EXPECT_EQ(v, 0.0f);
  const auto step = laplacian(step_image(8, 5, 4));
  for (int y = 0; y < 5; ++y) {
    EXPECT_EQ(std::abs(step.at(3, y)), 255.0f);
    EXPECT_EQ(std::abs(step.at(4, y)), 255.0f);
    EXPECT_EQ(step.at(1, y), 0.0f);
    EXPECT_EQ(step.at(6, y), 0.0f);
  }
  GrayImage ramp(12, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 12; ++x) ramp.at(x, y) = static_cast<std::uint8_t>(x * 10);
  const auto lr = laplacian(ramp);
  for (int x = 1; x < 11; ++x) EXPECT_EQ(lr.at(x, 2), 0.0f);
}

TEST(WeightedSum, Rules) {
  GrayImage a(3, 3, 0), b(3, 3, 0);
  FloatImage c(3, 3, -500.0f);
  EXPECT_EQ(weighted_sum(a, b, c, 0, 0, 1).at(1, 1), 255);
  GrayImage k(3, 3, 100);
  FloatImage kc(3, 3, 100.0f);
  EXPECT_EQ(weighted_sum(k, k, kc, 0.2, 0.3, 0.5).at(2, 2), 100);
  GrayImage r(3, 3, 7);
  EXPECT_EQ(weighted_sum(r, k, kc, 1, 0, 0), r);
  EXPECT_THROW(weighted_sum(a, b, c, 0.5, 0.5, 0.5), std::invalid_argument);
}

TEST(Canny, ConstantImageHasNoEdges) { EXPECT_EQ(canny(GrayImage(20, 20, 128)).count(), 0u); }

TEST(Canny, VerticalStepGivesOneChainNearStep) {
  const auto e = canny(step_image(32, 24, 16));
  const auto cs = connected_component_boxes(e, 8);
  ASSERT_EQ(cs.size(), 1u);
  for (int y = 0; y < e.height; ++y)
    for (int x = 0; x < e.width; ++x)
      if (e.get(x, y)) { EXPECT_LE(std::abs(x - 15.5), 1.5); }
  EXPECT_EQ(cs[0].box.h(), 24);
}

TEST(Canny, RaisingHighNeverAddsEdges) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    auto g = oracle::random_gray(rng, 24, 24);
    g = median_blur(g, 5);
    std::size_t prev = canny(g, 20, 40).count();
    for (double high = 60; high <= 200; high += 20) {
      const auto n = canny(g, 20, high).count();
      ASSERT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(Morphology, DilatePointAndEmpty) {
  BinaryMask m(7, 7);
  m.set(3, 3, true);
  const auto d = dilate(m, 3, 3);
  EXPECT_EQ(d.count(), 9u);
  for (int y = 2; y <= 4; ++y)
    for (int x = 2; x <= 4; ++x) EXPECT_TRUE(d.get(x, y));
  EXPECT_EQ(dilate(BinaryMask(5, 5), 3, 3).count(), 0u);
}

TEST(Morphology, DilateMatchesBruteForceAndClosingGrows) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const auto m = oracle::random_mask(rng, 19, 13, 0.15);
    const int kw = 1 + 2 * (i % 4), kh = 1 + 2 * ((i / 4) % 3);
    const auto d = dilate(m, kw, kh);
    ASSERT_EQ(d, oracle::dilate_brute(m, kw, kh));
    const auto closed = erode(d, kw, kh);
    for (std::size_t k = 0; k < m.data.size(); ++k) ASSERT_TRUE(!m.data[k] || closed.data[k]);
  }
}

TEST(Components, TwoSquares) {
  BinaryMask m(20, 10);
  for (int y = 1; y < 6; ++y)
    for (int x = 1; x < 6; ++x) {
      m.set(x, y, true);
      m.set(x + 10, y + 2, true);
    }
  const auto cs = connected_component_boxes(m, 8);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].box, Rect(1, 1, 5, 5));
  EXPECT_EQ(cs[1].box, Rect(11, 3, 5, 5));
  EXPECT_EQ(cs[0].pixels, 25u);
  EXPECT_EQ(cs[1].pixels, 25u);
}

TEST(Components, DiagonalConnectivity) {
  BinaryMask m(4, 4);
  m.set(1, 1, true);
  m.set(2, 2, true);
  EXPECT_EQ(connected_component_boxes(m, 8).size(), 1u);
  EXPECT_EQ(connected_component_boxes(m, 4).size(), 2u);
  EXPECT_TRUE(connected_component_boxes(BinaryMask(4, 4), 8).empty());
  EXPECT_THROW(connected_component_boxes(m, 6), std::invalid_argument);
}

TEST(Components, MatchFloodFillOracle) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto m = oracle::random_mask(rng, 40, 40, 0.2 + 0.02 * (i % 20));
    for (int conn : {4, 8}) ASSERT_EQ(oracle::as_blobs(connected_component_boxes(m, conn)), oracle::flood_fill(m, conn));
  }
}

TEST(ImageIo, PngAndPpmRoundTrip) {
  RgbImage img(5, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = Rgb{std::uint8_t(i * 10), std::uint8_t(255 - i), std::uint8_t(i * 3)};
  const auto dir = std::filesystem::temp_directory_path();
  const auto png = (dir / "screenseg_rt.png").string();
  const auto ppm = (dir / "screenseg_rt.ppm").string();
  write_png(png, img);
  write_ppm(ppm, img);
  EXPECT_EQ(read_image(png), img);
  EXPECT_EQ(read_image(ppm), img);
  EXPECT_THROW(read_image((dir / "screenseg_missing.png").string()), InputError);
}
