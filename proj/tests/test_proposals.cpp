#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"

using namespace screenseg;

TEST(Anchors, DefaultGeometry) {
  const AnchorConfig cfg;
  EXPECT_EQ(cfg.centers(), 510);
  const auto a = generate_anchors(cfg);
  ASSERT_EQ(a.size(), 4590u);
  EXPECT_DOUBLE_EQ(a.front().cx(), 8.0);
  EXPECT_DOUBLE_EQ(a.front().cy(), 8.0);
  // shapes innermost
  EXPECT_DOUBLE_EQ(a[9].cx(), 24.0);
  EXPECT_DOUBLE_EQ(a[9 * 17].cy(), 24.0);
}

TEST(Anchors, SingleCell) {
  AnchorConfig cfg;
  cfg.input_w = cfg.input_h = 16;
  cfg.shapes = {{8, 8}};
  const auto a = generate_anchors(cfg);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], Rect(4, 4, 8, 8));
}

TEST(Decode, ExpRule) {
  const Rect anchor = Rect::from_center(100, 100, 40, 20);
  const Rect r = decode_box(BoxDeltas{0, 0, std::log(2.0), 0}, anchor);
  EXPECT_NEAR(r.w(), 80.0, 1e-12);
  EXPECT_NEAR(r.cx(), 100.0, 1e-12);
}

TEST(Decode, EncodeInverts) {
  auto rng = make_rng(4, "encode");
  std::uniform_real_distribution<double> pos(0, 200), size(2, 80);
  for (int i = 0; i < 200; ++i) {
    const Rect anchor(pos(rng), pos(rng), size(rng), size(rng));
    const Rect box(pos(rng), pos(rng), size(rng), size(rng));
    const Rect back = decode_box(encode_box(box, anchor), anchor);
    ASSERT_NEAR(back.x(), box.x(), 1e-9);
    ASSERT_NEAR(back.y(), box.y(), 1e-9);
    ASSERT_NEAR(back.w(), box.w(), 1e-9);
    ASSERT_NEAR(back.h(), box.h(), 1e-9);
  }
}

TEST(Decode, ZeroDeltasGiveAnchorsAndFloorFilters) {
  AnchorConfig cfg;
  auto t = PredictionTensor::zeros(cfg);
  const auto anchors = generate_anchors(cfg);
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    auto e = t.entry(a);
    e[4] = 30.0f;  // confidence -> 1
    e[5 + 1] = 5.0f;
  }
  const auto props = decode(t, cfg, 0.0);
  const double p_text = std::exp(5.0) / (std::exp(5.0) + 2.0);
  std::size_t unclipped = 0;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const auto c = clip_to(anchors[a], cfg.input_w, cfg.input_h);
    if (*c == anchors[a]) ++unclipped;
  }
  ASSERT_EQ(props.size(), anchors.size());
  EXPECT_NEAR(props[0].score, p_text, 1e-6);
  EXPECT_EQ(props[0].cls, BlockClass::Text);
  EXPECT_EQ(props[0].rect, *clip_to(anchors[0], cfg.input_w, cfg.input_h));
  EXPECT_GT(unclipped, 0u);

  auto low = PredictionTensor::zeros(cfg);
  for (std::size_t a = 0; a < anchors.size(); ++a) low.entry(a)[4] = -12.0f;
  EXPECT_TRUE(decode(low, cfg, 0.05).empty());
}

TEST(Decode, RejectsWrongShape) {
  AnchorConfig cfg;
  auto t = PredictionTensor::zeros(cfg);
  t.values.pop_back();
  EXPECT_THROW(decode(t, cfg, 0.1), InputError);
}

TEST(TensorFile, RoundTripAndTruncation) {
  AnchorConfig cfg;
  auto t = PredictionTensor::zeros(cfg);
  for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] = static_cast<float>(i % 97) * 0.25f;
  const auto path = (std::filesystem::temp_directory_path() / "screenseg_tensor.sseg").string();
  save_tensor(path, t);
  EXPECT_EQ(load_tensor(path, cfg).values, t.values);
  auto bytes = binfmt::read_file(path);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(parse_tensor(bytes, cfg), InputError);
  AnchorConfig other = cfg;
  other.shapes.pop_back();
  EXPECT_THROW(load_tensor(path, other), InputError);
}

TEST(ProposalJson, CenterToCorner) {
  std::istringstream in(R"({"class":"image","score":0.9,"cx":100,"cy":100,"w":40,"h":20})"
                        "\n\n");
  const auto p = parse_proposals(in);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (Proposal{Rect(80, 90, 40, 20), BlockClass::Image, 0.9}));
}

TEST(ProposalJson, EmptyAndInvalid) {
  std::istringstream empty("");
  EXPECT_TRUE(parse_proposals(empty).empty());
  std::istringstream bad_score(R"({"class":"text","score":1.5,"cx":1,"cy":1,"w":1,"h":1})");
  EXPECT_THROW(parse_proposals(bad_score), InputError);
  std::istringstream bad_class(R"({"class":"grid","score":0.5,"cx":1,"cy":1,"w":1,"h":1})");
  EXPECT_THROW(parse_proposals(bad_class), InputError);
  std::istringstream bad_size(R"({"class":"icon","score":0.5,"cx":1,"cy":1,"w":0,"h":1})");
  EXPECT_THROW(parse_proposals(bad_size), InputError);
}

TEST(ProposalJson, SaveLoadRoundTrip) {
  const std::vector<Proposal> ps = {{Rect(1, 2, 3, 4), BlockClass::Icon, 0.25}, {Rect(10, 20, 30, 40), BlockClass::Text, 1.0}};
  const auto path = (std::filesystem::temp_directory_path() / "screenseg_props.jsonl").string();
  save_proposals(path, ps);
  const auto back = load_proposals(path);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].cls, ps[i].cls);
    EXPECT_DOUBLE_EQ(back[i].score, ps[i].score);
    EXPECT_NEAR(back[i].rect.x(), ps[i].rect.x(), 1e-12);
    EXPECT_NEAR(back[i].rect.w(), ps[i].rect.w(), 1e-12);
  }
}

TEST(Annotations, BoundsChecked) {
  nlohmann::json j = {{"width", 100}, {"height", 50}, {"objects", {{{"class", "text"}, {"rect", {90, 0, 20, 10}}}}}};
  EXPECT_THROW(annotation_from_json(j), InputError);
  j["objects"][0]["rect"] = {10, 0, 20, 10};
  const auto a = annotation_from_json(j);
  ASSERT_EQ(a.objects.size(), 1u);
  EXPECT_EQ(annotation_from_json(annotation_to_json(a)).objects, a.objects);
}

namespace {

Annotation shapes_annotation(const std::vector<AnchorShape>& shapes) {
  Annotation a{"", 272, 480, {}};
  for (const auto& s : shapes) a.objects.push_back({BlockClass::Image, Rect(0, 0, s.w, s.h)});
  return a;
}

}  // namespace

TEST(KMeans, IdenticalBoxes) {
  const auto res = kmeans_anchor_shapes({shapes_annotation(std::vector<AnchorShape>(10, {30, 12}))}, 3, 272, 480, 1);
  for (const auto& c : res.shapes) {
    EXPECT_DOUBLE_EQ(c.w, 30);
    EXPECT_DOUBLE_EQ(c.h, 12);
  }
}

TEST(KMeans, TwoClustersMatchExhaustiveOracle) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<AnchorShape> pts;
    for (int i = 0; i < 6; ++i) pts.push_back({20 + n(rng), 10 + n(rng)});
    for (int i = 0; i < 6; ++i) pts.push_back({120 + n(rng), 60 + n(rng)});
    // exhaustive best 2-partition
    double best = 1e300;
    std::array<AnchorShape, 2> best_c{};
    for (unsigned mask = 1; mask < (1u << pts.size()) - 1; ++mask) {
      std::array<AnchorShape, 2> c{};
      std::array<int, 2> cnt{};
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const int g = (mask >> i) & 1;
        c[g].w += pts[i].w;
        c[g].h += pts[i].h;
        ++cnt[g];
      }
      for (int g = 0; g < 2; ++g) c[g].w /= cnt[g], c[g].h /= cnt[g];
      double sse = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) sse += detail::dist2(pts[i], c[(mask >> i) & 1]);
      if (sse < best) {
        best = sse;
        best_c = c;
      }
    }
    if (best_c[0].w * best_c[0].h > best_c[1].w * best_c[1].h) std::swap(best_c[0], best_c[1]);
    const auto res = kmeans_anchor_shapes({shapes_annotation(pts)}, 2, 272, 480, trial);
    ASSERT_EQ(res.shapes.size(), 2u);
    for (int g = 0; g < 2; ++g) {
      EXPECT_NEAR(res.shapes[g].w, best_c[g].w, 1e-9);
      EXPECT_NEAR(res.shapes[g].h, best_c[g].h, 1e-9);
    }
  }
}

TEST(KMeans, InertiaNonIncreasingAndErrors) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(4, 200);
  std::vector<AnchorShape> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng)});
  const auto res = kmeans_anchor_shapes({shapes_annotation(pts)}, 9, 272, 480, 3);
  for (std::size_t i = 1; i < res.inertia.size(); ++i) EXPECT_LE(res.inertia[i], res.inertia[i - 1] + 1e-9);
  EXPECT_THROW(kmeans_anchor_shapes({shapes_annotation(pts)}, 0, 272, 480, 0), InputError);
  EXPECT_THROW(kmeans_anchor_shapes({shapes_annotation({{5, 5}})}, 2, 272, 480, 0), InputError);
}

TEST(KMeans, RescalesToModelResolution) {
  Annotation a{"", 544, 960, {{BlockClass::Text, Rect(0, 0, 100, 40)}}};
  const auto res = kmeans_anchor_shapes({a}, 1, 272, 480, 0);
  EXPECT_DOUBLE_EQ(res.shapes[0].w, 50);
  EXPECT_DOUBLE_EQ(res.shapes[0].h, 20);
}
