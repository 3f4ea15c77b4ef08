#pragma once

// Detector-side geometry: anchor lattice, prediction-tensor decoding, k-means
// anchor shapes, annotations, and the file-backed detector backends.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenseg/binfmt.hpp"
#include "screenseg/block.hpp"
#include "screenseg/error.hpp"
#include "screenseg/geometry.hpp"
#include "screenseg/rng.hpp"

namespace screenseg {

struct AnchorShape {
  double w = 0;
  double h = 0;

  bool operator==(const AnchorShape&) const = default;
};

struct AnchorConfig {
  int input_w = 272;
  int input_h = 480;
  int stride = 16;
  std::vector<AnchorShape> shapes = default_shapes();

  int grid_w() const { return (input_w + stride - 1) / stride; }
  int grid_h() const { return (input_h + stride - 1) / stride; }
  /// Number of anchor center points (CP).
  int centers() const { return grid_w() * grid_h(); }
  int shape_count() const { return static_cast<int>(shapes.size()); }

  void validate() const {
    if (input_w < 1 || input_h < 1 || stride < 1) throw InputError("anchor config: dimensions must be positive");
    if (shapes.empty()) throw InputError("anchor config: at least one anchor shape required");
    for (const auto& s : shapes) {
      if (!(s.w > 0 && s.h > 0)) throw InputError("anchor config: anchor shapes must be positive");
    }
  }

  /// Nine shapes at 272x480 model resolution, sorted by area.
  static std::vector<AnchorShape> default_shapes() {
    return {{16, 12}, {24, 24}, {60, 14}, {40, 40}, {120, 18}, {72, 72}, {200, 28}, {140, 110}, {240, 180}};
  }
};

/// One anchor rect per (center, shape); centers row-major over the lattice,
/// offset by half a stride, shapes innermost.
inline std::vector<Rect> generate_anchors(const AnchorConfig& cfg) {
  cfg.validate();
  std::vector<Rect> out;
  out.reserve(static_cast<std::size_t>(cfg.centers()) * cfg.shapes.size());
  for (int j = 0; j < cfg.grid_h(); ++j) {
    for (int i = 0; i < cfg.grid_w(); ++i) {
      const double cx = (i + 0.5) * cfg.stride;
      const double cy = (j + 0.5) * cfg.stride;
      for (const auto& s : cfg.shapes) out.push_back(Rect::from_center(cx, cy, s.w, s.h));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prediction tensor

/// Raw detector output: per (center, shape) the values
/// [dx, dy, dw, dh, confidence logit, class logits...].
struct PredictionTensor {
  int centers = 0;
  int shapes = 0;
  int classes = kDetectorClasses;
  std::vector<float> values;

  int stride() const { return 5 + classes; }
  std::size_t expected_size() const {
    return static_cast<std::size_t>(centers) * static_cast<std::size_t>(shapes) * static_cast<std::size_t>(stride());
  }
  static PredictionTensor zeros(const AnchorConfig& cfg) {
    PredictionTensor t{cfg.centers(), cfg.shape_count(), kDetectorClasses, {}};
    t.values.assign(t.expected_size(), 0.0f);
    return t;
  }
  std::span<float> entry(std::size_t anchor) {
    return std::span<float>(values).subspan(anchor * static_cast<std::size_t>(stride()), stride());
  }
  std::span<const float> entry(std::size_t anchor) const {
    return std::span<const float>(values).subspan(anchor * static_cast<std::size_t>(stride()), stride());
  }
};

struct BoxDeltas {
  double dx = 0;
  double dy = 0;
  double dw = 0;
  double dh = 0;
};

inline Rect decode_box(const BoxDeltas& d, const Rect& anchor) {
  return Rect::from_center(anchor.cx() + d.dx * anchor.w(), anchor.cy() + d.dy * anchor.h(),
                           anchor.w() * std::exp(d.dw), anchor.h() * std::exp(d.dh));
}

/// Inverse of decode_box.
inline BoxDeltas encode_box(const Rect& box, const Rect& anchor) {
  return BoxDeltas{(box.cx() - anchor.cx()) / anchor.w(), (box.cy() - anchor.cy()) / anchor.h(),
                   std::log(box.w() / anchor.w()), std::log(box.h() / anchor.h())};
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Decodes every anchor into a proposal: score = sigmoid(confidence) times the
/// winning softmax class probability. Proposals scoring below `score_floor`
/// are dropped; rects are clipped to the model input.
inline std::vector<Proposal> decode(const PredictionTensor& t, const AnchorConfig& cfg, double score_floor) {
  cfg.validate();
  if (t.classes != kDetectorClasses) {
    throw InputError("tensor: expected " + std::to_string(kDetectorClasses) + " classes, got " +
                     std::to_string(t.classes));
  }
  if (t.centers != cfg.centers() || t.shapes != cfg.shape_count() || t.values.size() != t.expected_size()) {
    throw InputError("tensor: size mismatch with anchor config (CP=" + std::to_string(cfg.centers()) +
                     ", K=" + std::to_string(cfg.shape_count()) + ")");
  }
  const auto anchors = generate_anchors(cfg);
  std::vector<Proposal> out;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const auto e = t.entry(a);
    for (float v : e) {
      if (!std::isfinite(v)) throw InputError("tensor: non-finite value at anchor " + std::to_string(a));
    }
    const double conf = sigmoid(e[4]);
    int best = 0;
    double mx = e[5];
    for (int c = 1; c < t.classes; ++c) {
      if (e[5 + c] > mx) {
        mx = e[5 + c];
        best = c;
      }
    }
    double denom = 0;
    for (int c = 0; c < t.classes; ++c) denom += std::exp(e[5 + c] - mx);
    const double score = conf / denom;  // conf * softmax(best)
    if (score < score_floor) continue;
    const double dw = e[2];
    const double dh = e[3];
    if (dw > 20 || dh > 20) continue;  // exp overflow guard: box would dwarf the input
    const auto box = decode_box(BoxDeltas{e[0], e[1], dw, dh}, anchors[a]);
    const auto clipped = clip_to(box, cfg.input_w, cfg.input_h);
    if (!clipped) continue;
    out.push_back(Proposal{*clipped, static_cast<BlockClass>(best), std::clamp(score, 0.0, 1.0)});
  }
  return out;
}

inline void save_tensor(const std::string& path, const PredictionTensor& t) {
  if (t.values.size() != t.expected_size()) throw InputError("tensor: value count does not match header");
  auto bytes = binfmt::header(binfmt::kKindTensor);
  binfmt::put_u32(bytes, static_cast<std::uint32_t>(t.centers));
  binfmt::put_u32(bytes, static_cast<std::uint32_t>(t.shapes));
  binfmt::put_u32(bytes, static_cast<std::uint32_t>(t.classes));
  for (float v : t.values) binfmt::put_f32(bytes, v);
  binfmt::write_file(path, bytes);
}

inline PredictionTensor parse_tensor(std::span<const std::uint8_t> bytes, const AnchorConfig& cfg,
                                     const std::string& what = "tensor") {
  binfmt::Reader r(bytes, what);
  binfmt::read_header(r, binfmt::kKindTensor, what);
  PredictionTensor t;
  t.centers = static_cast<int>(r.u32());
  t.shapes = static_cast<int>(r.u32());
  t.classes = static_cast<int>(r.u32());
  if (t.centers != cfg.centers() || t.shapes != cfg.shape_count() || t.classes != kDetectorClasses) {
    throw InputError(what + ": header CP/K/C = " + std::to_string(t.centers) + "/" + std::to_string(t.shapes) +
                     "/" + std::to_string(t.classes) + " does not match config " +
                     std::to_string(cfg.centers()) + "/" + std::to_string(cfg.shape_count()) + "/" +
                     std::to_string(kDetectorClasses));
  }
  const auto n = t.expected_size();
  r.need(n * 4);
  if (r.remaining() != n * 4) throw InputError(what + ": trailing bytes after tensor payload");
  t.values.resize(n);
  for (auto& v : t.values) v = r.f32();
  return t;
}

inline PredictionTensor load_tensor(const std::string& path, const AnchorConfig& cfg) {
  const auto bytes = binfmt::read_file(path);
  return parse_tensor(bytes, cfg, path);
}

// ---------------------------------------------------------------------------
// Proposal JSONL

/// Parses one proposal object {class, score, cx, cy, w, h}.
inline Proposal proposal_from_json(const nlohmann::json& j) {
  const auto cls = parse_block_class(j.at("class").get<std::string>());
  if (!cls || !is_detector_class(*cls)) throw InputError("unknown detector class " + j.at("class").dump());
  const double score = j.at("score").get<double>();
  check_score(score);
  const double w = j.at("w").get<double>();
  const double h = j.at("h").get<double>();
  if (!(w > 0 && h > 0)) throw InputError("proposal width and height must be positive");
  return Proposal{Rect::from_center(j.at("cx").get<double>(), j.at("cy").get<double>(), w, h), *cls, score};
}

inline nlohmann::json proposal_to_json(const Proposal& p) {
  return {{"class", to_string(p.cls)}, {"score", p.score}, {"cx", p.rect.cx()},
          {"cy", p.rect.cy()},         {"w", p.rect.w()},    {"h", p.rect.h()}};
}

inline std::vector<Proposal> parse_proposals(std::istream& in, const std::string& what = "proposals") {
  std::vector<Proposal> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(proposal_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw InputError(what + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Proposal> load_proposals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse_proposals(in, path);
}

inline void save_proposals(const std::string& path, const std::vector<Proposal>& props) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (const auto& p : props) out << proposal_to_json(p).dump() << "\n";
}

// ---------------------------------------------------------------------------
// Annotations

struct Annotation {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<LabeledRect> objects;
};

inline nlohmann::json rect_to_json(const Rect& r) { return nlohmann::json::array({r.x(), r.y(), r.w(), r.h()}); }

inline Rect rect_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("rect must be a 4-array [x, y, w, h]");
  try {
    return Rect(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline nlohmann::json annotation_to_json(const Annotation& a) {
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& o : a.objects) objs.push_back({{"class", to_string(o.cls)}, {"rect", rect_to_json(o.rect)}});
  return {{"schema", "screenseg/1"}, {"image_id", a.image_id}, {"width", a.width}, {"height", a.height},
          {"objects", objs}};
}

inline Annotation annotation_from_json(const nlohmann::json& j) {
  Annotation a;
  a.image_id = j.value("image_id", std::string{});
  a.width = j.at("width").get<int>();
  a.height = j.at("height").get<int>();
  if (a.width < 1 || a.height < 1) throw InputError("annotation: image size must be positive");
  for (const auto& o : j.at("objects")) {
    const auto cls = parse_block_class(o.at("class").get<std::string>());
    if (!cls) throw InputError("annotation: unknown class " + o.at("class").dump());
    const auto r = rect_from_json(o.at("rect"));
    constexpr double tol = 1e-6;
    if (r.x() < -tol || r.y() < -tol || r.right() > a.width + tol || r.bottom() > a.height + tol) {
      throw InputError("annotation: object rect outside image bounds");
    }
    a.objects.push_back(LabeledRect{*cls, r});
  }
  return a;
}

inline Annotation load_annotation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return annotation_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// k-means anchor shapes

struct KMeansResult {
  std::vector<AnchorShape> shapes;  // sorted by area ascending
  int iterations = 0;
  std::vector<double> inertia;  // within-cluster squared distance after each Lloyd step
};

namespace detail {

inline double dist2(const AnchorShape& a, const AnchorShape& b) {
  const double dw = a.w - b.w;
  const double dh = a.h - b.h;
  return dw * dw + dh * dh;
}

inline KMeansResult lloyd(const std::vector<AnchorShape>& pts, std::size_t k, Rng& rng, int max_iter) {
  // k-means++ seeding
  std::vector<AnchorShape> centers;
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  centers.push_back(pts[pick(rng)]);
  std::vector<double> d2(pts.size());
  while (centers.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, dist2(pts[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0) {
      centers.push_back(pts[pick(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng);
    std::size_t chosen = pts.size() - 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      target -= d2[i];
      if (target <= 0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(pts[chosen]);
  }

  KMeansResult res;
  std::vector<std::size_t> assign(pts.size(), k);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::size_t best = 0;
      double bd = dist2(pts[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = dist2(pts[i], centers[c]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<double> sw(k, 0), sh(k, 0);
    std::vector<std::size_t> n(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sw[assign[i]] += pts[i].w;
      sh[assign[i]] += pts[i].h;
      ++n[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (n[c] > 0) centers[c] = AnchorShape{sw[c] / n[c], sh[c] / n[c]};
    }
    double inertia = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) inertia += dist2(pts[i], centers[assign[i]]);
    res.inertia.push_back(inertia);
    res.iterations = it + 1;
  }
  res.shapes = std::move(centers);
  return res;
}

}  // namespace detail

struct KMeansOptions {
  int max_iter = 300;
  int restarts = 5;  // independent k-means++ seedings; the lowest inertia wins
};

/// Clusters annotation box sizes, rescaled to (target_w, target_h) model
/// resolution, into k anchor shapes under Euclidean (w, h) distance.
inline KMeansResult kmeans_anchor_shapes(const std::vector<Annotation>& annotations, int k, int target_w,
                                         int target_h, std::uint64_t seed, const KMeansOptions& opt = {}) {
  if (k < 1) throw InputError("kmeans: k must be >= 1");
  std::vector<AnchorShape> pts;
  for (const auto& a : annotations) {
    const double sx = static_cast<double>(target_w) / a.width;
    const double sy = static_cast<double>(target_h) / a.height;
    for (const auto& o : a.objects) pts.push_back(AnchorShape{o.rect.w() * sx, o.rect.h() * sy});
  }
  if (pts.empty()) throw InputError("kmeans: no annotated boxes");
  if (pts.size() < static_cast<std::size_t>(k)) {
    throw InputError("kmeans: " + std::to_string(pts.size()) + " boxes is fewer than k=" + std::to_string(k));
  }
  KMeansResult best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    auto rng = make_rng(seed, "kmeans", static_cast<std::uint64_t>(r));
    auto res = detail::lloyd(pts, static_cast<std::size_t>(k), rng, opt.max_iter);
    double inertia = 0;
    for (const auto& p : pts) {
      double bd = std::numeric_limits<double>::infinity();
      for (const auto& c : res.shapes) bd = std::min(bd, detail::dist2(p, c));
      inertia += bd;
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(res);
    }
  }
  std::stable_sort(best.shapes.begin(), best.shapes.end(),
                   [](const AnchorShape& a, const AnchorShape& b) { return a.w * a.h < b.w * b.h; });
  return best;
}

}  // namespace screenseg
