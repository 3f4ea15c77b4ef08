#pragma once

// End-to-end analysis: detector backend -> weighted NMS -> text blocks ->
// grid blocks -> scene text -> rectification -> layout tree.

#include <chrono>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "screenseg/block.hpp"
#include "screenseg/error.hpp"
#include "screenseg/gridblocks.hpp"
#include "screenseg/heuristic.hpp"
#include "screenseg/hierarchy.hpp"
#include "screenseg/nms.hpp"
#include "screenseg/proposals.hpp"
#include "screenseg/raster.hpp"
#include "screenseg/scenetext.hpp"
#include "screenseg/textblocks.hpp"

namespace screenseg {

/// Which text blocks reach the tree: image-processing extraction, the
/// detector's Text class, or both.
enum class TextSource { Ip, Dnn, Both };

struct PipelineConfig {
  double nms_iou = 0.2;
  double score_floor = 0.05;  // tensor decoding
  Granularity granularity = Granularity::Line;
  TextSource text_source = TextSource::Ip;
  bool grids = true;
  bool rectify = true;
  AnchorConfig anchors{};
  TextBlockParams text{};
  GridParams grid{};
  WordBoxParams words{};
  HierarchyParams hierarchy{};
  HeuristicParams heuristic{};
};

struct HeuristicBackend {};
struct ProposalsBackend {
  std::vector<Proposal> proposals;  // image coordinates
};
struct TensorBackend {
  PredictionTensor tensor;  // model coordinates
};
using Backend = std::variant<HeuristicBackend, ProposalsBackend, TensorBackend>;

struct StageTiming {
  std::string stage;
  double ms = 0;
};

struct Analysis {
  LayoutNode tree;
  std::vector<Block> detected;  // blocks before rectification
  std::vector<Block> blocks;    // after rectification
  std::vector<Block> grids;
  std::vector<bool> grid_used;
  std::vector<Block> scene_texts;
  std::vector<StageTiming> timings;
};

/// Scales model-space proposals to image space per axis and clips them.
inline std::vector<Proposal> rescale_proposals(const std::vector<Proposal>& props, double sx, double sy, int w,
                                               int h) {
  std::vector<Proposal> out;
  for (const auto& p : props) {
    const auto r = clip_to(Rect(p.rect.x() * sx, p.rect.y() * sy, p.rect.w() * sx, p.rect.h() * sy), w, h);
    if (r) out.push_back(Proposal{*r, p.cls, p.score});
  }
  return out;
}

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink), t0_(std::chrono::steady_clock::now()) {}
  void lap(const char* stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({stage, std::chrono::duration<double, std::milli>(now - t0_).count()});
    t0_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

inline Analysis analyze(const RgbImage& img, const PipelineConfig& cfg, const Backend& backend,
                        const ScoreMapPair* maps = nullptr) {
  if (maps && (maps->width() != img.width / 2 || maps->height() != img.height / 2)) {
    throw InputError("score maps are " + std::to_string(maps->width()) + "x" + std::to_string(maps->height()) +
                     ", expected half the image size " + std::to_string(img.width / 2) + "x" +
                     std::to_string(img.height / 2));
  }
  Analysis a;
  detail::StageClock clock(a.timings);

  std::vector<Proposal> props;
  if (std::holds_alternative<HeuristicBackend>(backend)) {
    props = heuristic_detect(img, cfg.heuristic);
  } else if (const auto* pb = std::get_if<ProposalsBackend>(&backend)) {
    for (const auto& p : pb->proposals) {
      check_score(p.score);
      if (!is_detector_class(p.cls)) throw InputError("proposals: only image, text and icon are detector classes");
      const auto r = clip_to(p.rect, img.width, img.height);
      if (r) props.push_back(Proposal{*r, p.cls, p.score});
    }
  } else {
    const auto& t = std::get<TensorBackend>(backend).tensor;
    props = rescale_proposals(decode(t, cfg.anchors, cfg.score_floor),
                              static_cast<double>(img.width) / cfg.anchors.input_w,
                              static_cast<double>(img.height) / cfg.anchors.input_h, img.width, img.height);
  }
  clock.lap("detect");

  std::vector<Block> blocks;
  std::vector<Rect> masked;
  for (const auto& p : weighted_nms(props, cfg.nms_iou)) {
    if (p.cls == BlockClass::Text && cfg.text_source == TextSource::Ip) continue;
    if (p.cls != BlockClass::Text) masked.push_back(p.rect);
    blocks.push_back(to_block(p, Source::Dnn));
  }
  clock.lap("nms");

  if (cfg.text_source != TextSource::Dnn) {
    for (auto& b : extract_text_blocks(img, masked, cfg.granularity, cfg.text)) blocks.push_back(b);
  }
  clock.lap("textblocks");

  if (cfg.grids) a.grids = find_grid_blocks(img, cfg.grid);
  clock.lap("gridblocks");

  std::vector<Block> words;
  if (maps) words = extract_word_boxes(*maps, cfg.words);
  clock.lap("scenetext");

  a.detected = blocks;
  if (cfg.rectify) {
    auto r = rectify_blocks(std::move(blocks), a.grids, cfg.hierarchy);
    a.blocks = std::move(r.blocks);
    a.grid_used = std::move(r.grid_used);
  } else {
    a.blocks = std::move(blocks);
    a.grid_used.assign(a.grids.size(), false);
  }
  // scene text is kept only inside a final image block
  for (auto& w : words) {
    const bool on_image = std::any_of(a.blocks.begin(), a.blocks.end(), [&](const Block& b) {
      return b.cls == BlockClass::Image && contains_frac(b.rect, w.rect) >= cfg.hierarchy.nest_frac;
    });
    if (on_image) a.scene_texts.push_back(std::move(w));
  }
  clock.lap("rectify");

  a.tree = build_layout_tree(a.blocks, a.grids, a.grid_used, a.scene_texts, img.width, img.height, cfg.hierarchy);
  clock.lap("tree");
  return a;
}

inline Rgb overlay_color(BlockClass c) {
  switch (c) {
    case BlockClass::Image:
    case BlockClass::Icon: return Rgb{230, 20, 20};
    case BlockClass::Text: return Rgb{20, 60, 230};
    case BlockClass::Grid: return Rgb{20, 180, 40};
    case BlockClass::SceneText: return Rgb{240, 160, 0};
  }
  return Rgb{};
}

/// Image/Icon red, Text blue, Grid green, scene text orange.
inline RgbImage draw_overlay(const RgbImage& img, const LayoutNode& tree) {
  RgbImage out = img;
  const int t = std::max(1, img.width / 360);
  for (const auto& b : flatten_tree(tree)) draw_outline(out, b.rect, overlay_color(b.cls), t);
  return out;
}

}  // namespace screenseg
