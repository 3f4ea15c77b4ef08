#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "screenseg/error.hpp"
#include "screenseg/geometry.hpp"

namespace screenseg {

/// Detector classes come first; Grid and SceneText are produced by later stages.
enum class BlockClass { Image = 0, Text = 1, Icon = 2, Grid = 3, SceneText = 4 };

inline constexpr int kDetectorClasses = 3;
inline constexpr std::array<BlockClass, kDetectorClasses> kDetectorClassList = {
    BlockClass::Image, BlockClass::Text, BlockClass::Icon};

inline constexpr std::string_view to_string(BlockClass c) {
  switch (c) {
    case BlockClass::Image: return "image";
    case BlockClass::Text: return "text";
    case BlockClass::Icon: return "icon";
    case BlockClass::Grid: return "grid";
    case BlockClass::SceneText: return "scenetext";
  }
  return "?";
}

inline std::optional<BlockClass> parse_block_class(std::string_view s) {
  for (auto c : {BlockClass::Image, BlockClass::Text, BlockClass::Icon, BlockClass::Grid, BlockClass::SceneText}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

inline bool is_detector_class(BlockClass c) { return static_cast<int>(c) < kDetectorClasses; }

/// Which stage produced a block.
enum class Source { Dnn, Ip, Grid, SceneText };

inline constexpr std::string_view to_string(Source s) {
  switch (s) {
    case Source::Dnn: return "dnn";
    case Source::Ip: return "ip";
    case Source::Grid: return "grid";
    case Source::SceneText: return "scenetext";
  }
  return "?";
}

inline std::optional<Source> parse_source(std::string_view s) {
  for (auto v : {Source::Dnn, Source::Ip, Source::Grid, Source::SceneText}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

/// Pre-NMS detection.
struct Proposal {
  Rect rect;
  BlockClass cls;
  double score;

  bool operator==(const Proposal&) const = default;
};

inline void check_score(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InputError("score must lie in [0, 1], got " + std::to_string(score));
  }
}

/// A classified region produced by the pipeline.
struct Block {
  Rect rect;
  BlockClass cls;
  double score = 1.0;
  Source source = Source::Dnn;
  bool rectified = false;

  bool operator==(const Block&) const = default;
};

inline Block to_block(const Proposal& p, Source source = Source::Dnn) {
  return Block{p.rect, p.cls, p.score, source, false};
}

/// Ground-truth object.
struct LabeledRect {
  BlockClass cls;
  Rect rect;

  bool operator==(const LabeledRect&) const = default;
};

}  // namespace screenseg
