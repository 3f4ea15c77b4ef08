#pragma once

// Character/affinity score maps at half resolution: Gaussian ground-truth
// generation, word-box extraction by connected components, and the binary
// score-map file that stands in for model inference.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "screenseg/binfmt.hpp"
#include "screenseg/block.hpp"
#include "screenseg/error.hpp"
#include "screenseg/raster.hpp"

namespace screenseg {

/// Planar character and affinity channels, each (image_w / 2) x (image_h / 2).
/// Half-resolution pixel (u, v) covers image pixels [2u, 2u + 2) x [2v, 2v + 2).
struct ScoreMapPair {
  FloatImage character;
  FloatImage affinity;

  int width() const { return character.width; }
  int height() const { return character.height; }
  bool operator==(const ScoreMapPair&) const = default;
};

/// Characters of each word, left to right, in image coordinates.
struct CharLayout {
  std::vector<std::vector<Rect>> words;
};

inline Rect word_rect(const std::vector<Rect>& chars) {
  if (chars.empty()) throw std::invalid_argument("word_rect: empty word");
  Rect r = chars.front();
  for (const auto& c : chars) r = union_rect(r, c);
  return r;
}

struct ScoreMapParams {
  double sigma_frac = 0.4;
};

namespace detail {

/// Max-composites exp(-dx^2/2sx^2 - dy^2/2sy^2), centered at image point
/// (cx, cy), into a half-resolution map.
inline void splat_gaussian(FloatImage& map, double cx, double cy, double sx, double sy) {
  const double rx = 3.5 * sx;
  const double ry = 3.5 * sy;
  // image x of half-res column u is 2u + 1
  const int u0 = std::max(0, static_cast<int>(std::floor((cx - rx - 1) / 2)));
  const int u1 = std::min(map.width - 1, static_cast<int>(std::ceil((cx + rx - 1) / 2)));
  const int v0 = std::max(0, static_cast<int>(std::floor((cy - ry - 1) / 2)));
  const int v1 = std::min(map.height - 1, static_cast<int>(std::ceil((cy + ry - 1) / 2)));
  for (int v = v0; v <= v1; ++v) {
    const double dy = (2.0 * v + 1.0 - cy) / sy;
    for (int u = u0; u <= u1; ++u) {
      const double dx = (2.0 * u + 1.0 - cx) / sx;
      const auto g = static_cast<float>(std::exp(-0.5 * (dx * dx + dy * dy)));
      auto& px = map.at(u, v);
      px = std::max(px, g);
    }
  }
}

}  // namespace detail

/// Character channel: one Gaussian per character (peak 1 at its center,
/// sigma = 0.4 * size). Affinity channel: one Gaussian per adjacent character
/// pair, centered between the two centers with sigma_x = 0.4 * center
/// distance and sigma_y = 0.4 * mean character height.
inline ScoreMapPair generate_score_maps(const CharLayout& layout, int image_w, int image_h,
                                        const ScoreMapParams& p = {}) {
  if (image_w < 2 || image_h < 2 || image_w % 2 != 0 || image_h % 2 != 0) {
    throw InputError("score maps need even, positive image dimensions");
  }
  ScoreMapPair maps{FloatImage(image_w / 2, image_h / 2, 0.0f), FloatImage(image_w / 2, image_h / 2, 0.0f)};
  for (const auto& word : layout.words) {
    for (const auto& c : word) {
      if (c.x() < 0 || c.y() < 0 || c.right() > image_w || c.bottom() > image_h) {
        throw InputError("score maps: character rect outside the image");
      }
      detail::splat_gaussian(maps.character, c.cx(), c.cy(), p.sigma_frac * c.w(), p.sigma_frac * c.h());
    }
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      const auto& a = word[i];
      const auto& b = word[i + 1];
      const double dist = std::hypot(b.cx() - a.cx(), b.cy() - a.cy());
      if (dist <= 0) continue;
      detail::splat_gaussian(maps.affinity, 0.5 * (a.cx() + b.cx()), 0.5 * (a.cy() + b.cy()), p.sigma_frac * dist,
                             p.sigma_frac * 0.5 * (a.h() + b.h()));
    }
  }
  return maps;
}

struct WordBoxParams {
  double char_thresh = 0.4;
  double affinity_thresh = 0.4;
};

/// Union of the two thresholded channels.
inline BinaryMask word_mask(const ScoreMapPair& maps, const WordBoxParams& p = {}) {
  BinaryMask m(maps.width(), maps.height());
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    m.data[i] = (maps.character.data[i] >= p.char_thresh || maps.affinity.data[i] >= p.affinity_thresh) ? 1 : 0;
  }
  return m;
}

/// One SceneText block per 8-connected component of the thresholded maps,
/// scaled back to image space; score = peak character score in the component.
inline std::vector<Block> extract_word_boxes(const ScoreMapPair& maps, const WordBoxParams& p = {}) {
  if (!(p.char_thresh > 0 && p.char_thresh < 1 && p.affinity_thresh > 0 && p.affinity_thresh < 1)) {
    throw std::invalid_argument("extract_word_boxes: thresholds must lie in (0, 1)");
  }
  const auto labels = label_components(word_mask(maps, p), 8);
  std::vector<double> peak(labels.components.size(), 0.0);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const auto l = labels.labels[i];
    if (l >= 0) peak[l] = std::max(peak[l], static_cast<double>(maps.character.data[i]));
  }
  std::vector<Block> out;
  for (std::size_t i = 0; i < labels.components.size(); ++i) {
    const auto& b = labels.components[i].box;
    out.push_back(Block{Rect(2 * b.x(), 2 * b.y(), 2 * b.w(), 2 * b.h()), BlockClass::SceneText,
                        std::clamp(peak[i], 0.0, 1.0), Source::SceneText, false});
  }
  return out;
}

inline std::vector<std::uint8_t> serialize_score_maps(const ScoreMapPair& maps) {
  auto bytes = binfmt::header(binfmt::kKindScoreMap);
  binfmt::put_u32(bytes, static_cast<std::uint32_t>(maps.width()));
  binfmt::put_u32(bytes, static_cast<std::uint32_t>(maps.height()));
  binfmt::put_u32(bytes, 2);
  for (float v : maps.character.data) binfmt::put_f32(bytes, v);
  for (float v : maps.affinity.data) binfmt::put_f32(bytes, v);
  return bytes;
}

inline ScoreMapPair parse_score_maps(std::span<const std::uint8_t> bytes, const std::string& what = "score maps") {
  binfmt::Reader r(bytes, what);
  binfmt::read_header(r, binfmt::kKindScoreMap, what);
  const auto w = r.u32();
  const auto h = r.u32();
  const auto channels = r.u32();
  if (channels != 2) throw InputError(what + ": expected 2 channels, header says " + std::to_string(channels));
  if (w < 1 || h < 1 || w > (1u << 15) || h > (1u << 15)) throw InputError(what + ": implausible dimensions");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  r.need(2 * n * 4);
  if (r.remaining() != 2 * n * 4) throw InputError(what + ": trailing bytes after score-map payload");
  ScoreMapPair maps{FloatImage(static_cast<int>(w), static_cast<int>(h)),
                    FloatImage(static_cast<int>(w), static_cast<int>(h))};
  for (auto* plane : {&maps.character, &maps.affinity}) {
    for (auto& v : plane->data) {
      v = r.f32();
      if (!(v >= 0.0f && v <= 1.0f)) throw InputError(what + ": score outside [0, 1]");
    }
  }
  return maps;
}

inline void save_score_maps(const std::string& path, const ScoreMapPair& maps) {
  binfmt::write_file(path, serialize_score_maps(maps));
}

inline ScoreMapPair load_score_maps(const std::string& path) {
  const auto bytes = binfmt::read_file(path);
  return parse_score_maps(bytes, path);
}

}  // namespace screenseg
