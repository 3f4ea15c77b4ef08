#pragma once

// Model-free stand-in for the detector: textured tiles become Image
// proposals, compact solid dark components become Icons, and rows of small
// dark components become Text.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "screenseg/block.hpp"
#include "screenseg/raster.hpp"
#include "screenseg/textblocks.hpp"

namespace screenseg {

struct HeuristicParams {
  int tile = 16;                 // at 1080 px width
  int texture_levels = 10;       // distinct gray values that make a tile textured
  double dark_contrast = 48.0;   // foreground = this much darker than the border median
  double icon_min_side = 40.0;   // at 1080 px width
  double icon_max_aspect = 1.6;
  double icon_min_fill = 0.3;
  double image_score = 0.9;
  double icon_score = 0.8;
  double text_score = 0.6;
};

namespace detail {

inline BinaryMask textured_tiles(const GrayImage& g, int tile, int levels) {
  const int tw = (g.width + tile - 1) / tile;
  const int th = (g.height + tile - 1) / tile;
  BinaryMask m(tw, th);
  std::array<std::uint8_t, 256> seen{};
  for (int ty = 0; ty < th; ++ty) {
    for (int tx = 0; tx < tw; ++tx) {
      seen.fill(0);
      int distinct = 0;
      const int y1 = std::min(g.height, (ty + 1) * tile), x1 = std::min(g.width, (tx + 1) * tile);
      for (int y = ty * tile; y < y1 && distinct < levels; ++y) {
        for (int x = tx * tile; x < x1; ++x) {
          auto& s = seen[g.at(x, y)];
          if (!s) {
            s = 1;
            ++distinct;
          }
        }
      }
      m.set(tx, ty, distinct >= levels);
    }
  }
  return m;
}

}  // namespace detail

inline std::vector<Proposal> heuristic_detect(const RgbImage& img, const HeuristicParams& p = {}) {
  const double scale = img.width / 1080.0;
  const int tile = std::max(4, static_cast<int>(std::lround(p.tile * scale)));
  const GrayImage gray = to_gray(img);
  std::vector<Proposal> out;

  // Images: 8-connected groups of textured tiles, at least 2x2 tiles.
  std::vector<Rect> images;
  for (const auto& c : connected_component_boxes(detail::textured_tiles(gray, tile, p.texture_levels), 8)) {
    if (c.box.w() < 2 || c.box.h() < 2) continue;
    const auto r = clip_to(Rect(c.box.x() * tile, c.box.y() * tile, c.box.w() * tile, c.box.h() * tile),
                           img.width, img.height);
    if (!r) continue;
    images.push_back(*r);
    out.push_back(Proposal{*r, BlockClass::Image, p.image_score});
  }

  // Dark foreground outside images.
  const int bg = luma(median_border_color(img));
  BinaryMask fg(img.width, img.height);
  for (std::size_t i = 0; i < gray.data.size(); ++i) fg.data[i] = gray.data[i] + p.dark_contrast < bg ? 1 : 0;
  for (const auto& r : images) {
    const auto s = to_pixels(r, img.width, img.height);
    for (int y = s.y0; y < s.y1; ++y) {
      for (int x = s.x0; x < s.x1; ++x) fg.set(x, y, false);
    }
  }

  const double icon_side = p.icon_min_side * scale;
  std::vector<Rect> glyphs;
  for (const auto& c : connected_component_boxes(fg, 8)) {
    const auto& b = c.box;
    const double fill = static_cast<double>(c.pixels) / b.area();
    const double aspect = std::max(b.w() / b.h(), b.h() / b.w());
    if (b.w() >= icon_side && b.h() >= icon_side) {
      if (aspect <= p.icon_max_aspect && fill >= p.icon_min_fill) {
        out.push_back(Proposal{b, BlockClass::Icon, p.icon_score});
      }
      continue;  // large hollow shapes are borders, left to the grid stage
    }
    glyphs.push_back(b);
  }
  for (const auto& r : merge_near_blocks(std::move(glyphs), NearMerge{-1.0, 1.0, 0.5})) {
    if (r.w() < 2 * r.h()) continue;
    out.push_back(Proposal{r, BlockClass::Text, p.text_score});
  }
  return out;
}

}  // namespace screenseg
