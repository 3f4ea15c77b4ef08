#pragma once

// Image-processing text extraction: mask detected image regions, binarize,
// take Canny edges, dilate to the requested granularity, box the connected
// components and merge/prune the boxes.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "screenseg/block.hpp"
#include "screenseg/raster.hpp"

namespace screenseg {

enum class Granularity { Character, Word, Line };

struct DilationKernel {
  int kw = 1;
  int kh = 1;
};

/// Word = 7x3, Line = 21x3, Character = none at 1080 px width; scaled
/// linearly with width and kept odd.
inline DilationKernel granularity_kernel(Granularity g, int image_width) {
  auto scaled = [&](int k) {
    const int v = static_cast<int>(std::lround(k * image_width / 1080.0));
    return std::max(1, v % 2 == 0 ? v + 1 : v);
  };
  switch (g) {
    case Granularity::Character: return {1, 1};
    case Granularity::Word: return {scaled(7), scaled(3)};
    case Granularity::Line: return {scaled(21), scaled(3)};
  }
  return {1, 1};
}

namespace detail {

/// Gap between two intervals; negative when they overlap.
inline double interval_gap(double a0, double a1, double b0, double b1) { return std::max(b0 - a1, a0 - b1); }

inline double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace detail

/// Near-merge rule. A negative hgap means "0.6 * the shorter box height".
struct NearMerge {
  double hgap = -1.0;
  double gap_height_frac = 0.6;
  double voverlap = 0.5;

  bool near(const Rect& a, const Rect& b) const {
    if (intersects(a, b)) return true;
    const double limit = hgap >= 0 ? hgap : gap_height_frac * std::min(a.h(), b.h());
    const double hg = detail::interval_gap(a.x(), a.right(), b.x(), b.right());
    const double vo = detail::interval_overlap(a.y(), a.bottom(), b.y(), b.bottom());
    if (hg <= limit && vo >= voverlap * std::min(a.h(), b.h())) return true;
    const double vg = detail::interval_gap(a.y(), a.bottom(), b.y(), b.bottom());
    const double ho = detail::interval_overlap(a.x(), a.right(), b.x(), b.right());
    return vg <= limit && ho >= voverlap * std::min(a.w(), b.w());
  }
};

/// Unions near boxes until no pair is near. Box i absorbs every later box it
/// is near, rescanning after each growth; passes repeat until nothing merges.
/// Output is sorted top-to-bottom, then left-to-right.
inline std::vector<Rect> merge_near_blocks(std::vector<Rect> boxes, const NearMerge& rule) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      std::size_t j = i + 1;
      while (j < boxes.size()) {
        if (rule.near(boxes[i], boxes[j])) {
          boxes[i] = union_rect(boxes[i], boxes[j]);
          boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          j = i + 1;
        } else {
          ++j;
        }
      }
    }
  }
  std::sort(boxes.begin(), boxes.end(), [](const Rect& a, const Rect& b) {
    if (a.y() != b.y()) return a.y() < b.y();
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.w() != b.w()) return a.w() < b.w();
    return a.h() < b.h();
  });
  return boxes;
}

inline std::vector<Rect> merge_near_blocks(std::vector<Rect> boxes, double hgap, double voverlap) {
  if (hgap < 0 || voverlap < 0 || voverlap > 1) {
    throw std::invalid_argument("merge_near_blocks: need hgap >= 0 and voverlap in [0, 1]");
  }
  return merge_near_blocks(std::move(boxes), NearMerge{hgap, 0.6, voverlap});
}

struct TextBlockParams {
  CannyParams canny{};
  NearMerge merge{};
  double max_h_over_w = 5.0;
  double max_w_over_h = 40.0;
  double min_width_frac = 0.008;
  double side_margin_frac = 0.01;
  // Masked regions grow by this many pixels at 1080 px width before filling.
  double mask_pad = 6.0;
  // Below this gap between the Otsu class means the page has no text.
  double min_contrast = 48.0;
  // Components larger than this (at 1080 px width) whose pixels fill less
  // than hollow_fill of their box are frames, not text.
  double hollow_min_side = 48.0;
  double hollow_fill = 0.5;
  // Boxes touching a padded mask and spanning this much of its side are dropped.
  double residue_frac = 0.6;
};

namespace detail {

inline double otsu_class_gap(const Histogram& hist, int t) {
  long double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
  for (int v = 0; v < 256; ++v) {
    if (v <= t) {
      n0 += hist[v];
      s0 += static_cast<long double>(v) * hist[v];
    } else {
      n1 += hist[v];
      s1 += static_cast<long double>(v) * hist[v];
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  return static_cast<double>(s1 / n1 - s0 / n0);
}

}  // namespace detail

/// Fills every masked region (grown by the configured pad) with the median
/// border color of the image.
inline RgbImage mask_regions(const RgbImage& img, std::span<const Rect> regions, int pad) {
  RgbImage out = img;
  const Rgb fill = median_border_color(img);
  for (const auto& r : regions) {
    auto s = to_pixels(r, img.width, img.height);
    s.x0 = std::max(0, s.x0 - pad);
    s.y0 = std::max(0, s.y0 - pad);
    s.x1 = std::min(img.width, s.x1 + pad);
    s.y1 = std::min(img.height, s.y1 + pad);
    fill_span(out, s, fill);
  }
  return out;
}

/// Text blocks outside the masked regions. Boxes are the tight extent of the
/// Canny edge pixels of each dilated component.
inline std::vector<Block> extract_text_blocks(const RgbImage& img, std::span<const Rect> image_blocks, Granularity g,
                                              const TextBlockParams& p = {}) {
  const double scale = img.width / 1080.0;
  const int pad = static_cast<int>(std::lround(p.mask_pad * scale));
  const GrayImage gray = to_gray(mask_regions(img, image_blocks, pad));
  const auto hist = histogram(gray);
  const int t = otsu_threshold(hist);
  if (detail::otsu_class_gap(hist, t) < p.min_contrast) return {};

  const BinaryMask edges = canny(mask_to_gray(threshold(gray, t, false)), p.canny);
  const auto k = granularity_kernel(g, img.width);
  const BinaryMask grown = (k.kw > 1 || k.kh > 1) ? dilate(edges, k.kw, k.kh) : edges;
  const auto labels = label_components(grown, 8);

  const std::size_t n = labels.components.size();
  std::vector<int> x0(n, img.width), y0(n, img.height), x1(n, -1), y1(n, -1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const auto i = edges.index(x, y);
      if (!edges.data[i]) continue;
      const auto l = labels.labels[i];
      x0[l] = std::min(x0[l], x);
      y0[l] = std::min(y0[l], y);
      x1[l] = std::max(x1[l], x);
      y1[l] = std::max(y1[l], y);
    }
  }

  const double hollow_side = p.hollow_min_side * scale;
  std::vector<Rect> boxes;
  for (std::size_t i = 0; i < n; ++i) {
    if (x1[i] < 0) continue;
    const auto& c = labels.components[i];
    const bool big = c.box.w() >= hollow_side && c.box.h() >= hollow_side;
    if (big && static_cast<double>(c.pixels) < p.hollow_fill * c.box.area()) continue;
    boxes.emplace_back(x0[i], y0[i], x1[i] - x0[i] + 1, y1[i] - y0[i] + 1);
  }
  boxes = merge_near_blocks(std::move(boxes), p.merge);

  const double margin = p.side_margin_frac * img.width;
  std::vector<Block> out;
  for (const auto& b : boxes) {
    if (b.h() / b.w() > p.max_h_over_w || b.w() / b.h() > p.max_w_over_h) continue;
    if (b.w() < p.min_width_frac * img.width) continue;
    if (b.right() <= margin || b.x() >= img.width - margin) continue;
    // Thin boxes, or boxes running along most of a side, that touch the
    // padded mask are what is left of a block the mask did not quite cover.
    const bool residue = std::any_of(image_blocks.begin(), image_blocks.end(), [&](const Rect& m) {
      if (intersection_area(m, b) > 0.1 * b.area()) return true;
      const double r = pad + 2.0;
      if (!intersects(Rect::from_edges(m.x() - r, m.y() - r, m.right() + r, m.bottom() + r), b)) return false;
      return std::min(b.w(), b.h()) <= r + 3.0 ||
             detail::interval_overlap(b.x(), b.right(), m.x(), m.right()) >= p.residue_frac * m.w() ||
             detail::interval_overlap(b.y(), b.bottom(), m.y(), m.bottom()) >= p.residue_frac * m.h();
    });
    if (residue) continue;
    out.push_back(Block{b, BlockClass::Text, 1.0, Source::Ip, false});
  }
  return out;
}

}  // namespace screenseg
