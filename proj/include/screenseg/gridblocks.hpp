#pragma once

// Grid identification: prominent bordered segments from a weighted mix of the
// median-blurred, contrast-enhanced and Laplacian-filtered gray image.

#include <algorithm>
#include <cmath>
#include <vector>

#include "screenseg/block.hpp"
#include "screenseg/raster.hpp"

namespace screenseg {

struct GridParams {
  int median_k = 3;
  double clahe_clip = 2.0;
  int clahe_tile = 8;
  double w_median = 0.1;
  double w_clahe = 0.1;
  double w_laplacian = 0.8;
  bool invert = false;
  // Closing (dilate then erode) that joins speckled edge responses of
  // textured regions; 1 disables.
  int close_kernel = 3;
  double min_area_frac = 0.005;
  double min_aspect = 1.0 / 20.0;
  double max_aspect = 20.0;
  double max_area_frac = 0.9;
  // Each side of a box is re-seated on the outermost line (within this many
  // pixels) that differs from the background just outside it; 0 disables.
  int snap_radius = 2;
};

inline GrayImage grid_edge_image(const GrayImage& gray, const GridParams& p = {}) {
  return weighted_sum(median_blur(gray, p.median_k), clahe(gray, p.clahe_clip, p.clahe_tile), laplacian(gray),
                      p.w_median, p.w_clahe, p.w_laplacian);
}

/// Unions intersecting boxes until the set is pairwise disjoint.
inline std::vector<Rect> union_intersecting(std::vector<Rect> boxes) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      std::size_t j = i + 1;
      while (j < boxes.size()) {
        if (intersects(boxes[i], boxes[j])) {
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
  return boxes;
}

namespace detail {

/// Mean |gray(line a) - gray(line b)| along a column (vertical = true) or row
/// pair, restricted to [from, to).
inline double line_difference(const GrayImage& g, bool vertical, int a, int b, int from, int to) {
  if (to <= from) return 0.0;
  double sum = 0;
  for (int t = from; t < to; ++t) {
    const int va = vertical ? g.at(a, t) : g.at(t, a);
    const int vb = vertical ? g.at(b, t) : g.at(t, b);
    sum += std::abs(va - vb);
  }
  return sum / (to - from);
}

/// Outermost line within `radius` of `edge` (moving inward from the outside)
/// whose content departs from the reference line just beyond the window by at
/// least half the strongest departure. `dir` is +1 for left/top sides (inward
/// = increasing), -1 for right/bottom sides.
inline int snap_side(const GrayImage& g, bool vertical, int edge, int dir, int radius, int from, int to) {
  const int limit = vertical ? g.width : g.height;
  const int ref = edge - dir * (radius + 1);
  if (ref < 0 || ref >= limit) return edge;
  std::vector<double> diff;
  double best = 0;
  for (int k = -radius; k <= radius; ++k) {
    const int line = edge + dir * k;
    const double d = (line < 0 || line >= limit) ? 0.0 : line_difference(g, vertical, line, ref, from, to);
    diff.push_back(d);
    best = std::max(best, d);
  }
  if (best < 8.0) return edge;
  for (int k = -radius; k <= radius; ++k) {
    if (diff[k + radius] >= 0.5 * best) return edge + dir * k;
  }
  return edge;
}

/// Re-seats the four sides of an integer pixel box [x0, x1] x [y0, y1].
inline Rect snap_box(const GrayImage& g, const Rect& r, int radius) {
  int x0 = static_cast<int>(r.x()), y0 = static_cast<int>(r.y());
  int x1 = static_cast<int>(r.right()) - 1, y1 = static_cast<int>(r.bottom()) - 1;
  // sample the interior span of each side so corners do not dominate
  const int nx0 = snap_side(g, true, x0, +1, radius, y0 + radius + 1, y1 - radius);
  const int nx1 = snap_side(g, true, x1, -1, radius, y0 + radius + 1, y1 - radius);
  const int ny0 = snap_side(g, false, y0, +1, radius, x0 + radius + 1, x1 - radius);
  const int ny1 = snap_side(g, false, y1, -1, radius, x0 + radius + 1, x1 - radius);
  if (nx1 < nx0 || ny1 < ny0) return r;
  return Rect(nx0, ny0, nx1 - nx0 + 1, ny1 - ny0 + 1);
}

}  // namespace detail

/// Grid blocks ordered by area, largest first; pairwise disjoint and each at
/// most max_area_frac of the image.
inline std::vector<Block> find_grid_blocks(const RgbImage& img, const GridParams& p = {}) {
  const GrayImage gray = to_gray(img);
  const GrayImage mixed = grid_edge_image(gray, p);
  const auto hist = histogram(mixed);
  const int t = otsu_threshold(hist);
  BinaryMask fg = threshold(mixed, t, p.invert);
  if (fg.count() == 0) return {};
  if (p.close_kernel > 1) fg = erode(dilate(fg, p.close_kernel, p.close_kernel), p.close_kernel, p.close_kernel);

  const double image_area = static_cast<double>(img.width) * img.height;
  std::vector<Rect> boxes;
  for (const auto& c : connected_component_boxes(fg, 8)) {
    const auto& b = c.box;
    if (b.area() < p.min_area_frac * image_area) continue;
    const double aspect = b.w() / b.h();
    if (aspect < p.min_aspect || aspect > p.max_aspect) continue;
    boxes.push_back(p.snap_radius > 0 ? detail::snap_box(gray, b, p.snap_radius) : b);
  }
  boxes = union_intersecting(std::move(boxes));

  std::vector<Block> out;
  for (const auto& b : boxes) {
    if (b.area() > p.max_area_frac * image_area) continue;
    out.push_back(Block{b, BlockClass::Grid, 1.0, Source::Grid, false});
  }
  std::stable_sort(out.begin(), out.end(), [](const Block& a, const Block& b) {
    if (a.rect.area() != b.rect.area()) return a.rect.area() > b.rect.area();
    if (a.rect.y() != b.rect.y()) return a.rect.y() < b.rect.y();
    return a.rect.x() < b.rect.x();
  });
  return out;
}

}  // namespace screenseg
