#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace screenseg {

/// Axis-aligned rectangle in continuous pixel coordinates. The covered region
/// is half-open: [x, x + w) x [y, y + h). Width and height are always positive.
class Rect {
 public:
  Rect(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
    if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(x) || !std::isfinite(y) ||
        !std::isfinite(w) || !std::isfinite(h)) {
      throw std::invalid_argument("Rect requires finite coordinates and positive size, got [" +
                                  std::to_string(x) + ", " + std::to_string(y) + ", " +
                                  std::to_string(w) + ", " + std::to_string(h) + "]");
    }
  }

  static Rect from_center(double cx, double cy, double w, double h) {
    return Rect(cx - w / 2.0, cy - h / 2.0, w, h);
  }

  /// Builds a rect from edges; throws if the span is empty.
  static Rect from_edges(double left, double top, double right, double bottom) {
    return Rect(left, top, right - left, bottom - top);
  }

  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double right() const { return x_ + w_; }
  double bottom() const { return y_ + h_; }
  double cx() const { return x_ + w_ / 2.0; }
  double cy() const { return y_ + h_ / 2.0; }
  double area() const { return w_ * h_; }

  bool operator==(const Rect&) const = default;

 private:
  double x_;
  double y_;
  double w_;
  double h_;
};

inline double intersection_area(const Rect& a, const Rect& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x(), b.x());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y(), b.y());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

/// True iff the rects share positive area. Touching edges do not count.
inline bool intersects(const Rect& a, const Rect& b) { return intersection_area(a, b) > 0.0; }

inline double iou(const Rect& a, const Rect& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline Rect union_rect(const Rect& a, const Rect& b) {
  return Rect::from_edges(std::min(a.x(), b.x()), std::min(a.y(), b.y()),
                          std::max(a.right(), b.right()), std::max(a.bottom(), b.bottom()));
}

/// Fraction of `inner` covered by `outer`.
inline double contains_frac(const Rect& outer, const Rect& inner) {
  return std::clamp(intersection_area(outer, inner) / inner.area(), 0.0, 1.0);
}

/// Clips `r` to [0, width) x [0, height); nullopt when nothing remains.
inline std::optional<Rect> clip_to(const Rect& r, double width, double height) {
  const double l = std::max(0.0, r.x());
  const double t = std::max(0.0, r.y());
  const double rr = std::min(width, r.right());
  const double bb = std::min(height, r.bottom());
  if (rr <= l || bb <= t) return std::nullopt;
  return Rect::from_edges(l, t, rr, bb);
}

/// Integer pixel span covered by a rect after round-half-up of its edges,
/// clamped to an image of the given size. Empty spans have x1 <= x0.
struct PixelSpan {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool empty() const { return x1 <= x0 || y1 <= y0; }
};

inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

inline PixelSpan to_pixels(const Rect& r, int width, int height) {
  PixelSpan s;
  s.x0 = std::clamp(round_half_up(r.x()), 0, width);
  s.y0 = std::clamp(round_half_up(r.y()), 0, height);
  s.x1 = std::clamp(round_half_up(r.right()), 0, width);
  s.y1 = std::clamp(round_half_up(r.bottom()), 0, height);
  return s;
}

}  // namespace screenseg
