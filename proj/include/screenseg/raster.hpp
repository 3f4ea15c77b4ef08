#pragma once

// From-scratch raster primitives: grayscale conversion, Otsu thresholding,
// median blur, CLAHE, Laplacian, Canny, binary morphology and connected
// components. Everything is deterministic and single-threaded.
//
// Border conventions: convolutions and rank filters replicate edge pixels;
// morphology treats pixels outside the image as neutral (they never set a
// dilated pixel and never clear an eroded one).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "screenseg/error.hpp"
#include "screenseg/geometry.hpp"

namespace screenseg {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

template <class T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h) {
    if (w < 1 || h < 1) {
      throw InputError("image dimensions must be positive, got " + std::to_string(w) + "x" +
                       std::to_string(h));
    }
    data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  T& at(int x, int y) { return data[index(x, y)]; }
  const T& at(int x, int y) const { return data[index(x, y)]; }
  const T& at_clamped(int x, int y) const {
    return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool same_size(int w, int h) const { return width == w && height == h; }

  bool operator==(const Image&) const = default;
};

using RgbImage = Image<Rgb>;
using GrayImage = Image<std::uint8_t>;
using FloatImage = Image<float>;

/// Row-major boolean raster stored as 0/1 bytes.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false) : width(w), height(h) {
    if (w < 1 || h < 1) throw InputError("mask dimensions must be positive");
    data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill ? 1 : 0);
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool get(int x, int y) const { return data[index(x, y)] != 0; }
  void set(int x, int y, bool v) { data[index(x, y)] = v ? 1 : 0; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
  }

  bool operator==(const BinaryMask&) const = default;
};

inline BinaryMask operator!(const BinaryMask& m) {
  BinaryMask out = m;
  for (auto& v : out.data) v = v ? 0 : 1;
  return out;
}

inline std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(round_half_up(v), 0, 255));
}

// ---------------------------------------------------------------------------
// Gray conversion and thresholding

inline std::uint8_t luma(const Rgb& p) { return clamp_u8(0.299 * p.r + 0.587 * p.g + 0.114 * p.b); }

inline GrayImage to_gray(const RgbImage& img) {
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = luma(img.data[i]);
  return out;
}

inline RgbImage gray_to_rgb(const GrayImage& img) {
  RgbImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const auto v = img.data[i];
    out.data[i] = Rgb{v, v, v};
  }
  return out;
}

using Histogram = std::array<std::uint64_t, 256>;

inline Histogram histogram(const GrayImage& img) {
  Histogram h{};
  for (auto v : img.data) ++h[v];
  return h;
}

/// Otsu's threshold: the smallest t maximizing the between-class variance of
/// the split {v <= t} / {v > t}. Histograms with a single occupied bin return
/// that bin.
inline int otsu_threshold(const Histogram& hist) {
  std::uint64_t total = 0;
  long double sum_all = 0;
  int lo = -1;
  int hi = -1;
  for (int v = 0; v < 256; ++v) {
    if (hist[v] == 0) continue;
    total += hist[v];
    sum_all += static_cast<long double>(v) * hist[v];
    if (lo < 0) lo = v;
    hi = v;
  }
  if (total == 0) return 0;
  if (lo == hi) return lo;

  const long double n = static_cast<long double>(total);
  std::uint64_t n0 = 0;
  long double s0 = 0;
  long double best = -1;
  int best_t = lo;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[t];
    s0 += static_cast<long double>(t) * hist[t];
    if (n0 == 0 || n0 == total) continue;
    // n^2 * sigma_b^2 = (S*n0 - n*s0)^2 / (n0 * (n - n0))
    const long double d = sum_all * n0 - n * s0;
    const long double var = d * d / (static_cast<long double>(n0) * (n - n0));
    if (var > best) {
      best = var;
      best_t = t;
    }
  }
  return best_t;
}

inline int otsu_threshold(const GrayImage& img) { return otsu_threshold(histogram(img)); }

inline BinaryMask threshold(const GrayImage& img, int t, bool invert) {
  BinaryMask m(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const bool above = img.data[i] > t;
    m.data[i] = (above != invert) ? 1 : 0;
  }
  return m;
}

/// Pixel is set iff (value > otsu_threshold) XOR invert. A constant image has
/// threshold equal to its value, so the mask is empty (full when inverted).
inline BinaryMask otsu_binarize(const GrayImage& img, bool invert = false) {
  return threshold(img, otsu_threshold(img), invert);
}

inline GrayImage mask_to_gray(const BinaryMask& m) {
  GrayImage out(m.width, m.height);
  for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = m.data[i] ? 255 : 0;
  return out;
}

// ---------------------------------------------------------------------------
// Filters

/// k x k median with edge replication (Huang's sliding histogram).
inline GrayImage median_blur(const GrayImage& img, int k) {
  if (k < 3 || k % 2 == 0) {
    throw std::invalid_argument("median_blur: kernel size must be odd and >= 3, got " + std::to_string(k));
  }
  const int r = k / 2;
  const int half = (k * k) / 2;  // 0-based rank of the median
  GrayImage out(img.width, img.height);
  std::array<int, 256> hist{};
  for (int y = 0; y < img.height; ++y) {
    hist.fill(0);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) ++hist[img.at_clamped(dx, y + dy)];
    }
    int med = 0;
    int below = 0;
    while (below + hist[med] <= half) below += hist[med++];
    out.at(0, y) = static_cast<std::uint8_t>(med);

    for (int x = 1; x < img.width; ++x) {
      const int xo = x - r - 1;
      const int xi = x + r;
      for (int dy = -r; dy <= r; ++dy) {
        const int vo = img.at_clamped(xo, y + dy);
        const int vi = img.at_clamped(xi, y + dy);
        --hist[vo];
        if (vo < med) --below;
        ++hist[vi];
        if (vi < med) ++below;
      }
      while (below > half) below -= hist[--med];
      while (below + hist[med] <= half) below += hist[med++];
      out.at(x, y) = static_cast<std::uint8_t>(med);
    }
  }
  return out;
}

namespace detail {

/// Per-axis interpolation between tile centers.
struct TileInterp {
  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<float> w_hi;
};

inline TileInterp tile_interp(int extent, int tile, int ntiles) {
  TileInterp ti;
  ti.lo.resize(extent);
  ti.hi.resize(extent);
  ti.w_hi.resize(extent);
  std::vector<double> centers(ntiles);
  for (int i = 0; i < ntiles; ++i) {
    const int a = i * tile;
    const int b = std::min(extent, a + tile);
    centers[i] = 0.5 * (a + b);
  }
  int i = 0;
  for (int p = 0; p < extent; ++p) {
    const double c = p + 0.5;
    while (i + 1 < ntiles && centers[i + 1] <= c) ++i;
    if (c <= centers[0]) {
      ti.lo[p] = ti.hi[p] = 0;
      ti.w_hi[p] = 0.0f;
    } else if (i + 1 >= ntiles) {
      ti.lo[p] = ti.hi[p] = ntiles - 1;
      ti.w_hi[p] = 0.0f;
    } else {
      ti.lo[p] = i;
      ti.hi[p] = i + 1;
      ti.w_hi[p] = static_cast<float>((c - centers[i]) / (centers[i + 1] - centers[i]));
    }
  }
  return ti;
}

}  // namespace detail

/// Equalization mapping of one tile: clipped histogram (limit = clip * area /
/// 256, excess spread evenly over all bins), cumulated and scaled to [0, 255].
inline std::array<float, 256> clahe_tile_mapping(const Histogram& hist, double clip) {
  double area = 0;
  for (auto c : hist) area += static_cast<double>(c);
  std::array<float, 256> lut{};
  if (area <= 0) return lut;
  const double limit = clip * area / 256.0;
  std::array<double, 256> h{};
  double excess = 0;
  for (int v = 0; v < 256; ++v) {
    const double c = static_cast<double>(hist[v]);
    h[v] = std::min(c, limit);
    excess += c - h[v];
  }
  const double spread = excess / 256.0;
  double cdf = 0;
  for (int v = 0; v < 256; ++v) {
    cdf += h[v] + spread;
    lut[v] = static_cast<float>(std::clamp(cdf * 255.0 / area, 0.0, 255.0));
  }
  return lut;
}

/// Contrast-limited adaptive histogram equalization over square tiles of
/// `tile` pixels (ceiling partition), bilinearly blending the mappings of the
/// four nearest tile centers.
inline GrayImage clahe(const GrayImage& img, double clip = 2.0, int tile = 8) {
  if (!(clip > 0)) throw std::invalid_argument("clahe: clip limit must be positive");
  if (tile < 1) throw std::invalid_argument("clahe: tile size must be positive");
  const int ntx = (img.width + tile - 1) / tile;
  const int nty = (img.height + tile - 1) / tile;
  std::vector<std::array<float, 256>> luts(static_cast<std::size_t>(ntx) * nty);
  for (int ty = 0; ty < nty; ++ty) {
    for (int tx = 0; tx < ntx; ++tx) {
      Histogram h{};
      const int y1 = std::min(img.height, (ty + 1) * tile);
      const int x1 = std::min(img.width, (tx + 1) * tile);
      for (int y = ty * tile; y < y1; ++y) {
        for (int x = tx * tile; x < x1; ++x) ++h[img.at(x, y)];
      }
      luts[static_cast<std::size_t>(ty) * ntx + tx] = clahe_tile_mapping(h, clip);
    }
  }
  const auto ix = detail::tile_interp(img.width, tile, ntx);
  const auto iy = detail::tile_interp(img.height, tile, nty);
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    const auto* row_lo = &luts[static_cast<std::size_t>(iy.lo[y]) * ntx];
    const auto* row_hi = &luts[static_cast<std::size_t>(iy.hi[y]) * ntx];
    const float wy = iy.w_hi[y];
    for (int x = 0; x < img.width; ++x) {
      const int v = img.at(x, y);
      const float wx = ix.w_hi[x];
      const float top = (1 - wx) * row_lo[ix.lo[x]][v] + wx * row_lo[ix.hi[x]][v];
      const float bot = (1 - wx) * row_hi[ix.lo[x]][v] + wx * row_hi[ix.hi[x]][v];
      out.at(x, y) = clamp_u8((1 - wy) * top + wy * bot);
    }
  }
  return out;
}

/// 4-neighbour Laplacian [[0,1,0],[1,-4,1],[0,1,0]], signed.
inline FloatImage laplacian(const GrayImage& img) {
  FloatImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int c = img.at(x, y);
      const int s = img.at_clamped(x - 1, y) + img.at_clamped(x + 1, y) + img.at_clamped(x, y - 1) +
                    img.at_clamped(x, y + 1);
      out.at(x, y) = static_cast<float>(s - 4 * c);
    }
  }
  return out;
}

/// round(wa*a + wb*b + wc*min(|c|, 255)), clamped to [0, 255].
inline GrayImage weighted_sum(const GrayImage& a, const GrayImage& b, const FloatImage& c, double wa,
                              double wb, double wc) {
  if (!b.same_size(a.width, a.height) || !c.same_size(a.width, a.height)) {
    throw InputError("weighted_sum: image dimensions differ");
  }
  if (wa < 0 || wb < 0 || wc < 0 || std::abs(wa + wb + wc - 1.0) > 1e-9) {
    throw std::invalid_argument("weighted_sum: weights must be non-negative and sum to 1");
  }
  GrayImage out(a.width, a.height);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double cv = std::min(255.0, std::abs(static_cast<double>(c.data[i])));
    out.data[i] = clamp_u8(wa * a.data[i] + wb * b.data[i] + wc * cv);
  }
  return out;
}

/// Separable Gaussian with a (2r+1)-tap kernel and edge replication.
inline FloatImage gaussian_blur(const GrayImage& img, double sigma, int radius) {
  std::vector<float> k(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);

  FloatImage tmp(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      float acc = 0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * img.at_clamped(x + i, y);
      tmp.at(x, y) = acc;
    }
  }
  FloatImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      float acc = 0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp.at_clamped(x, y + i);
      out.at(x, y) = acc;
    }
  }
  return out;
}

struct CannyParams {
  double low = 50.0;
  double high = 150.0;
  double sigma = 1.4;
};

/// Canny edges: 5x5 Gaussian, Sobel gradients, non-maximum suppression along
/// the gradient direction quantized to 4 bins, and 8-connected hysteresis.
inline BinaryMask canny(const GrayImage& img, const CannyParams& p = {}) {
  if (!(p.low >= 0) || !(p.low < p.high)) {
    throw std::invalid_argument("canny: thresholds must satisfy 0 <= low < high");
  }
  const int w = img.width;
  const int h = img.height;
  const FloatImage s = gaussian_blur(img, p.sigma, 2);

  FloatImage mag(w, h);
  std::vector<std::uint8_t> dir(static_cast<std::size_t>(w) * h);
  constexpr float kTan22 = 0.41421356f;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto v = [&](int dx, int dy) { return s.at_clamped(x + dx, y + dy); };
      const float gx = (v(1, -1) + 2 * v(1, 0) + v(1, 1)) - (v(-1, -1) + 2 * v(-1, 0) + v(-1, 1));
      const float gy = (v(-1, 1) + 2 * v(0, 1) + v(1, 1)) - (v(-1, -1) + 2 * v(0, -1) + v(1, -1));
      mag.at(x, y) = std::hypot(gx, gy);
      const float ax = std::abs(gx);
      const float ay = std::abs(gy);
      std::uint8_t d;
      if (ay <= kTan22 * ax) {
        d = 0;  // horizontal gradient: compare left/right
      } else if (ax <= kTan22 * ay) {
        d = 2;  // vertical gradient: compare up/down
      } else {
        d = (gx * gy > 0) ? 1 : 3;
      }
      dir[mag.index(x, y)] = d;
    }
  }

  auto m = [&](int x, int y) -> float { return mag.contains(x, y) ? mag.at(x, y) : 0.0f; };
  // 0 = none, 1 = weak, 2 = strong
  std::vector<std::uint8_t> cls(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float c = mag.at(x, y);
      if (c < p.low) continue;
      float a = 0;
      float b = 0;
      switch (dir[mag.index(x, y)]) {
        case 0: a = m(x - 1, y); b = m(x + 1, y); break;
        case 2: a = m(x, y - 1); b = m(x, y + 1); break;
        case 1: a = m(x - 1, y - 1); b = m(x + 1, y + 1); break;
        default: a = m(x + 1, y - 1); b = m(x - 1, y + 1); break;
      }
      if (c > a && c >= b) {
        const auto idx = mag.index(x, y);
        cls[idx] = c >= p.high ? 2 : 1;
        if (cls[idx] == 2) stack.push_back(static_cast<int>(idx));
      }
    }
  }

  BinaryMask out(w, h);
  for (int idx : stack) out.data[idx] = 1;
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const int x = idx % w;
    const int y = idx / w;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (!out.contains(nx, ny)) continue;
        const auto n = out.index(nx, ny);
        if (cls[n] != 0 && !out.data[n]) {
          out.data[n] = 1;
          stack.push_back(static_cast<int>(n));
        }
      }
    }
  }
  return out;
}

inline BinaryMask canny(const GrayImage& img, double low, double high) {
  return canny(img, CannyParams{low, high, 1.4});
}

// ---------------------------------------------------------------------------
// Morphology

/// Rectangular dilation with a kw x kh structuring element (both odd).
inline BinaryMask dilate(const BinaryMask& m, int kw, int kh) {
  if (kw < 1 || kh < 1 || kw % 2 == 0 || kh % 2 == 0) {
    throw std::invalid_argument("dilate/erode: kernel sizes must be odd and >= 1");
  }
  const int rw = kw / 2;
  const int rh = kh / 2;
  const int w = m.width;
  const int h = m.height;
  BinaryMask horiz(w, h);
  std::vector<int> prefix(static_cast<std::size_t>(w) + 1);
  for (int y = 0; y < h; ++y) {
    prefix[0] = 0;
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + m.data[m.index(x, y)];
    for (int x = 0; x < w; ++x) {
      const int a = std::max(0, x - rw);
      const int b = std::min(w, x + rw + 1);
      horiz.data[horiz.index(x, y)] = prefix[b] - prefix[a] > 0 ? 1 : 0;
    }
  }
  BinaryMask out(w, h);
  std::vector<int> colp(static_cast<std::size_t>(h) + 1);
  for (int x = 0; x < w; ++x) {
    colp[0] = 0;
    for (int y = 0; y < h; ++y) colp[y + 1] = colp[y] + horiz.data[horiz.index(x, y)];
    for (int y = 0; y < h; ++y) {
      const int a = std::max(0, y - rh);
      const int b = std::min(h, y + rh + 1);
      out.data[out.index(x, y)] = colp[b] - colp[a] > 0 ? 1 : 0;
    }
  }
  return out;
}

/// Rectangular erosion; exact dual of dilate: erode(m) == !dilate(!m).
inline BinaryMask erode(const BinaryMask& m, int kw, int kh) { return !dilate(!m, kw, kh); }

// ---------------------------------------------------------------------------
// Connected components

struct Component {
  Rect box;
  std::size_t pixels = 0;
};

struct ComponentLabels {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;  // -1 = background, else index into components
  std::vector<Component> components;
};

/// Labels true pixels by 4- or 8-connectivity. Components are numbered in
/// raster order of their first (top-most, then left-most) pixel.
inline ComponentLabels label_components(const BinaryMask& m, int connectivity = 8) {
  if (connectivity != 4 && connectivity != 8) {
    throw std::invalid_argument("connectivity must be 4 or 8");
  }
  ComponentLabels out;
  out.width = m.width;
  out.height = m.height;
  out.labels.assign(m.data.size(), -1);
  std::vector<std::size_t> stack;
  const int w = m.width;
  const int h = m.height;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const auto start = m.index(x0, y0);
      if (!m.data[start] || out.labels[start] >= 0) continue;
      const auto id = static_cast<std::int32_t>(out.components.size());
      int minx = x0, maxx = x0, miny = y0, maxy = y0;
      std::size_t count = 0;
      out.labels[start] = id;
      stack.push_back(start);
      while (!stack.empty()) {
        const auto idx = stack.back();
        stack.pop_back();
        ++count;
        const int x = static_cast<int>(idx % static_cast<std::size_t>(w));
        const int y = static_cast<int>(idx / static_cast<std::size_t>(w));
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const auto n = m.index(nx, ny);
            if (m.data[n] && out.labels[n] < 0) {
              out.labels[n] = id;
              stack.push_back(n);
            }
          }
        }
      }
      out.components.push_back(Component{Rect(minx, miny, maxx - minx + 1, maxy - miny + 1), count});
    }
  }
  return out;
}

/// Tight bounding box and pixel count of each connected component.
inline std::vector<Component> connected_component_boxes(const BinaryMask& m, int connectivity = 8) {
  return label_components(m, connectivity).components;
}

// ---------------------------------------------------------------------------
// Drawing helpers

inline void fill_span(RgbImage& img, const PixelSpan& s, Rgb c) {
  for (int y = s.y0; y < s.y1; ++y) {
    for (int x = s.x0; x < s.x1; ++x) img.at(x, y) = c;
  }
}

/// Draws a rectangle outline of the given thickness inside the rect's span.
inline void draw_outline(RgbImage& img, const Rect& r, Rgb c, int thickness = 1) {
  const auto s = to_pixels(r, img.width, img.height);
  if (s.empty()) return;
  for (int t = 0; t < thickness; ++t) {
    const int x0 = s.x0 + t, x1 = s.x1 - 1 - t, y0 = s.y0 + t, y1 = s.y1 - 1 - t;
    if (x0 > x1 || y0 > y1) break;
    for (int x = x0; x <= x1; ++x) {
      img.at(x, y0) = c;
      img.at(x, y1) = c;
    }
    for (int y = y0; y <= y1; ++y) {
      img.at(x0, y) = c;
      img.at(x1, y) = c;
    }
  }
}

/// Per-channel median of the `frame`-pixel border ring.
inline Rgb median_border_color(const RgbImage& img, int frame = 4) {
  std::array<std::vector<std::uint8_t>, 3> ch;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const bool border = x < frame || y < frame || x >= img.width - frame || y >= img.height - frame;
      if (!border) continue;
      const auto& p = img.at(x, y);
      ch[0].push_back(p.r);
      ch[1].push_back(p.g);
      ch[2].push_back(p.b);
    }
  }
  std::array<std::uint8_t, 3> med{};
  for (int c = 0; c < 3; ++c) {
    auto& v = ch[c];
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    med[c] = v[v.size() / 2];
  }
  return Rgb{med[0], med[1], med[2]};
}

}  // namespace screenseg
