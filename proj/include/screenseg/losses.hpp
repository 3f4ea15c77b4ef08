#pragma once

// Reference implementations of the detector's multi-task loss and the
// score-map logcosh-pool loss, each with an analytic gradient that the
// finite-difference checker below verifies.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "screenseg/error.hpp"
#include "screenseg/raster.hpp"
#include "screenseg/rng.hpp"

namespace screenseg {

/// (cx, cy, w, h) of one matched anchor.
using BoxCoords = std::array<double, 4>;

struct BoxTarget {
  std::vector<BoxCoords> pred;
  std::vector<BoxCoords> truth;
};

struct ConfTarget {
  std::vector<double> pred;   // predicted confidence, [0, 1]
  std::vector<double> truth;  // IoU with ground truth, [0, 1]
};

/// M samples x N classes, row-major.
struct ClassTarget {
  int classes = 0;
  std::vector<double> onehot;
  std::vector<double> prob;

  std::size_t samples() const { return classes > 0 ? onehot.size() / static_cast<std::size_t>(classes) : 0; }
};

struct LossParams {
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<double> class_weights = {1.0, 1.0, 1.0};
};

inline constexpr double kProbEpsilon = 1e-12;

// ---------------------------------------------------------------------------
// Bounding-box regression

inline void check_box_target(const BoxTarget& t) {
  if (t.pred.empty()) throw std::invalid_argument("l_bbox: needs at least one matched anchor");
  if (t.pred.size() != t.truth.size()) throw std::invalid_argument("l_bbox: prediction/truth count mismatch");
}

/// (1/B) * sum of squared center and size deviations.
inline double l_bbox(const BoxTarget& t) {
  check_box_target(t);
  double sum = 0;
  for (std::size_t i = 0; i < t.pred.size(); ++i) {
    for (int k = 0; k < 4; ++k) {
      const double d = t.pred[i][k] - t.truth[i][k];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(t.pred.size());
}

/// d l_bbox / d pred.
inline std::vector<BoxCoords> l_bbox_grad(const BoxTarget& t) {
  check_box_target(t);
  const double scale = 2.0 / static_cast<double>(t.pred.size());
  std::vector<BoxCoords> g(t.pred.size());
  for (std::size_t i = 0; i < t.pred.size(); ++i) {
    for (int k = 0; k < 4; ++k) g[i][k] = scale * (t.pred[i][k] - t.truth[i][k]);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Confidence regression

inline void check_conf_target(const ConfTarget& t) {
  if (t.pred.empty()) throw std::invalid_argument("l_conf: needs at least one anchor");
  if (t.pred.size() != t.truth.size()) throw std::invalid_argument("l_conf: prediction/truth count mismatch");
}

inline double l_conf(const ConfTarget& t) {
  check_conf_target(t);
  double sum = 0;
  for (std::size_t i = 0; i < t.pred.size(); ++i) {
    const double d = t.pred[i] - t.truth[i];
    sum += d * d;
  }
  return sum / static_cast<double>(t.pred.size());
}

inline std::vector<double> l_conf_grad(const ConfTarget& t) {
  check_conf_target(t);
  const double scale = 2.0 / static_cast<double>(t.pred.size());
  std::vector<double> g(t.pred.size());
  for (std::size_t i = 0; i < t.pred.size(); ++i) g[i] = scale * (t.pred[i] - t.truth[i]);
  return g;
}

// ---------------------------------------------------------------------------
// Weighted cross-entropy

inline void check_class_target(const ClassTarget& t, std::span<const double> cw, bool check_rows) {
  if (t.classes < 1) throw std::invalid_argument("l_class: class count must be positive");
  if (t.onehot.size() != t.prob.size() || t.onehot.size() % static_cast<std::size_t>(t.classes) != 0) {
    throw std::invalid_argument("l_class: truth/probability shapes differ");
  }
  if (cw.size() != static_cast<std::size_t>(t.classes)) {
    throw std::invalid_argument("l_class: need one class weight per class");
  }
  for (double w : cw) {
    if (!(w > 0)) throw std::invalid_argument("l_class: class weights must be positive");
  }
  const auto n = static_cast<std::size_t>(t.classes);
  for (std::size_t j = 0; j < t.samples(); ++j) {
    int ones = 0;
    double psum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = t.onehot[j * n + i];
      if (y == 1.0) {
        ++ones;
      } else if (y != 0.0) {
        throw std::invalid_argument("l_class: malformed one-hot row " + std::to_string(j));
      }
      psum += t.prob[j * n + i];
    }
    if (ones != 1) throw std::invalid_argument("l_class: malformed one-hot row " + std::to_string(j));
    if (check_rows && std::abs(psum - 1.0) > 1e-6) {
      throw std::invalid_argument("l_class: probabilities of row " + std::to_string(j) + " do not sum to 1");
    }
  }
}

namespace detail {

inline double l_class_raw(const ClassTarget& t, std::span<const double> cw) {
  const auto n = static_cast<std::size_t>(t.classes);
  double sum = 0;
  for (std::size_t k = 0; k < t.onehot.size(); ++k) {
    if (t.onehot[k] == 0.0) continue;
    sum -= cw[k % n] * t.onehot[k] * std::log(std::max(t.prob[k], kProbEpsilon));
  }
  return sum;
}

}  // namespace detail

/// -sum_j sum_i cw_i * y_ij * log(max(p_ij, 1e-12)).
inline double l_class(const ClassTarget& t, std::span<const double> cw) {
  check_class_target(t, cw, true);
  return detail::l_class_raw(t, cw);
}

/// d l_class / d p, treating every probability as an independent input.
inline std::vector<double> l_class_grad(const ClassTarget& t, std::span<const double> cw) {
  check_class_target(t, cw, false);
  const auto n = static_cast<std::size_t>(t.classes);
  std::vector<double> g(t.prob.size(), 0.0);
  for (std::size_t k = 0; k < t.onehot.size(); ++k) {
    if (t.onehot[k] == 0.0 || t.prob[k] < kProbEpsilon) continue;
    g[k] = -cw[k % n] * t.onehot[k] / t.prob[k];
  }
  return g;
}

inline double l_total(double bbox, double cls, double conf, const LossParams& p) {
  if (!(p.alpha >= 0) || !(p.beta >= 0)) throw std::invalid_argument("l_total: alpha and beta must be >= 0");
  return bbox + p.alpha * cls + p.beta * conf;
}

/// Inverse-frequency weights, normalized so the count-weighted mean weight is 1:
/// cw_c = total / (C * count_c).
inline std::vector<double> class_weights_from_counts(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("class weights: no classes");
  double total = 0;
  for (auto c : counts) {
    if (c == 0) throw std::invalid_argument("class weights: every class needs at least one sample");
    total += static_cast<double>(c);
  }
  std::vector<double> w;
  for (auto c : counts) w.push_back(total / (static_cast<double>(counts.size()) * static_cast<double>(c)));
  return w;
}

// ---------------------------------------------------------------------------
// logcosh-pool

/// log(cosh(d)) without overflow.
inline double logcosh(double d) {
  const double a = std::abs(d);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

namespace detail {

template <class T>
void check_pool_inputs(const Image<T>& pred, const Image<T>& truth) {
  if (!pred.same_size(truth.width, truth.height)) throw std::invalid_argument("logcosh_pool: map sizes differ");
  if (pred.width % 2 != 0 || pred.height % 2 != 0) {
    throw std::invalid_argument("logcosh_pool: map dimensions must be even");
  }
}

template <class T>
double pooled_diff(const Image<T>& pred, const Image<T>& truth, int px, int py) {
  double d = 0;
  for (int dy = 0; dy < 2; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      d += static_cast<double>(pred.at(2 * px + dx, 2 * py + dy)) - static_cast<double>(truth.at(2 * px + dx, 2 * py + dy));
    }
  }
  return d / 4.0;
}

}  // namespace detail

/// Both maps are 2x2 average-pooled (stride 2); the loss sums logcosh of the
/// pooled differences.
template <class T>
double logcosh_pool_loss(const Image<T>& pred, const Image<T>& truth) {
  detail::check_pool_inputs(pred, truth);
  double sum = 0;
  for (int py = 0; py < pred.height / 2; ++py) {
    for (int px = 0; px < pred.width / 2; ++px) sum += logcosh(detail::pooled_diff(pred, truth, px, py));
  }
  return sum;
}

/// d loss / d pred: tanh(pooled difference) / 4 for each pixel of a window.
template <class T>
Image<T> logcosh_pool_grad(const Image<T>& pred, const Image<T>& truth) {
  detail::check_pool_inputs(pred, truth);
  Image<T> g(pred.width, pred.height, T{});
  for (int py = 0; py < pred.height / 2; ++py) {
    for (int px = 0; px < pred.width / 2; ++px) {
      const auto v = static_cast<T>(std::tanh(detail::pooled_diff(pred, truth, px, py)) / 4.0);
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) g.at(2 * px + dx, 2 * py + dy) = v;
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences of f at x, one coordinate at a time.
inline std::vector<double> numeric_gradient(const ScalarFn& f, std::vector<double> x, double step = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

/// |a - n| / max(|a|, |n|); absolute difference when both are below 1e-8.
inline double relative_error(double analytic, double numeric) {
  const double denom = std::max(std::abs(analytic), std::abs(numeric));
  const double diff = std::abs(analytic - numeric);
  return denom < 1e-8 ? diff : diff / denom;
}

/// Norm-wise relative error against central differences: the largest
/// component difference over the largest gradient magnitude (absolute below
/// 1e-8). Per-component ratios are meaningless for components near zero.
inline double grad_check(const ScalarFn& f, std::span<const double> analytic, std::span<const double> x,
                         double step = 1e-5) {
  if (analytic.size() != x.size()) throw std::invalid_argument("grad_check: gradient size mismatch");
  const auto numeric = numeric_gradient(f, std::vector<double>(x.begin(), x.end()), step);
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return scale < 1e-8 ? diff : diff / scale;
}

struct GradCheckRow {
  std::string loss;
  int trials = 0;
  double max_rel_err = 0;
  double tolerance = 0;

  bool passed() const { return max_rel_err < tolerance; }
};

namespace detail {

inline std::vector<double> flatten(const std::vector<BoxCoords>& v) {
  std::vector<double> out;
  for (const auto& b : v) out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline std::vector<BoxCoords> unflatten(std::span<const double> x) {
  std::vector<BoxCoords> out(x.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (int k = 0; k < 4; ++k) out[i][k] = x[4 * i + k];
  }
  return out;
}

}  // namespace detail

/// Checks every loss at `trials` seeded random points. Quadratic losses must
/// agree to 1e-6, the others to 1e-4.
inline std::vector<GradCheckRow> run_gradient_suite(int trials, std::uint64_t seed, double step = 1e-5) {
  std::vector<GradCheckRow> rows = {
      {"l_bbox", trials, 0, 1e-6}, {"l_conf", trials, 0, 1e-6}, {"l_class", trials, 0, 1e-4},
      {"logcosh_pool", trials, 0, 1e-4}};
  for (int trial = 0; trial < trials; ++trial) {
    auto rng = make_rng(seed, "gradcheck", static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);  // normalized box deltas
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    {
      BoxTarget t;
      const int b = count(rng);
      for (int i = 0; i < b; ++i) {
        t.pred.push_back({coord(rng), coord(rng), coord(rng), coord(rng)});
        t.truth.push_back({coord(rng), coord(rng), coord(rng), coord(rng)});
      }
      const auto truth = t.truth;
      ScalarFn f = [&](std::span<const double> x) { return l_bbox(BoxTarget{detail::unflatten(x), truth}); };
      const auto x = detail::flatten(t.pred);
      const auto g = detail::flatten(l_bbox_grad(t));
      rows[0].max_rel_err = std::max(rows[0].max_rel_err, grad_check(f, g, x, step));
    }
    {
      ConfTarget t;
      const int b = count(rng);
      for (int i = 0; i < b; ++i) {
        t.pred.push_back(unit(rng));
        t.truth.push_back(unit(rng));
      }
      const auto truth = t.truth;
      ScalarFn f = [&](std::span<const double> x) {
        return l_conf(ConfTarget{std::vector<double>(x.begin(), x.end()), truth});
      };
      rows[1].max_rel_err = std::max(rows[1].max_rel_err, grad_check(f, l_conf_grad(t), t.pred, step));
    }
    {
      ClassTarget t;
      t.classes = 3;
      const int m = count(rng);
      std::uniform_int_distribution<int> label(0, t.classes - 1);
      std::uniform_real_distribution<double> weight(0.2, 3.0);
      std::vector<double> cw = {weight(rng), weight(rng), weight(rng)};
      for (int j = 0; j < m; ++j) {
        const int y = label(rng);
        std::array<double, 3> raw{};
        double s = 0;
        for (int i = 0; i < 3; ++i) {
          raw[i] = unit(rng) + 0.1;  // keeps p away from the log clamp
          s += raw[i];
        }
        for (int i = 0; i < 3; ++i) {
          t.onehot.push_back(i == y ? 1.0 : 0.0);
          t.prob.push_back(raw[i] / s);
        }
      }
      ScalarFn f = [&](std::span<const double> x) {
        ClassTarget p = t;
        p.prob.assign(x.begin(), x.end());
        return detail::l_class_raw(p, cw);
      };
      rows[2].max_rel_err = std::max(rows[2].max_rel_err, grad_check(f, l_class_grad(t, cw), t.prob, step));
    }
    {
      std::uniform_int_distribution<int> half(1, 4);
      const int w = 2 * half(rng);
      const int h = 2 * half(rng);
      Image<double> pred(w, h), truth(w, h);
      for (auto& v : pred.data) v = unit(rng);
      for (auto& v : truth.data) v = unit(rng);
      ScalarFn f = [&](std::span<const double> x) {
        Image<double> p = pred;
        p.data.assign(x.begin(), x.end());
        return logcosh_pool_loss(p, truth);
      };
      const auto g = logcosh_pool_grad(pred, truth).data;
      const auto& x = pred.data;
      rows[3].max_rel_err = std::max(rows[3].max_rel_err, grad_check(f, g, x, step));
    }
  }
  return rows;
}

}  // namespace screenseg
