#pragma once

// IoU-thresholded matching, per-class precision/recall/HMean and all-point
// average precision, accumulated over a corpus.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenseg/block.hpp"

namespace screenseg {

struct ScoredBox {
  BlockClass cls;
  Rect rect;
  double score = 1.0;
};

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const {
    if (tp + fp == 0) return tp + fn == 0 ? 1.0 : 0.0;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  double recall() const {
    if (tp + fn == 0) return tp + fp == 0 ? 1.0 : 0.0;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  double hmean() const {
    const double p = precision(), r = recall();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  ClassCounts& operator+=(const ClassCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ClassCounts&) const = default;
};

/// One ranked detection for AP: its score and whether it matched.
struct RankedHit {
  double score;
  bool tp;
};

/// Area under the precision-recall curve, precision made monotone
/// non-increasing (all-point interpolation). Hits are ranked by score
/// descending; equal scores keep their given order. No ground truth: nullopt.
inline std::optional<double> average_precision(std::vector<RankedHit> hits, std::size_t n_gt) {
  if (n_gt == 0) return std::nullopt;
  std::stable_sort(hits.begin(), hits.end(), [](const RankedHit& a, const RankedHit& b) { return a.score > b.score; });
  std::vector<double> prec, rec;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i].tp) ++tp;
    prec.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    rec.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
  }
  for (std::size_t i = prec.size(); i-- > 1;) prec[i - 1] = std::max(prec[i - 1], prec[i]);
  double ap = 0, prev_r = 0;
  for (std::size_t i = 0; i < prec.size(); ++i) {
    ap += (rec[i] - prev_r) * prec[i];
    prev_r = rec[i];
  }
  return ap;
}

/// Per-class matching of one image.
struct ImageMatch {
  std::map<BlockClass, ClassCounts> counts;
  std::map<BlockClass, std::vector<RankedHit>> hits;
  std::map<BlockClass, std::size_t> n_gt;
};

/// Greedy matching: predictions in score order (stable) each take the
/// unmatched ground truth of their class with the highest IoU >= iou_thresh.
inline ImageMatch match_image(const std::vector<ScoredBox>& preds, const std::vector<LabeledRect>& gts,
                              double iou_thresh = 0.75) {
  ImageMatch m;
  std::map<BlockClass, std::vector<std::size_t>> pred_idx, gt_idx;
  for (std::size_t i = 0; i < preds.size(); ++i) pred_idx[preds[i].cls].push_back(i);
  for (std::size_t i = 0; i < gts.size(); ++i) gt_idx[gts[i].cls].push_back(i);
  std::vector<BlockClass> classes;
  for (const auto& [c, v] : pred_idx) classes.push_back(c);
  for (const auto& [c, v] : gt_idx) {
    if (!pred_idx.count(c)) classes.push_back(c);
  }
  for (auto c : classes) {
    auto ps = pred_idx[c];
    const auto& gs = gt_idx[c];
    std::stable_sort(ps.begin(), ps.end(), [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
    std::vector<bool> used(gs.size(), false);
    auto& counts = m.counts[c];
    auto& hits = m.hits[c];
    for (auto pi : ps) {
      double best = -1;
      std::size_t best_g = gs.size();
      for (std::size_t k = 0; k < gs.size(); ++k) {
        if (used[k]) continue;
        const double v = iou(preds[pi].rect, gts[gs[k]].rect);
        if (v >= iou_thresh && v > best) {
          best = v;
          best_g = k;
        }
      }
      const bool tp = best_g < gs.size();
      if (tp) used[best_g] = true;
      ++(tp ? counts.tp : counts.fp);
      hits.push_back(RankedHit{preds[pi].score, tp});
    }
    counts.fn = gs.size() - counts.tp;
    m.n_gt[c] = gs.size();
  }
  return m;
}

struct EvalReport {
  double iou_thresh = 0.75;
  std::map<BlockClass, ClassCounts> per_class;
  ClassCounts overall;
  std::map<BlockClass, double> ap;
  std::optional<double> map;
};

/// Corpus accumulator; add() order does not affect the report except for
/// AP tie-breaking between equal scores of different images.
class Evaluator {
 public:
  explicit Evaluator(double iou_thresh = 0.75) : iou_(iou_thresh) {}

  void add(const std::vector<ScoredBox>& preds, const std::vector<LabeledRect>& gts) { add(match_image(preds, gts, iou_)); }

  void add(const ImageMatch& m) {
    for (const auto& [c, k] : m.counts) counts_[c] += k;
    for (const auto& [c, h] : m.hits) hits_[c].insert(hits_[c].end(), h.begin(), h.end());
    for (const auto& [c, n] : m.n_gt) n_gt_[c] += n;
  }

  EvalReport report() const {
    EvalReport r;
    r.iou_thresh = iou_;
    for (auto c : kDetectorClassList) r.per_class[c];
    double ap_sum = 0;
    int ap_n = 0;
    for (const auto& [c, k] : counts_) {
      r.per_class[c] = k;
      r.overall += k;
    }
    for (const auto& [c, k] : r.per_class) {
      const auto h = hits_.find(c);
      const auto n = n_gt_.find(c);
      const auto ap = average_precision(h == hits_.end() ? std::vector<RankedHit>{} : h->second,
                                        n == n_gt_.end() ? 0 : n->second);
      if (ap) {
        r.ap[c] = *ap;
        ap_sum += *ap;
        ++ap_n;
      }
    }
    if (ap_n > 0) r.map = ap_sum / ap_n;
    return r;
  }

 private:
  double iou_;
  std::map<BlockClass, ClassCounts> counts_;
  std::map<BlockClass, std::vector<RankedHit>> hits_;
  std::map<BlockClass, std::size_t> n_gt_;
};

inline EvalReport match_and_score(const std::vector<ScoredBox>& preds, const std::vector<LabeledRect>& gts,
                                  double iou_thresh = 0.75) {
  Evaluator e(iou_thresh);
  e.add(preds, gts);
  return e.report();
}

inline std::vector<ScoredBox> to_scored(const std::vector<Block>& blocks) {
  std::vector<ScoredBox> out;
  for (const auto& b : blocks) out.push_back(ScoredBox{b.cls, b.rect, b.score});
  return out;
}

inline std::vector<ScoredBox> to_scored(const std::vector<Proposal>& props) {
  std::vector<ScoredBox> out;
  for (const auto& p : props) out.push_back(ScoredBox{p.cls, p.rect, p.score});
  return out;
}

namespace detail {

inline std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t w, bool right = true) {
  if (s.size() >= w) return s;
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

}  // namespace detail

/// Aligned table: one row per class plus the pooled overall row.
inline std::string format_report(const EvalReport& r) {
  using detail::fmt3;
  using detail::pad;
  std::string out = "screenseg/1 evaluation  IoU >= " + fmt3(r.iou_thresh) + "  AP: all-point interpolation\n";
  out += pad("class", 10, false) + pad("precision", 10) + pad("recall", 8) + pad("hmean", 8) + pad("tp", 7) +
         pad("fp", 7) + pad("fn", 7) + pad("ap", 8) + "\n";
  auto row = [&](const std::string& name, const ClassCounts& k, std::optional<double> ap) {
    out += pad(name, 10, false) + pad(fmt3(k.precision()), 10) + pad(fmt3(k.recall()), 8) + pad(fmt3(k.hmean()), 8) +
           pad(std::to_string(k.tp), 7) + pad(std::to_string(k.fp), 7) + pad(std::to_string(k.fn), 7) +
           pad(ap ? fmt3(*ap) : "-", 8) + "\n";
  };
  for (const auto& [c, k] : r.per_class) {
    const auto it = r.ap.find(c);
    row(std::string(to_string(c)), k, it == r.ap.end() ? std::nullopt : std::optional<double>(it->second));
  }
  row("overall", r.overall, r.map);
  return out;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  auto counts = [](const ClassCounts& k) {
    return nlohmann::json{{"precision", k.precision()}, {"recall", k.recall()}, {"hmean", k.hmean()},
                          {"tp", k.tp},                 {"fp", k.fp},         {"fn", k.fn}};
  };
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [c, k] : r.per_class) {
    auto j = counts(k);
    const auto it = r.ap.find(c);
    j["ap"] = it == r.ap.end() ? nlohmann::json(nullptr) : nlohmann::json(it->second);
    classes[std::string(to_string(c))] = j;
  }
  return {{"schema", "screenseg/1"},
          {"iou", r.iou_thresh},
          {"ap_interpolation", "all-point"},
          {"classes", classes},
          {"overall", counts(r.overall)},
          {"map", r.map ? nlohmann::json(*r.map) : nlohmann::json(nullptr)}};
}

}  // namespace screenseg
