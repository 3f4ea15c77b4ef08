#pragma once

// Non-maximum suppression: the confidence-weighted cluster fusion used by the
// pipeline, plus greedy and linear soft-NMS baselines. All variants work per
// class and never merge across classes.

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "screenseg/block.hpp"
#include "screenseg/geometry.hpp"

namespace screenseg {

namespace detail {

inline std::map<BlockClass, std::vector<Proposal>> split_by_class(const std::vector<Proposal>& props) {
  std::map<BlockClass, std::vector<Proposal>> out;
  for (const auto& p : props) out[p.cls].push_back(p);
  return out;
}

/// Descending score; ties broken by geometry so results never depend on input order.
inline bool ranks_before(const Proposal& a, const Proposal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.cls != b.cls) return a.cls < b.cls;
  if (a.rect.y() != b.rect.y()) return a.rect.y() < b.rect.y();
  if (a.rect.x() != b.rect.x()) return a.rect.x() < b.rect.x();
  if (a.rect.w() != b.rect.w()) return a.rect.w() < b.rect.w();
  return a.rect.h() < b.rect.h();
}

inline void sort_by_score(std::vector<Proposal>& v) { std::sort(v.begin(), v.end(), ranks_before); }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Groups same-class proposals into connected components of the graph whose
/// edges join pairs with IoU > cluster_iou. Clusters are listed in order of
/// their best-ranked member; members keep their rank order.
inline std::vector<std::vector<Proposal>> overlap_clusters(const std::vector<Proposal>& props, double cluster_iou) {
  std::vector<std::vector<Proposal>> clusters;
  for (auto& [cls, group] : detail::split_by_class(props)) {
    detail::sort_by_score(group);
    detail::DisjointSets ds(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (iou(group[i].rect, group[j].rect) > cluster_iou) ds.unite(i, j);
      }
    }
    std::map<std::size_t, std::size_t> slot;
    const std::size_t base = clusters.size();
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto root = ds.find(i);
      auto [it, inserted] = slot.emplace(root, clusters.size() - base);
      if (inserted) clusters.emplace_back();
      clusters[base + it->second].push_back(group[i]);
    }
  }
  return clusters;
}

/// Confidence-weighted mean of member centers and sizes; score = best member score.
inline Proposal fuse_cluster(const std::vector<Proposal>& members) {
  double sw = 0, cx = 0, cy = 0, w = 0, h = 0, best = 0;
  for (const auto& p : members) {
    sw += p.score;
    cx += p.score * p.rect.cx();
    cy += p.score * p.rect.cy();
    w += p.score * p.rect.w();
    h += p.score * p.rect.h();
    best = std::max(best, p.score);
  }
  return Proposal{Rect::from_center(cx / sw, cy / sw, w / sw, h / sw), members.front().cls, best};
}

/// Replaces every overlap cluster (IoU > cluster_iou, transitive) with the
/// score-weighted mean box. Requires strictly positive scores.
inline std::vector<Proposal> weighted_nms(const std::vector<Proposal>& props, double cluster_iou = 0.2) {
  for (const auto& p : props) {
    if (!(p.score > 0)) throw InputError("weighted_nms: proposal scores must be positive");
  }
  std::vector<Proposal> out;
  for (const auto& c : overlap_clusters(props, cluster_iou)) out.push_back(fuse_cluster(c));
  detail::sort_by_score(out);
  return out;
}

/// Classic greedy NMS: keep the best box, drop same-class boxes with IoU >= iou_thresh.
inline std::vector<Proposal> greedy_nms(const std::vector<Proposal>& props, double iou_thresh) {
  std::vector<Proposal> out;
  for (auto& [cls, group] : detail::split_by_class(props)) {
    detail::sort_by_score(group);
    std::vector<Proposal> kept;
    for (const auto& p : group) {
      const bool suppressed = std::any_of(kept.begin(), kept.end(),
                                          [&](const Proposal& k) { return iou(k.rect, p.rect) >= iou_thresh; });
      if (!suppressed) kept.push_back(p);
    }
    out.insert(out.end(), kept.begin(), kept.end());
  }
  detail::sort_by_score(out);
  return out;
}

/// Linear soft-NMS: after each pick, every remaining overlapping box of the
/// class has its score multiplied by (1 - IoU with the pick); boxes that fall
/// below score_floor are discarded.
inline std::vector<Proposal> soft_nms(const std::vector<Proposal>& props, double score_floor) {
  std::vector<Proposal> out;
  for (auto& [cls, group] : detail::split_by_class(props)) {
    std::vector<Proposal> pending = group;
    while (!pending.empty()) {
      auto best = std::min_element(pending.begin(), pending.end(), detail::ranks_before);
      const Proposal pick = *best;
      pending.erase(best);
      if (pick.score < score_floor) continue;
      out.push_back(pick);
      for (auto& p : pending) {
        const double o = iou(pick.rect, p.rect);
        if (o > 0) p.score *= 1.0 - o;
      }
      std::erase_if(pending, [&](const Proposal& p) { return p.score < score_floor; });
    }
  }
  detail::sort_by_score(out);
  return out;
}

}  // namespace screenseg
