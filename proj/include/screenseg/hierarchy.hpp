#pragma once

// Block rectification against grid borders and the containment tree
// screen -> grids -> blocks -> scene text.

#include <algorithm>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenseg/block.hpp"
#include "screenseg/error.hpp"
#include "screenseg/proposals.hpp"

namespace screenseg {

struct HierarchyParams {
  double match_frac = 0.5;   // grid-to-block match: contains_frac or IoU
  double other_frac = 0.1;   // any second block this much inside breaks one-to-one
  double nest_frac = 0.8;
};

struct Rectification {
  std::vector<Block> blocks;
  std::vector<bool> grid_used;
};

/// Snaps a block to a grid when the grid describes exactly that block.
inline Rectification rectify_blocks(std::vector<Block> blocks, const std::vector<Block>& grids,
                                    const HierarchyParams& p = {}) {
  Rectification out{std::move(blocks), std::vector<bool>(grids.size(), false)};
  for (std::size_t g = 0; g < grids.size(); ++g) {
    const Rect& gr = grids[g].rect;
    std::vector<std::size_t> matches;
    std::size_t others = 0;
    for (std::size_t i = 0; i < out.blocks.size(); ++i) {
      const Rect& b = out.blocks[i].rect;
      const double inside = contains_frac(gr, b);
      if (inside >= p.match_frac || iou(gr, b) >= p.match_frac) {
        matches.push_back(i);
      } else if (inside >= p.other_frac) {
        ++others;
      }
    }
    if (matches.size() != 1 || others != 0) continue;
    auto& b = out.blocks[matches.front()];
    b.rect = gr;
    b.rectified = true;
    out.grid_used[g] = true;
  }
  return out;
}

struct LayoutNode {
  Block block{Rect(0, 0, 1, 1), BlockClass::Grid};
  std::vector<LayoutNode> children;
};

namespace detail {

inline bool reading_order(const LayoutNode& a, const LayoutNode& b) {
  const auto &ra = a.block.rect, &rb = b.block.rect;
  if (ra.y() != rb.y()) return ra.y() < rb.y();
  if (ra.x() != rb.x()) return ra.x() < rb.x();
  if (ra.area() != rb.area()) return ra.area() > rb.area();
  return static_cast<int>(a.block.cls) < static_cast<int>(b.block.cls);
}

inline void sort_tree(LayoutNode& n) {
  std::stable_sort(n.children.begin(), n.children.end(), reading_order);
  for (auto& c : n.children) sort_tree(c);
}

}  // namespace detail

inline Block screen_block(int w, int h) { return Block{Rect(0, 0, w, h), BlockClass::Grid, 1.0, Source::Grid, false}; }

/// Unused grids enclosing at least two blocks become segment nodes (nested by
/// containment, larger first); blocks hang from the smallest enclosing
/// segment or the root; scene text hangs from the smallest enclosing Image
/// block or is dropped. Children are in reading order.
inline LayoutNode build_layout_tree(const std::vector<Block>& blocks, const std::vector<Block>& grids,
                                    const std::vector<bool>& grid_used, const std::vector<Block>& scene_texts,
                                    int image_w, int image_h, const HierarchyParams& p = {}) {
  if (!grid_used.empty() && grid_used.size() != grids.size()) {
    throw std::invalid_argument("build_layout_tree: grid_used must match grids");
  }
  // Flat node table; index 0 is the root.
  struct Entry {
    Block block;
    int parent;
  };
  std::vector<Entry> nodes{{screen_block(image_w, image_h), -1}};

  std::vector<std::size_t> segs;
  for (std::size_t g = 0; g < grids.size(); ++g) {
    if (!grid_used.empty() && grid_used[g]) continue;
    const auto inside = std::count_if(blocks.begin(), blocks.end(), [&](const Block& b) {
      return contains_frac(grids[g].rect, b.rect) >= p.nest_frac;
    });
    if (inside >= 2) segs.push_back(g);
  }
  std::stable_sort(segs.begin(), segs.end(),
                   [&](std::size_t a, std::size_t b) { return grids[a].rect.area() > grids[b].rect.area(); });

  auto smallest_enclosing = [&](const Rect& r, std::size_t first, std::size_t last, auto&& accept) {
    int best = 0;
    double best_area = -1;
    for (std::size_t i = first; i < last; ++i) {
      if (!accept(nodes[i].block)) continue;
      const Rect& c = nodes[i].block.rect;
      if (contains_frac(c, r) < p.nest_frac) continue;
      if (best_area < 0 || c.area() < best_area) {
        best = static_cast<int>(i);
        best_area = c.area();
      }
    }
    return best;
  };
  auto any = [](const Block&) { return true; };

  for (auto g : segs) {
    const int parent = smallest_enclosing(grids[g].rect, 1, nodes.size(), any);
    nodes.push_back({grids[g], parent});
  }
  const std::size_t seg_end = nodes.size();
  for (const auto& b : blocks) nodes.push_back({b, smallest_enclosing(b.rect, 1, seg_end, any)});
  const std::size_t block_end = nodes.size();
  for (const auto& s : scene_texts) {
    const int parent = smallest_enclosing(s.rect, seg_end, block_end,
                                          [](const Block& b) { return b.cls == BlockClass::Image; });
    if (parent == 0) continue;  // orphan scene text
    nodes.push_back({s, parent});
  }

  // Assemble bottom-up: children are always appended after their parents.
  std::vector<LayoutNode> built(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) built[i].block = nodes[i].block;
  for (std::size_t i = nodes.size(); i-- > 1;) {
    built[nodes[i].parent].children.push_back(std::move(built[i]));
  }
  LayoutNode root = std::move(built[0]);
  detail::sort_tree(root);
  return root;
}

/// Every non-root node in depth-first order.
inline std::vector<Block> flatten_tree(const LayoutNode& root) {
  std::vector<Block> out;
  auto walk = [&](auto&& self, const LayoutNode& n) -> void {
    for (const auto& c : n.children) {
      out.push_back(c.block);
      self(self, c);
    }
  };
  walk(walk, root);
  return out;
}

/// Smallest contains_frac(parent, child) over all edges (1 for a bare root).
inline double min_nesting(const LayoutNode& root) {
  double m = 1.0;
  auto walk = [&](auto&& self, const LayoutNode& n) -> void {
    for (const auto& c : n.children) {
      m = std::min(m, contains_frac(n.block.rect, c.block.rect));
      self(self, c);
    }
  };
  walk(walk, root);
  return m;
}

inline nlohmann::json node_to_json(const LayoutNode& n) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : n.children) children.push_back(node_to_json(c));
  return {{"class", std::string(to_string(n.block.cls))},
          {"rect", rect_to_json(n.block.rect)},
          {"score", n.block.score},
          {"source", std::string(to_string(n.block.source))},
          {"rectified", n.block.rectified},
          {"children", children}};
}

inline nlohmann::json tree_to_json(const LayoutNode& root, int image_w, int image_h) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : root.children) children.push_back(node_to_json(c));
  return {{"schema", "screenseg/1"},
          {"image", {{"w", image_w}, {"h", image_h}}},
          {"root", {{"class", "screen"}, {"rect", rect_to_json(root.block.rect)}, {"children", children}}}};
}

inline LayoutNode node_from_json(const nlohmann::json& j) {
  LayoutNode n;
  const auto cls_name = j.at("class").get<std::string>();
  const auto cls = parse_block_class(cls_name);
  if (!cls) throw InputError("layout tree: unknown class " + cls_name);
  const auto source = parse_source(j.value("source", std::string("dnn")));
  if (!source) throw InputError("layout tree: unknown source");
  const double score = j.value("score", 1.0);
  check_score(score);
  n.block = Block{rect_from_json(j.at("rect")), *cls, score, *source, j.value("rectified", false)};
  for (const auto& c : j.value("children", nlohmann::json::array())) n.children.push_back(node_from_json(c));
  return n;
}

inline LayoutNode tree_from_json(const nlohmann::json& j) {
  try {
    const auto& root = j.at("root");
    const int w = j.at("image").at("w").get<int>();
    const int h = j.at("image").at("h").get<int>();
    if (w < 1 || h < 1) throw InputError("layout tree: image size must be positive");
    LayoutNode n{screen_block(w, h), {}};
    for (const auto& c : root.value("children", nlohmann::json::array())) n.children.push_back(node_from_json(c));
    return n;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("layout tree: ") + e.what());
  }
}

}  // namespace screenseg
