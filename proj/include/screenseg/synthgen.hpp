#pragma once

// Seeded synthetic screenshots with exact ground truth: textured image
// rectangles, rows of glyph-like strokes, compact icons, bordered cards,
// framed images and light "scene text" characters painted on images.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenseg/block.hpp"
#include "screenseg/error.hpp"
#include "screenseg/proposals.hpp"
#include "screenseg/raster.hpp"
#include "screenseg/rng.hpp"
#include "screenseg/scenetext.hpp"

namespace screenseg {

enum class Background { Flat, Gradient };

struct ScreenSpec {
  int width = 540;
  int height = 1120;
  int images = 2;
  int textlines = 4;
  int icons = 2;
  int grids = 0;        // bordered cards, each enclosing two blocks
  int framed = 0;       // stand-alone images drawn with a 1-px frame
  int scene_words = 0;  // light words painted on each large enough image
  Background background = Background::Gradient;

  void validate() const {
    if (width < 64 || height < 64 || width % 2 != 0 || height % 2 != 0) {
      throw InputError("spec: canvas must be at least 64x64 with even dimensions");
    }
    if (images < 0 || textlines < 0 || icons < 0 || grids < 0 || framed < 0 || scene_words < 0) {
      throw InputError("spec: counts must be non-negative");
    }
    if (framed > images) throw InputError("spec: more framed images than images");
    if (2 * grids > images - framed + textlines + icons) {
      throw InputError("spec: each card needs two blocks to enclose (framed images stay outside cards)");
    }
  }
};

inline ScreenSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("spec: expected a JSON object");
  ScreenSpec s;
  for (const auto& [key, v] : j.items()) {
    auto as_int = [&]() {
      if (!v.is_number_integer()) throw InputError("spec: " + key + " must be an integer");
      return v.get<int>();
    };
    if (key == "width") s.width = as_int();
    else if (key == "height") s.height = as_int();
    else if (key == "images") s.images = as_int();
    else if (key == "textlines") s.textlines = as_int();
    else if (key == "icons") s.icons = as_int();
    else if (key == "grids") s.grids = as_int();
    else if (key == "framed") s.framed = as_int();
    else if (key == "scene_words") s.scene_words = as_int();
    else if (key == "background") {
      const auto b = v.is_string() ? v.get<std::string>() : std::string{};
      if (b == "flat") s.background = Background::Flat;
      else if (b == "gradient") s.background = Background::Gradient;
      else throw InputError("spec: background must be \"flat\" or \"gradient\"");
    } else if (key != "schema") {
      throw InputError("spec: unknown key " + key);
    }
  }
  s.validate();
  return s;
}

inline nlohmann::json spec_to_json(const ScreenSpec& s) {
  return {{"width", s.width},         {"height", s.height},   {"images", s.images},
          {"textlines", s.textlines}, {"icons", s.icons},     {"grids", s.grids},
          {"framed", s.framed},       {"scene_words", s.scene_words},
          {"background", s.background == Background::Flat ? "flat" : "gradient"}};
}

/// A bordered rectangle whose 1-px border coincides with `rect`. Cards
/// enclose member blocks; frames coincide with a single image block.
struct PlantedGrid {
  Rect rect;
  bool card = true;
  std::vector<std::size_t> members;  // indices into Annotation::objects
};

enum class IconShape { Square, Disc, Ring, Plus };

struct PlannedImage {
  Rect rect;
  bool framed = false;
  Rgb frame{};
  std::uint64_t texture_seed = 0;
};

struct PlannedText {
  std::vector<Rect> strokes;
  Rgb color{};
};

struct PlannedIcon {
  Rect rect;
  IconShape shape = IconShape::Square;
  Rgb color{};
};

struct PlannedCard {
  Rect rect;
  Rgb border{};
  Rgb fill{};
};

/// Full geometry of a synthetic screenshot; rendering adds only pixels.
struct Layout {
  int width = 0;
  int height = 0;
  Rgb bg_top{};
  Rgb bg_bottom{};
  std::vector<PlannedImage> images;
  std::vector<PlannedText> lines;
  std::vector<PlannedIcon> icons;
  std::vector<PlannedCard> cards;
  std::vector<PlantedGrid> grids;
  CharLayout chars;
  Rgb char_color{};
  Annotation annotation;
};

struct Screenshot {
  RgbImage image;
  Annotation annotation;
  std::vector<PlantedGrid> grids;
  CharLayout chars;
};

namespace detail {

inline int uniform_int(Rng& rng, int lo, int hi) {
  if (hi < lo) hi = lo;
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Rgb light_color(Rng& rng) {
  const int base = uniform_int(rng, 228, 252);
  return Rgb{clamp_u8(base + uniform_int(rng, -3, 3)), clamp_u8(base + uniform_int(rng, -3, 3)),
             clamp_u8(base + uniform_int(rng, -3, 3))};
}

inline Rgb dark_color(Rng& rng) {
  const int base = uniform_int(rng, 10, 70);
  return Rgb{clamp_u8(base + uniform_int(rng, -10, 10)), clamp_u8(base + uniform_int(rng, -10, 10)),
             clamp_u8(base + uniform_int(rng, -10, 30))};
}

/// Mid-tone color with luma at most `max_luma`.
inline Rgb mid_color(Rng& rng, int max_luma) {
  for (;;) {
    Rgb c{static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
          static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
    if (luma(c) <= max_luma) return c;
  }
}

/// A block before placement: size plus geometry relative to its own origin.
struct Piece {
  enum Kind { Image, Text, Icon } kind = Image;
  int w = 0;
  int h = 0;
  std::vector<Rect> strokes;  // text only, relative
  IconShape shape = IconShape::Square;
};

inline Piece make_text_piece(Rng& rng, double s, int max_width) {
  Piece p;
  p.kind = Piece::Text;
  const int h = std::max(8, static_cast<int>(std::lround(uniform_real(rng, 16, 28) * s)));
  const int t = std::max(2, static_cast<int>(std::lround(h / 8.0)));
  const int glyph_gap = std::max(2, static_cast<int>(std::lround(0.18 * h)));
  const int word_gap = std::max(4, static_cast<int>(std::lround(0.45 * h)));
  const int words = uniform_int(rng, 2, 5);
  int x = 0;
  for (int wi = 0; wi < words; ++wi) {
    const int glyphs = uniform_int(rng, 2, 7);
    std::vector<Rect> word;
    int wx = x;
    for (int gi = 0; gi < glyphs; ++gi) {
      const int gw = std::max(t + 2, static_cast<int>(std::lround(uniform_real(rng, 0.45, 0.8) * h)));
      const bool tall = (wi == 0 && gi == 0) || uniform_int(rng, 0, 2) == 0;
      const int top = tall ? 0 : static_cast<int>(std::lround(0.3 * h));
      const int gh = h - top;
      // one vertical bar spans the glyph height, one horizontal bar its width
      const int vx = uniform_int(rng, 0, 1) ? wx : wx + gw - t;
      word.emplace_back(vx, top, t, gh);
      const int hy = std::array<int, 3>{top, top + (gh - t) / 2, h - t}[uniform_int(rng, 0, 2)];
      word.emplace_back(wx, hy, gw, t);
      if (uniform_int(rng, 0, 1)) {
        const int vx2 = (vx == wx) ? wx + gw - t : wx;
        const int len = uniform_int(rng, t, gh);
        word.emplace_back(vx2, uniform_int(rng, 0, 1) ? top : h - len, t, len);
      }
      wx += gw + glyph_gap;
    }
    const int word_right = wx - glyph_gap;
    if (wi > 0 && word_right > max_width) break;
    p.strokes.insert(p.strokes.end(), word.begin(), word.end());
    x = word_right + word_gap;
  }
  int right = 0;
  for (const auto& r : p.strokes) right = std::max(right, static_cast<int>(r.right()));
  p.w = right;
  p.h = h;
  return p;
}

/// Pieces stacked inside a card, or a single piece.
struct Unit {
  int w = 0;
  int h = 0;
  bool card = false;
  std::vector<std::size_t> pieces;
  std::vector<std::pair<int, int>> offsets;
};

inline bool separated(const Rect& a, const Rect& b, double gx, double gy) {
  return a.right() + gx <= b.x() || b.right() + gx <= a.x() || a.bottom() + gy <= b.y() || b.bottom() + gy <= a.y();
}

}  // namespace detail

/// Plans all geometry for (seed, spec). Throws InputError when a unit cannot
/// be placed after 1000 attempts.
inline Layout plan_layout(std::uint64_t seed, const ScreenSpec& spec) {
  spec.validate();
  using namespace detail;
  Rng rng = make_rng(seed, "synthgen-layout");
  const double s = spec.width / 1080.0;
  const int W = spec.width;
  const int H = spec.height;

  Layout L;
  L.width = W;
  L.height = H;
  L.bg_top = light_color(rng);
  L.bg_bottom = L.bg_top;
  if (spec.background == Background::Gradient) {
    for (auto* ch : {&L.bg_bottom.r, &L.bg_bottom.g, &L.bg_bottom.b}) *ch = clamp_u8(*ch + uniform_int(rng, -18, 3));
  }

  std::vector<Piece> pieces;
  for (int i = 0; i < spec.images; ++i) {
    Piece p;
    p.kind = Piece::Image;
    p.w = static_cast<int>(std::lround(uniform_real(rng, 0.3, 0.8) * W));
    p.h = static_cast<int>(std::lround(uniform_real(rng, 0.06, 0.15) * H));
    pieces.push_back(p);
  }
  for (int i = 0; i < spec.textlines; ++i) pieces.push_back(make_text_piece(rng, s, static_cast<int>(0.75 * W)));
  for (int i = 0; i < spec.icons; ++i) {
    Piece p;
    p.kind = Piece::Icon;
    p.w = p.h = std::max(10, static_cast<int>(std::lround(uniform_real(rng, 48, 96) * s)));
    p.shape = static_cast<IconShape>(uniform_int(rng, 0, 3));
    pieces.push_back(p);
  }

  // Cards draw their members at random; framed images come from the rest.
  std::vector<std::size_t> order(pieces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const int pad = std::max(8, static_cast<int>(std::lround(40 * s)));
  const int inner_gap = std::max(6, static_cast<int>(std::lround(28 * s)));
  std::vector<Unit> units;
  std::vector<bool> in_card(pieces.size(), false);
  std::size_t next = 0;
  // keep enough stand-alone images for the framed count
  int free_images = spec.images;
  for (int g = 0; g < spec.grids; ++g) {
    Unit u;
    u.card = true;
    while (u.pieces.size() < 2) {
      const auto idx = order[next++ % order.size()];
      if (in_card[idx]) continue;
      if (pieces[idx].kind == Piece::Image && free_images <= spec.framed) continue;
      if (pieces[idx].kind == Piece::Image) --free_images;
      in_card[idx] = true;
      u.pieces.push_back(idx);
    }
    int y = pad;
    int inner_w = 0;
    for (auto idx : u.pieces) {
      u.offsets.emplace_back(pad, y);
      y += pieces[idx].h + inner_gap;
      inner_w = std::max(inner_w, pieces[idx].w);
    }
    u.w = inner_w + 2 * pad;
    u.h = y - inner_gap + pad;
    units.push_back(u);
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (in_card[i]) continue;
    units.push_back(Unit{pieces[i].w, pieces[i].h, false, {i}, {{0, 0}}});
  }
  std::stable_sort(units.begin(), units.end(),
                   [](const Unit& a, const Unit& b) { return a.w * a.h > b.w * b.h; });

  const int mx = std::max(8, static_cast<int>(std::lround(24 * s)));
  const int my = std::max(8, static_cast<int>(std::lround(24 * s)));
  const double gx = 32 * s + 2;
  const double gy = 24 * s + 2;
  std::vector<Rect> placed;
  std::vector<std::pair<int, int>> origin(units.size());
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& unit = units[u];
    if (unit.w > W - 2 * mx || unit.h > H - 2 * my) throw InputError("synthgen: block larger than the canvas");
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      const int x = uniform_int(rng, mx, W - mx - unit.w);
      const int y = uniform_int(rng, my, H - my - unit.h);
      const Rect r(x, y, unit.w, unit.h);
      ok = std::all_of(placed.begin(), placed.end(), [&](const Rect& q) { return separated(r, q, gx, gy); });
      if (ok) {
        placed.push_back(r);
        origin[u] = {x, y};
      }
    }
    if (!ok) throw InputError("synthgen: could not place all blocks after 1000 attempts (spec too dense)");
  }

  // Absolute geometry, annotation order: images, text lines, icons.
  std::vector<Rect> abs(pieces.size(), Rect(0, 0, 1, 1));
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t k = 0; k < units[u].pieces.size(); ++k) {
      const auto idx = units[u].pieces[k];
      abs[idx] = Rect(origin[u].first + units[u].offsets[k].first, origin[u].second + units[u].offsets[k].second,
                      pieces[idx].w, pieces[idx].h);
    }
  }
  std::vector<std::size_t> object_of(pieces.size());
  int framed_left = spec.framed;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].kind != Piece::Image) continue;
    PlannedImage im{abs[i], false, {}, derive_seed(seed, "synthgen-texture", i)};
    if (!in_card[i] && framed_left > 0) {
      --framed_left;
      im.framed = true;
      im.frame = dark_color(rng);
    }
    object_of[i] = L.annotation.objects.size();
    L.annotation.objects.push_back({BlockClass::Image, abs[i]});
    if (im.framed) L.grids.push_back(PlantedGrid{abs[i], false, {object_of[i]}});
    L.images.push_back(im);
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].kind != Piece::Text) continue;
    PlannedText t;
    t.color = dark_color(rng);
    for (const auto& r : pieces[i].strokes) t.strokes.emplace_back(abs[i].x() + r.x(), abs[i].y() + r.y(), r.w(), r.h());
    object_of[i] = L.annotation.objects.size();
    L.annotation.objects.push_back({BlockClass::Text, abs[i]});
    L.lines.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].kind != Piece::Icon) continue;
    object_of[i] = L.annotation.objects.size();
    L.annotation.objects.push_back({BlockClass::Icon, abs[i]});
    L.icons.push_back(PlannedIcon{abs[i], pieces[i].shape, dark_color(rng)});
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (!units[u].card) continue;
    const Rect r(origin[u].first, origin[u].second, units[u].w, units[u].h);
    const int level = uniform_int(rng, 130, 185);
    const auto lv = static_cast<std::uint8_t>(level);
    L.cards.push_back(PlannedCard{r, Rgb{lv, lv, lv}, light_color(rng)});
    PlantedGrid g{r, true, {}};
    for (auto idx : units[u].pieces) g.members.push_back(object_of[idx]);
    std::sort(g.members.begin(), g.members.end());
    L.grids.push_back(std::move(g));
  }

  // Scene words: light character boxes inside image interiors.
  if (spec.scene_words > 0) {
    L.char_color = light_color(rng);
    for (const auto& im : L.images) {
      const int ch_max = std::max(8, static_cast<int>(std::lround(32 * s)));
      if (im.rect.h() < 3 * ch_max) continue;
      std::vector<Rect> used;
      for (int wi = 0; wi < spec.scene_words; ++wi) {
        for (int attempt = 0; attempt < 50; ++attempt) {
          const int ch = 2 * uniform_int(rng, std::max(4, ch_max / 4), ch_max / 2);
          const int n = uniform_int(rng, 2, 6);
          std::vector<int> widths;
          int total = 0;
          const int gap = std::max(1, static_cast<int>(std::lround(uniform_real(rng, 0.1, 0.3) * ch)));
          for (int c = 0; c < n; ++c) {
            widths.push_back(std::max(2, static_cast<int>(std::lround(uniform_real(rng, 0.5, 0.8) * ch))));
            total += widths.back() + (c ? gap : 0);
          }
          const int inset = 4;
          const int x0 = static_cast<int>(im.rect.x()) + inset;
          const int y0 = static_cast<int>(im.rect.y()) + inset;
          const int x1 = static_cast<int>(im.rect.right()) - inset - total;
          const int y1 = static_cast<int>(im.rect.bottom()) - inset - ch;
          if (x1 < x0 || y1 < y0) continue;
          const Rect wr(uniform_int(rng, x0, x1), uniform_int(rng, y0, y1), total, ch);
          if (!std::all_of(used.begin(), used.end(), [&](const Rect& q) { return separated(wr, q, ch, ch); })) continue;
          used.push_back(wr);
          std::vector<Rect> word;
          int x = static_cast<int>(wr.x());
          for (int c = 0; c < n; ++c) {
            word.emplace_back(x, wr.y(), widths[c], ch);
            x += widths[c] + gap;
          }
          L.chars.words.push_back(std::move(word));
          break;
        }
      }
    }
  }

  L.annotation.width = W;
  L.annotation.height = H;
  L.annotation.image_id = "synth-" + std::to_string(seed);
  return L;
}

namespace detail {

inline void fill_rect(RgbImage& img, const Rect& r, Rgb c) { fill_span(img, to_pixels(r, img.width, img.height), c); }

inline void paint_texture(RgbImage& img, const PlannedImage& im) {
  Rng rng(im.texture_seed);
  const Rgb a = mid_color(rng, 170);
  const Rgb b = mid_color(rng, 170);
  const double angle = uniform_real(rng, 0, 2 * std::acos(-1.0));
  const double dx = std::cos(angle), dy = std::sin(angle);
  const int amp = uniform_int(rng, 12, 36);
  const auto s = to_pixels(im.rect, img.width, img.height);
  const double span = std::abs(dx) * (s.x1 - s.x0) + std::abs(dy) * (s.y1 - s.y0) + 1;
  std::uniform_int_distribution<int> noise(-amp, amp);
  for (int y = s.y0; y < s.y1; ++y) {
    for (int x = s.x0; x < s.x1; ++x) {
      double t = ((x - s.x0) * dx + (y - s.y0) * dy) / span;
      t = t < 0 ? t + 1 : t;
      const int n = noise(rng);
      img.at(x, y) = Rgb{clamp_u8(a.r + (b.r - a.r) * t + n), clamp_u8(a.g + (b.g - a.g) * t + n),
                         clamp_u8(a.b + (b.b - a.b) * t + n)};
    }
  }
  const int blobs = uniform_int(rng, 2, 5);
  for (int k = 0; k < blobs; ++k) {
    const Rgb c = mid_color(rng, 190);
    const int bw = uniform_int(rng, 2, std::max(2, (s.x1 - s.x0) / 2));
    const int bh = uniform_int(rng, 2, std::max(2, (s.y1 - s.y0) / 2));
    const int bx = uniform_int(rng, s.x0, s.x1 - bw);
    const int by = uniform_int(rng, s.y0, s.y1 - bh);
    const double rx = bw / 2.0, ry = bh / 2.0;
    const bool ellipse = uniform_int(rng, 0, 1);
    for (int y = by; y < by + bh; ++y) {
      for (int x = bx; x < bx + bw; ++x) {
        const double ex = (x + 0.5 - bx - rx) / rx, ey = (y + 0.5 - by - ry) / ry;
        if (ellipse && ex * ex + ey * ey > 1.0) continue;
        const int n = noise(rng) / 2;
        img.at(x, y) = Rgb{clamp_u8(c.r + n), clamp_u8(c.g + n), clamp_u8(c.b + n)};
      }
    }
  }
}

inline void paint_icon(RgbImage& img, const PlannedIcon& icon) {
  const auto s = to_pixels(icon.rect, img.width, img.height);
  const double side = s.x1 - s.x0;
  const double c = side / 2.0;
  const int bar = std::max(2, static_cast<int>(std::lround(side / 4)));
  for (int y = s.y0; y < s.y1; ++y) {
    for (int x = s.x0; x < s.x1; ++x) {
      const double px = x - s.x0 + 0.5 - c, py = y - s.y0 + 0.5 - c;
      const double d2 = px * px + py * py;
      bool on = false;
      switch (icon.shape) {
        case IconShape::Square: on = true; break;
        case IconShape::Disc: on = d2 <= c * c; break;
        case IconShape::Ring: on = d2 <= c * c && d2 >= 0.36 * c * c; break;
        case IconShape::Plus: on = std::abs(px) <= bar / 2.0 || std::abs(py) <= bar / 2.0; break;
      }
      if (on) img.at(x, y) = icon.color;
    }
  }
}

}  // namespace detail

inline RgbImage render_layout(const Layout& L) {
  RgbImage img(L.width, L.height);
  for (int y = 0; y < L.height; ++y) {
    const double t = L.height > 1 ? static_cast<double>(y) / (L.height - 1) : 0.0;
    const Rgb c{clamp_u8(L.bg_top.r + (L.bg_bottom.r - L.bg_top.r) * t),
                clamp_u8(L.bg_top.g + (L.bg_bottom.g - L.bg_top.g) * t),
                clamp_u8(L.bg_top.b + (L.bg_bottom.b - L.bg_top.b) * t)};
    for (int x = 0; x < L.width; ++x) img.at(x, y) = c;
  }
  for (const auto& card : L.cards) {
    detail::fill_rect(img, card.rect, card.fill);
    draw_outline(img, card.rect, card.border, 1);
  }
  for (const auto& im : L.images) {
    detail::paint_texture(img, im);
    if (im.framed) draw_outline(img, im.rect, im.frame, 1);
  }
  for (const auto& line : L.lines) {
    for (const auto& r : line.strokes) detail::fill_rect(img, r, line.color);
  }
  for (const auto& icon : L.icons) detail::paint_icon(img, icon);
  for (const auto& word : L.chars.words) {
    for (const auto& c : word) detail::fill_rect(img, c, L.char_color);
  }
  return img;
}

inline Screenshot gen_screenshot(std::uint64_t seed, const ScreenSpec& spec) {
  Layout L = plan_layout(seed, spec);
  return Screenshot{render_layout(L), std::move(L.annotation), std::move(L.grids), std::move(L.chars)};
}

/// Sidecar JSON: the annotation plus planted grids and scene words.
inline nlohmann::json screenshot_to_json(const Screenshot& s, std::uint64_t seed) {
  auto j = annotation_to_json(s.annotation);
  j["seed"] = seed;
  auto grids = nlohmann::json::array();
  for (const auto& g : s.grids) {
    grids.push_back({{"rect", rect_to_json(g.rect)}, {"kind", g.card ? "card" : "frame"}, {"members", g.members}});
  }
  j["grids"] = grids;
  auto words = nlohmann::json::array();
  for (const auto& w : s.chars.words) {
    auto chars = nlohmann::json::array();
    for (const auto& c : w) chars.push_back(rect_to_json(c));
    words.push_back(chars);
  }
  j["words"] = words;
  return j;
}

/// Words of 2-6 characters scattered over a w x h canvas without overlap.
inline CharLayout gen_char_layout(std::uint64_t seed, int w, int h, int words) {
  Rng rng = make_rng(seed, "synthgen-chars");
  CharLayout out;
  std::vector<Rect> used;
  for (int wi = 0; wi < words; ++wi) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      const int ch = 2 * detail::uniform_int(rng, 4, 16);
      const int n = detail::uniform_int(rng, 2, 6);
      const int gap = std::max(1, static_cast<int>(std::lround(detail::uniform_real(rng, 0.1, 0.3) * ch)));
      std::vector<int> widths;
      int total = 0;
      for (int c = 0; c < n; ++c) {
        widths.push_back(std::max(2, static_cast<int>(std::lround(detail::uniform_real(rng, 0.5, 0.8) * ch))));
        total += widths.back() + (c ? gap : 0);
      }
      if (total + 8 > w || ch + 8 > h) continue;
      const Rect wr(detail::uniform_int(rng, 4, w - 4 - total), detail::uniform_int(rng, 4, h - 4 - ch), total, ch);
      if (!std::all_of(used.begin(), used.end(),
                       [&](const Rect& q) { return detail::separated(wr, q, ch, ch); })) {
        continue;
      }
      used.push_back(wr);
      std::vector<Rect> word;
      int x = static_cast<int>(wr.x());
      for (int c = 0; c < n; ++c) {
        word.emplace_back(x, wr.y(), widths[c], ch);
        x += widths[c] + gap;
      }
      out.words.push_back(std::move(word));
      break;
    }
  }
  return out;
}

/// Jittered detections around each ground-truth box: center offsets and
/// sizes drawn with sigma = jitter_sigma * box dimension, scored by IoU with
/// the truth plus N(0, 0.05) noise, clamped to [0.01, 1]. False positives are
/// random boxes scored in [0.01, 0.3].
inline std::vector<Proposal> gen_proposal_cloud(const Annotation& gts, int n_per_gt, double jitter_sigma,
                                                std::uint64_t seed, int false_positives = 0) {
  if (n_per_gt < 1) throw std::invalid_argument("gen_proposal_cloud: n_per_gt must be >= 1");
  if (jitter_sigma < 0) throw std::invalid_argument("gen_proposal_cloud: jitter_sigma must be >= 0");
  Rng rng = make_rng(seed, "synthgen-proposals");
  std::normal_distribution<double> unit(0.0, 1.0);
  const double W = gts.width, H = gts.height;
  std::vector<Proposal> out;
  for (const auto& gt : gts.objects) {
    const auto& r = gt.rect;
    for (int i = 0; i < n_per_gt; ++i) {
      const double cx = r.cx() + jitter_sigma * r.w() * unit(rng);
      const double cy = r.cy() + jitter_sigma * r.h() * unit(rng);
      const double w = std::max(1.0, r.w() * (1.0 + jitter_sigma * unit(rng)));
      const double h = std::max(1.0, r.h() * (1.0 + jitter_sigma * unit(rng)));
      const auto clipped = clip_to(Rect::from_center(cx, cy, w, h), W, H);
      const double noise = 0.05 * unit(rng);
      if (!clipped) continue;
      out.push_back(Proposal{*clipped, gt.cls, std::clamp(iou(*clipped, r) + noise, 0.01, 1.0)});
    }
  }
  for (int i = 0; i < false_positives; ++i) {
    const double w = detail::uniform_real(rng, 0.05, 0.3) * W;
    const double h = detail::uniform_real(rng, 0.02, 0.1) * H;
    const Rect r(detail::uniform_real(rng, 0, W - w), detail::uniform_real(rng, 0, H - h), w, h);
    const auto cls = kDetectorClassList[detail::uniform_int(rng, 0, kDetectorClasses - 1)];
    out.push_back(Proposal{r, cls, detail::uniform_real(rng, 0.01, 0.3)});
  }
  return out;
}

}  // namespace screenseg
