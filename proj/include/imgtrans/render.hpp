// Copyright 2026 The imgtrans Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Heuristic drawing: estimate the original styling of a block, fit the
// translated text into the original line boxes and composite it.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "imgtrans/error.hpp"
#include "imgtrans/font.hpp"
#include "imgtrans/geometry.hpp"
#include "imgtrans/image.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/translation.hpp"
#include "imgtrans/units.hpp"

namespace imgtrans {

enum class Align { kLeft, kCenter, kRight };

inline const char* to_string(Align a) {
  switch (a) {
    case Align::kLeft: return "left";
    case Align::kCenter: return "center";
    case Align::kRight: return "right";
  }
  return "left";
}

inline Align align_from_string(std::string_view s) {
  if (s == "center") return Align::kCenter;
  if (s == "right") return Align::kRight;
  if (s == "left") return Align::kLeft;
  throw Error(ErrorKind::kInvalidArgument, "unknown alignment '" + std::string(s) + "'");
}

struct Style {
  double font_px = 0.0;
  Color color;
  Align align = Align::kLeft;
};

struct RenderParams {
  double shrink_factor = 0.95;
  double width_tolerance = 1.05;
  double floor_ratio = 0.5;
  double size_from_line_height = 0.9;
  double box_padding = 0.10;

  void validate() const {
    if (!(shrink_factor > 0.0 && shrink_factor < 1.0)) {
      throw Error(ErrorKind::kConfig, "shrink_factor must be in (0,1)");
    }
    if (!(width_tolerance >= 1.0)) throw Error(ErrorKind::kConfig, "width_tolerance must be >= 1");
    if (!(floor_ratio > 0.0 && floor_ratio <= 1.0)) {
      throw Error(ErrorKind::kConfig, "floor_ratio must be in (0,1]");
    }
    if (!(size_from_line_height > 0.0)) throw Error(ErrorKind::kConfig, "size_from_line_height must be > 0");
    if (!(box_padding >= 0.0)) throw Error(ErrorKind::kConfig, "box_padding must be >= 0");
  }
};

struct RenderSpec {
  std::string text;
  BBox target_box;
  double initial_px = 0.0;
  double final_px = 0.0;
  Color color;
  Align align = Align::kLeft;
  /// Text is still wider than the tolerance at the size floor.
  bool overflow = false;
  int shrink_steps = 0;
  std::size_t block_ref = 0;
  std::size_t line_ref = 0;

  friend bool operator==(const RenderSpec&, const RenderSpec&) = default;
};

namespace detail {

inline double variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

inline int luminance(Color c) { return c.r + c.g + c.b; }

inline std::uint8_t round_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace detail

/// Text color by 2-means over the pixels under the block's tokens (the
/// smaller cluster is the ink), size from the median line height, alignment
/// from the least-varying line edge.
inline Style estimate_style(const RasterImage& image, const TextBlock& block,
                            const RenderParams& params = {}) {
  const BBox bounds{0.0, 0.0, static_cast<double>(image.width()),
                    static_cast<double>(image.height())};
  if (!bounds.contains(block.bbox, 1e-6)) {
    throw Error(ErrorKind::kInvalidRegion, "block bbox lies outside the image");
  }
  Style style;

  std::vector<double> heights;
  for (const auto& l : block.lines) heights.push_back(l.height());
  style.font_px = params.size_from_line_height * detail::median(heights);

  if (block.lines.size() > 1) {
    std::vector<double> lefts, centers, rights;
    for (const auto& l : block.lines) {
      lefts.push_back(l.bbox.x0);
      centers.push_back(l.bbox.center_x());
      rights.push_back(l.bbox.x1);
    }
    const std::array<double, 3> v = {detail::variance(lefts), detail::variance(centers),
                                     detail::variance(rights)};
    style.align = Align::kLeft;
    if (v[1] < v[0] && v[1] <= v[2]) style.align = Align::kCenter;
    if (v[2] < v[0] && v[2] < v[1]) style.align = Align::kRight;
  }

  Mask covered(image.width(), image.height());
  for (const auto& l : block.lines) {
    for (const auto& t : l.tokens) fill_box(covered, t.bbox());
  }
  std::vector<Color> pixels;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (covered.at(x, y)) pixels.push_back(image.at(x, y));
    }
  }
  if (pixels.empty()) {
    style.color = {0, 0, 0};
    return style;
  }
  Color dark = pixels.front(), light = pixels.front();
  for (const auto& c : pixels) {
    if (detail::luminance(c) < detail::luminance(dark)) dark = c;
    if (detail::luminance(c) > detail::luminance(light)) light = c;
  }
  if (dark == light) {
    style.color = dark;
    return style;
  }
  std::array<std::array<double, 3>, 2> centroid = {
      std::array<double, 3>{double(dark.r), double(dark.g), double(dark.b)},
      std::array<double, 3>{double(light.r), double(light.g), double(light.b)}};
  std::vector<int> assign(pixels.size(), -1);
  std::array<std::size_t, 2> counts{};
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    std::array<std::array<double, 3>, 2> sums{};
    counts = {0, 0};
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const double px[3] = {double(pixels[i].r), double(pixels[i].g), double(pixels[i].b)};
      double d[2];
      for (int k = 0; k < 2; ++k) {
        d[k] = 0.0;
        for (int c = 0; c < 3; ++c) d[k] += (px[c] - centroid[k][c]) * (px[c] - centroid[k][c]);
      }
      const int k = d[1] < d[0] ? 1 : 0;
      if (assign[i] != k) changed = true;
      assign[i] = k;
      ++counts[k];
      for (int c = 0; c < 3; ++c) sums[k][c] += px[c];
    }
    for (int k = 0; k < 2; ++k) {
      if (counts[k] == 0) continue;
      for (int c = 0; c < 3; ++c) centroid[k][c] = sums[k][c] / static_cast<double>(counts[k]);
    }
    if (!changed) break;
  }
  auto lum = [&](int k) { return centroid[k][0] + centroid[k][1] + centroid[k][2]; };
  int ink;
  if (counts[0] == 0) {
    ink = 1;
  } else if (counts[1] == 0) {
    ink = 0;
  } else if (counts[0] != counts[1]) {
    ink = counts[0] < counts[1] ? 0 : 1;
  } else {
    ink = lum(0) <= lum(1) ? 0 : 1;
  }
  style.color = {detail::round_channel(centroid[ink][0]), detail::round_channel(centroid[ink][1]),
                 detail::round_channel(centroid[ink][2])};
  return style;
}

/// Shrinks from style.font_px by shrink_factor until the text fits within
/// width_tolerance × box width or the floor is reached. Never truncates; a
/// text still too wide at the floor is flagged as overflow.
inline RenderSpec fit_text(std::string_view text, const BBox& line_box, const Style& style,
                           const FontMetrics& metrics, const RenderParams& params = {}) {
  RenderSpec spec;
  spec.text = std::string(text);
  spec.target_box = line_box;
  spec.initial_px = style.font_px;
  spec.final_px = style.font_px;
  spec.color = style.color;
  spec.align = style.align;
  if (text.empty()) return spec;
  const double floor_px = params.floor_ratio * style.font_px;
  const double limit = params.width_tolerance * line_box.width();
  double px = style.font_px;
  while (metrics.measure(text, px).width > limit) {
    if (px <= floor_px) {
      spec.overflow = true;
      break;
    }
    px = std::max(px * params.shrink_factor, floor_px);
    ++spec.shrink_steps;
  }
  spec.final_px = px;
  return spec;
}

/// Render specs for one translated unit. Block-level text is redistributed
/// over the block's lines and all lines share the smallest fitted size;
/// line-level text goes to its own line.
inline std::vector<RenderSpec> plan_block(const TextBlock& block, const TranslationUnit& unit,
                                          const TranslatedUnit& translated, const Style& style,
                                          const FontMetrics& metrics,
                                          const RenderParams& params = {}) {
  if (translated.unit_id != unit.id) {
    throw Error(ErrorKind::kInvalidArgument, "translation does not belong to unit");
  }
  std::vector<RenderSpec> specs;
  const std::string target = text::normalize_space(translated.target_text);
  if (target.empty()) return specs;

  std::vector<std::string> texts;
  if (unit.line_refs.size() == 1) {
    texts.push_back(target);
  } else {
    std::vector<double> weights;
    for (auto l : unit.line_refs) {
      weights.push_back(std::max<double>(1.0, text::codepoint_count(block.lines.at(l).text())));
    }
    texts = redistribute(target, weights);
  }
  for (std::size_t i = 0; i < unit.line_refs.size(); ++i) {
    if (texts[i].empty()) continue;
    const auto line_idx = unit.line_refs[i];
    auto spec = fit_text(texts[i], block.lines.at(line_idx).bbox, style, metrics, params);
    spec.block_ref = unit.block_ref;
    spec.line_ref = line_idx;
    specs.push_back(std::move(spec));
  }
  if (specs.size() > 1) {
    double shared = specs.front().final_px;
    for (const auto& s : specs) shared = std::min(shared, s.final_px);
    for (auto& s : specs) {
      s.final_px = shared;
      s.overflow = metrics.measure(s.text, shared).width >
                   params.width_tolerance * s.target_box.width();
    }
  }
  return specs;
}

/// Composites every spec onto a copy of `image`. Glyph pixels are clipped to
/// the target box padded by box_padding on each side.
inline RasterImage draw(const RasterImage& image, std::span<const RenderSpec> specs,
                        const TrueTypeFont& font, const RenderParams& params = {},
                        Warnings* warnings = nullptr) {
  RasterImage out = image;
  for (const auto& spec : specs) {
    if (spec.text.empty() || !(spec.final_px > 0.0)) continue;
    const double width = font.measure(spec.text, spec.final_px).width;
    const BBox& box = spec.target_box;
    double x = box.x0;
    if (spec.align == Align::kCenter) x = box.center_x() - 0.5 * width;
    if (spec.align == Align::kRight) x = box.x1 - width;
    const auto [ascent, descent] = font.vertical_extent(spec.final_px);
    const double baseline = box.center_y() + 0.5 * (ascent + descent);
    font.draw_text(out, spec.text, spec.final_px, x, baseline, spec.color,
                   box.padded(params.box_padding), warnings);
  }
  return out;
}

}  // namespace imgtrans
