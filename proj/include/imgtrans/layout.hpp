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

// Geometric reference grouper: tokens into lines, lines into blocks, blocks
// into reading order, and blocks into translation units. A model-based
// grouper plugs in through LayoutBackend.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imgtrans/error.hpp"
#include "imgtrans/geometry.hpp"
#include "imgtrans/ocr.hpp"
#include "imgtrans/units.hpp"

namespace imgtrans {

struct TextLine {
  std::vector<OCRToken> tokens;
  /// Positions of the tokens in the list handed to group_lines.
  std::vector<std::size_t> token_ids;
  BBox bbox;

  double height() const { return bbox.height(); }

  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) out += ' ';
      out += tokens[i].text;
    }
    return out;
  }
};

struct TextBlock {
  std::vector<TextLine> lines;
  BBox bbox;
};

struct LayoutParams {
  double v_overlap_min = 0.5;
  double token_gap_factor = 1.5;
  double line_gap_factor = 1.5;
  double h_overlap_min = 0.3;
  double left_align_factor = 0.2;
  double size_ratio_low = 2.0 / 3.0;
  double size_ratio_high = 3.0 / 2.0;

  void validate() const {
    if (!(v_overlap_min > 0) || !(token_gap_factor > 0) || !(line_gap_factor > 0) ||
        !(h_overlap_min > 0) || !(left_align_factor > 0)) {
      throw Error(ErrorKind::kConfig, "layout thresholds must be positive");
    }
    if (!(size_ratio_low > 0.0 && size_ratio_low < 1.0 && size_ratio_high > 1.0)) {
      throw Error(ErrorKind::kConfig, "size ratio band must straddle 1");
    }
  }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Members of each set, sets ordered by smallest member.
inline std::vector<std::vector<std::size_t>> components(DisjointSets& sets, std::size_t n) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

inline double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace detail

/// Builds a line from tokens, ordering them by horizontal center.
inline TextLine make_line(std::span<const OCRToken> tokens, std::vector<std::size_t> ids) {
  if (ids.empty()) throw Error(ErrorKind::kInvalidArgument, "a line needs at least one token");
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return tokens[a].bbox().center_x() < tokens[b].bbox().center_x();
  });
  TextLine line;
  line.bbox = tokens[ids.front()].bbox();
  for (auto id : ids) {
    line.tokens.push_back(tokens[id]);
    line.bbox = bbox_union(line.bbox, tokens[id].bbox());
  }
  line.token_ids = std::move(ids);
  return line;
}

/// Builds a block from lines, ordering them by vertical center.
inline TextBlock make_block(std::vector<TextLine> lines) {
  if (lines.empty()) throw Error(ErrorKind::kInvalidArgument, "a block needs at least one line");
  std::stable_sort(lines.begin(), lines.end(), [](const TextLine& a, const TextLine& b) {
    return a.bbox.center_y() < b.bbox.center_y();
  });
  TextBlock block;
  block.bbox = lines.front().bbox;
  for (const auto& l : lines) block.bbox = bbox_union(block.bbox, l.bbox);
  block.lines = std::move(lines);
  return block;
}

/// Pairwise line relation: enough vertical overlap and a small horizontal gap.
inline bool tokens_share_line(const BBox& a, const BBox& b, const LayoutParams& p) {
  if (v_overlap(a, b) < p.v_overlap_min) return false;
  const double gap = interval_gap(a.x0, a.x1, b.x0, b.x1);
  return gap <= p.token_gap_factor * std::min(a.height(), b.height());
}

/// Pairwise block relation for two lines given the median line height.
inline bool lines_share_block(const BBox& a, const BBox& b, double median_height,
                              const LayoutParams& p) {
  const double vgap = interval_gap(a.y0, a.y1, b.y0, b.y1);
  if (vgap > p.line_gap_factor * median_height) return false;
  const bool aligned = h_overlap(a, b) >= p.h_overlap_min ||
                       std::abs(a.x0 - b.x0) <= p.left_align_factor * median_height;
  if (!aligned) return false;
  if (!(b.height() > 0.0)) return false;
  const double ratio = a.height() / b.height();
  return ratio >= p.size_ratio_low && ratio <= p.size_ratio_high;
}

inline std::vector<TextLine> group_lines(std::span<const OCRToken> tokens,
                                         const LayoutParams& params = {}) {
  const std::size_t n = tokens.size();
  std::vector<BBox> boxes;
  boxes.reserve(n);
  for (const auto& t : tokens) boxes.push_back(t.bbox());
  detail::DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (tokens_share_line(boxes[i], boxes[j], params)) sets.unite(i, j);
    }
  }
  std::vector<TextLine> lines;
  for (auto& members : detail::components(sets, n)) lines.push_back(make_line(tokens, members));
  std::stable_sort(lines.begin(), lines.end(), [](const TextLine& a, const TextLine& b) {
    if (a.bbox.y0 != b.bbox.y0) return a.bbox.y0 < b.bbox.y0;
    return a.bbox.x0 < b.bbox.x0;
  });
  return lines;
}

inline std::vector<TextBlock> group_blocks(std::span<const TextLine> lines,
                                           const LayoutParams& params = {}) {
  const std::size_t n = lines.size();
  std::vector<double> heights;
  heights.reserve(n);
  for (const auto& l : lines) heights.push_back(l.height());
  const double med = detail::median(heights);
  detail::DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (lines_share_block(lines[i].bbox, lines[j].bbox, med, params)) sets.unite(i, j);
    }
  }
  std::vector<TextBlock> blocks;
  for (auto& members : detail::components(sets, n)) {
    std::vector<TextLine> group;
    for (auto i : members) group.push_back(lines[i]);
    blocks.push_back(make_block(std::move(group)));
  }
  return blocks;
}

/// Top-to-bottom, then left-to-right; stable.
inline std::vector<TextBlock> order_blocks(std::vector<TextBlock> blocks) {
  std::stable_sort(blocks.begin(), blocks.end(), [](const TextBlock& a, const TextBlock& b) {
    if (a.bbox.y0 != b.bbox.y0) return a.bbox.y0 < b.bbox.y0;
    return a.bbox.x0 < b.bbox.x0;
  });
  return blocks;
}

inline std::vector<TranslationUnit> make_units(std::span<const TextBlock> blocks,
                                               SegmentationLevel level) {
  std::vector<TranslationUnit> units;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    if (level == SegmentationLevel::kLine) {
      for (std::size_t l = 0; l < block.lines.size(); ++l) {
        TranslationUnit u;
        u.id = units.size();
        u.source_text = block.lines[l].text();
        u.level = level;
        u.block_ref = b;
        u.line_refs = {l};
        units.push_back(std::move(u));
      }
    } else {
      TranslationUnit u;
      u.id = units.size();
      u.level = level;
      u.block_ref = b;
      for (std::size_t l = 0; l < block.lines.size(); ++l) {
        if (l > 0) u.source_text += '\n';
        u.source_text += block.lines[l].text();
        u.line_refs.push_back(l);
      }
      units.push_back(std::move(u));
    }
  }
  return units;
}

// ---------------------------------------------------------------------------

class LayoutBackend {
 public:
  virtual ~LayoutBackend() = default;
  virtual const BackendInfo& info() const = 0;
  /// Returns blocks already in reading order.
  virtual std::vector<TextBlock> analyze(std::span<const OCRToken> tokens,
                                         std::string_view image_id) = 0;
};

class GeometricLayout final : public LayoutBackend {
 public:
  explicit GeometricLayout(LayoutParams params = {}) : params_(params) { params_.validate(); }

  const BackendInfo& info() const override { return info_; }

  std::vector<TextBlock> analyze(std::span<const OCRToken> tokens, std::string_view) override {
    const auto lines = group_lines(tokens, params_);
    return order_blocks(group_blocks(lines, params_));
  }

  const LayoutParams& params() const { return params_; }

 private:
  LayoutParams params_;
  BackendInfo info_{"geometric", {}, true};
};

/// Uses the line/block ids stored next to ground-truth tokens in an annotation
/// sidecar. Tokens without ids become singleton lines; lines without a block
/// id become singleton blocks.
class GroundTruthLayout final : public LayoutBackend {
 public:
  explicit GroundTruthLayout(AnnotationSet set) : set_(std::move(set)) {}

  const BackendInfo& info() const override { return info_; }

  std::vector<TextBlock> analyze(std::span<const OCRToken> tokens,
                                 std::string_view image_id) override {
    const std::vector<AnnotatedToken>* list = nullptr;
    if (auto it = set_.find(std::string(image_id)); it != set_.end()) {
      list = &it->second;
    } else if (auto it2 = set_.find(std::filesystem::path(std::string(image_id)).filename().string());
               it2 != set_.end()) {
      list = &it2->second;
    }
    // Keys: (block key, line key); negative keys are synthesized singletons.
    std::map<long, std::map<long, std::vector<std::size_t>>> grouping;
    long synthetic = -1;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::optional<int> line_id, block_id;
      if (list != nullptr) {
        for (const auto& at : *list) {
          if (at.token.text == tokens[i].text && at.token.poly == tokens[i].poly) {
            line_id = at.line;
            block_id = at.block;
            break;
          }
        }
      }
      const long lkey = line_id ? *line_id : synthetic--;
      const long bkey = block_id ? *block_id : (line_id ? -1000000L - *line_id : lkey);
      grouping[bkey][lkey].push_back(i);
    }
    std::vector<TextBlock> blocks;
    for (auto& [bkey, line_map] : grouping) {
      std::vector<TextLine> lines;
      for (auto& [lkey, ids] : line_map) lines.push_back(make_line(tokens, ids));
      blocks.push_back(make_block(std::move(lines)));
    }
    return order_blocks(std::move(blocks));
  }

 private:
  AnnotationSet set_;
  BackendInfo info_{"ground-truth", {}, true};
};

}  // namespace imgtrans
