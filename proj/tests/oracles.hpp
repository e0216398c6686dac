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

// Brute-force reference implementations shared by the unit and acceptance
// tests. None of this calls into the library code it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "imgtrans/imgtrans.hpp"

namespace imgtrans::testing {

/// Full Levenshtein table over code units.
template <typename Seq>
std::size_t table_distance(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

using Partition = std::set<std::set<std::size_t>>;

// Transitive closure by Floyd-Warshall over an explicit adjacency matrix.
inline Partition closure_partition(std::size_t n, const std::function<bool(std::size_t, std::size_t)>& related) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) reach[i][j] = i == j || related(i, j) || related(j, i);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
      }
    }
  }
  Partition p;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) cls.insert(j);
    }
    p.insert(cls);
  }
  return p;
}

inline bool oracle_same_line(const BBox& a, const BBox& b) {
  const double inter = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double minh = std::min(a.y1 - a.y0, b.y1 - b.y0);
  if (minh <= 0 || inter / minh < 0.5) return false;
  const double gap = std::max({0.0, b.x0 - a.x1, a.x0 - b.x1});
  return gap <= 1.5 * minh;
}

inline double oracle_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

inline bool oracle_same_block(const BBox& a, const BBox& b, double med) {
  const double vgap = std::max({0.0, b.y0 - a.y1, a.y0 - b.y1});
  if (vgap > 1.5 * med) return false;
  const double hinter = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double minw = std::min(a.x1 - a.x0, b.x1 - b.x0);
  const bool overlap = minw > 0 && hinter / minw >= 0.3;
  const bool left = std::abs(a.x0 - b.x0) <= 0.2 * med;
  if (!overlap && !left) return false;
  const double ratio = (a.y1 - a.y0) / (b.y1 - b.y0);
  return ratio >= 2.0 / 3.0 && ratio <= 1.5;
}

inline std::vector<OCRToken> random_tokens(std::mt19937& rng, std::size_t max_tokens) {
  std::uniform_int_distribution<std::size_t> count(0, max_tokens);
  std::uniform_int_distribution<int> row(0, 5), col(0, 6);
  std::uniform_real_distribution<double> jitter(-4.0, 4.0), h(8.0, 16.0), w(10.0, 40.0);
  std::vector<OCRToken> out(count(rng));
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Snap to a coarse grid so that relations actually fire.
    const double y = row(rng) * 18.0 + jitter(rng);
    const double x = col(rng) * 35.0 + jitter(rng);
    out[i] = make_token("t" + std::to_string(i), BBox{x, y, x + w(rng), y + h(rng)});
  }
  return out;
}

inline Partition line_partition(const std::vector<TextLine>& lines) {
  Partition p;
  for (const auto& l : lines) p.insert(std::set<std::size_t>(l.token_ids.begin(), l.token_ids.end()));
  return p;
}

inline Partition block_token_partition(const std::vector<TextBlock>& blocks) {
  Partition p;
  for (const auto& b : blocks) {
    std::set<std::size_t> ids;
    for (const auto& l : b.lines) ids.insert(l.token_ids.begin(), l.token_ids.end());
    p.insert(ids);
  }
  return p;
}

}  // namespace imgtrans::testing
