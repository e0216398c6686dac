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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "imgtrans/image.hpp"

namespace imgtrans {

/// Granularity at which text is handed to translation.
enum class SegmentationLevel { kLine, kBlock };

inline const char* to_string(SegmentationLevel level) {
  return level == SegmentationLevel::kLine ? "line" : "block";
}

/// Source text tied to its layout position. line_refs index into the lines of
/// block `block_ref`.
struct TranslationUnit {
  std::size_t id = 0;
  std::string source_text;
  SegmentationLevel level = SegmentationLevel::kBlock;
  std::size_t block_ref = 0;
  std::vector<std::size_t> line_refs;
  std::optional<RasterImage> context_crop;
};

struct TranslatedUnit {
  std::size_t unit_id = 0;
  std::string target_text;
  std::string backend_name;

  friend bool operator==(const TranslatedUnit&, const TranslatedUnit&) = default;
};

}  // namespace imgtrans
