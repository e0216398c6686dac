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

#include <array>
#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imgtrans/error.hpp"

namespace imgtrans {

/// The five pipeline stages, in execution order.
enum class Stage { kOcr = 0, kLayout, kTranslation, kInpainting, kDrawing };

inline constexpr std::array<Stage, 5> kStages = {Stage::kOcr, Stage::kLayout, Stage::kTranslation,
                                                 Stage::kInpainting, Stage::kDrawing};

/// Display name used in timing tables.
inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kOcr: return "OCR";
    case Stage::kLayout: return "Layout Analysis";
    case Stage::kTranslation: return "Multimodal Translation";
    case Stage::kInpainting: return "Inpainting";
    case Stage::kDrawing: return "Drawing";
  }
  return "";
}

/// Short machine key used in configs, errors and JSON.
inline const char* stage_key(Stage s) {
  switch (s) {
    case Stage::kOcr: return "ocr";
    case Stage::kLayout: return "layout";
    case Stage::kTranslation: return "translation";
    case Stage::kInpainting: return "inpainting";
    case Stage::kDrawing: return "drawing";
  }
  return "";
}

inline Stage stage_from_key(std::string_view key) {
  for (auto s : kStages) {
    if (key == stage_key(s)) return s;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown stage '" + std::string(key) + "'");
}

/// Wall-clock seconds per stage; stages that never ran stay at zero.
class StageTimes {
 public:
  template <typename F>
  decltype(auto) time(Stage stage, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      StageTimes* self;
      Stage stage;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        self->seconds_[static_cast<std::size_t>(stage)] +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } record{this, stage, start};
    return std::forward<F>(fn)();
  }

  double operator[](Stage s) const { return seconds_[static_cast<std::size_t>(s)]; }
  double& operator[](Stage s) { return seconds_[static_cast<std::size_t>(s)]; }

  double total() const {
    double t = 0.0;
    for (double s : seconds_) t += s;
    return t;
  }

  StageTimes& operator+=(const StageTimes& o) {
    for (std::size_t i = 0; i < seconds_.size(); ++i) seconds_[i] += o.seconds_[i];
    return *this;
  }

 private:
  std::array<double, 5> seconds_{};
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Exactly five rows in pipeline order.
inline std::vector<StageTiming> timing_report(const StageTimes& times) {
  std::vector<StageTiming> rows;
  for (auto s : kStages) rows.push_back({stage_name(s), times[s]});
  return rows;
}

}  // namespace imgtrans
