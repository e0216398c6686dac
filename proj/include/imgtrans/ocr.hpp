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

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "imgtrans/error.hpp"
#include "imgtrans/geometry.hpp"
#include "imgtrans/image.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/text.hpp"

namespace imgtrans {

/// One detected text fragment.
struct OCRToken {
  std::string text;
  Polygon poly;
  double conf = 1.0;

  BBox bbox() const { return polygon_to_bbox(poly); }

  friend bool operator==(const OCRToken&, const OCRToken&) = default;
};

inline OCRToken make_token(std::string text, Polygon poly, double conf = 1.0) {
  if (text::trim(text).empty()) {
    throw Error(ErrorKind::kInvalidArgument, "token text is empty");
  }
  if (!(conf >= 0.0 && conf <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "token confidence outside [0,1]");
  }
  return OCRToken{std::move(text), std::move(poly), conf};
}

inline OCRToken make_token(std::string text, const BBox& box, double conf = 1.0) {
  return make_token(std::move(text), Polygon::from_bbox(box), conf);
}

struct OCRConfig {
  double min_conf = 0.5;
  std::optional<std::string> lang_hint;
};

struct BackendInfo {
  std::string name;
  std::vector<std::string> languages;  // empty means any
  bool concurrent = false;
};

class OcrBackend {
 public:
  virtual ~OcrBackend() = default;
  virtual const BackendInfo& info() const = 0;
  /// Raw detections; must be deterministic for fixed configuration and input.
  virtual std::vector<OCRToken> detect(const RasterImage& image, const OCRConfig& cfg,
                                       std::string_view image_id) = 0;
};

/// Clamps every polygon to the image rectangle. Tokens whose polygon lies
/// entirely outside collapse to zero area and are dropped with a warning.
inline std::vector<OCRToken> clamp_tokens(std::vector<OCRToken> tokens, int width, int height,
                                          Warnings* warnings = nullptr) {
  std::vector<OCRToken> out;
  out.reserve(tokens.size());
  for (auto& tok : tokens) {
    std::vector<Point> pts(tok.poly.points().begin(), tok.poly.points().end());
    for (auto& p : pts) {
      p.x = std::clamp(p.x, 0.0, static_cast<double>(width));
      p.y = std::clamp(p.y, 0.0, static_cast<double>(height));
    }
    try {
      tok.poly = Polygon(std::move(pts));
      out.push_back(std::move(tok));
    } catch (const Error&) {
      warn(warnings, "token '" + tok.text + "' lies outside the image and was dropped");
    }
  }
  return out;
}

/// Runs the backend; never filters by confidence.
inline std::vector<OCRToken> recognize(const RasterImage& image, const OCRConfig& cfg,
                                       OcrBackend& backend, std::string_view image_id = {},
                                       Warnings* warnings = nullptr) {
  if (image.empty()) throw Error(ErrorKind::kInvalidArgument, "recognize: empty image");
  return clamp_tokens(backend.detect(image, cfg, image_id), image.width(), image.height(),
                      warnings);
}

inline std::vector<OCRToken> filter_tokens(std::span<const OCRToken> tokens, double min_conf) {
  std::vector<OCRToken> out;
  for (const auto& t : tokens) {
    if (t.conf >= min_conf) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation sidecar: { "<image id>": [ {text, poly: [[x,y],...], conf?,
// line?, block?}, ... ], ... }. The optional line/block ids carry a
// ground-truth segmentation.

struct AnnotatedToken {
  OCRToken token;
  std::optional<int> line;
  std::optional<int> block;

  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;
};

using AnnotationSet = std::map<std::string, std::vector<AnnotatedToken>>;

inline nlohmann::json polygon_to_json(const Polygon& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& pt : p.points()) arr.push_back({pt.x, pt.y});
  return arr;
}

inline Polygon polygon_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kInvalidGeometry, "poly must be an array of [x,y]");
  std::vector<Point> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorKind::kInvalidGeometry, "poly point must be [x,y]");
    }
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return Polygon(std::move(pts));
}

inline nlohmann::json token_to_json(const OCRToken& t) {
  return {{"text", t.text}, {"poly", polygon_to_json(t.poly)}, {"conf", t.conf}};
}

inline OCRToken token_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("poly")) {
    throw Error(ErrorKind::kMalformedResponse, "token needs text and poly");
  }
  const double conf = j.contains("conf") && !j["conf"].is_null() ? j["conf"].get<double>() : 1.0;
  return make_token(j["text"].get<std::string>(), polygon_from_json(j["poly"]), conf);
}

inline AnnotationSet parse_annotations(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kDataset, "annotation document must be an object");
  AnnotationSet set;
  for (const auto& [id, list] : doc.items()) {
    if (!list.is_array()) throw Error(ErrorKind::kDataset, "annotations for " + id + " not a list");
    auto& out = set[id];
    for (const auto& entry : list) {
      AnnotatedToken at{token_from_json(entry), std::nullopt, std::nullopt};
      if (entry.contains("line")) at.line = entry["line"].get<int>();
      if (entry.contains("block")) at.block = entry["block"].get<int>();
      out.push_back(std::move(at));
    }
  }
  return set;
}

inline nlohmann::json annotations_to_json(const AnnotationSet& set) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [id, list] : set) {
    auto& arr = doc[id] = nlohmann::json::array();
    for (const auto& at : list) {
      auto j = token_to_json(at.token);
      if (at.line) j["line"] = *at.line;
      if (at.block) j["block"] = *at.block;
      arr.push_back(std::move(j));
    }
  }
  return doc;
}

inline AnnotationSet load_annotations(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kMissingFile, "annotation sidecar not found: " + path.string());
  }
  const auto bytes = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kDataset, path.string() + ": " + e.what());
  }
  return parse_annotations(doc);
}

inline void save_annotations(const AnnotationSet& set, const std::filesystem::path& path) {
  write_file(path, annotations_to_json(set).dump(2));
}

/// Replays ground-truth tokens from an annotation sidecar.
class AnnotationBackend final : public OcrBackend {
 public:
  explicit AnnotationBackend(AnnotationSet set, std::string name = "annotation")
      : set_(std::move(set)), info_{std::move(name), {}, true} {}

  const BackendInfo& info() const override { return info_; }

  std::vector<OCRToken> detect(const RasterImage&, const OCRConfig&,
                               std::string_view image_id) override {
    const auto& list = lookup(image_id);
    std::vector<OCRToken> out;
    out.reserve(list.size());
    for (const auto& at : list) out.push_back(at.token);
    return out;
  }

  const std::vector<AnnotatedToken>& lookup(std::string_view image_id) const {
    auto it = set_.find(std::string(image_id));
    if (it == set_.end()) {
      // Fall back to the bare file name so deck media parts and paths match.
      const auto base = std::filesystem::path(std::string(image_id)).filename().string();
      it = set_.find(base);
    }
    if (it == set_.end()) {
      throw Error(ErrorKind::kUnknownImage, "no annotations for image '" + std::string(image_id) + "'");
    }
    return it->second;
  }

  bool has(std::string_view image_id) const {
    return set_.count(std::string(image_id)) > 0 ||
           set_.count(std::filesystem::path(std::string(image_id)).filename().string()) > 0;
  }

  const AnnotationSet& annotations() const { return set_; }

 private:
  AnnotationSet set_;
  BackendInfo info_;
};

inline std::unique_ptr<AnnotationBackend> annotation_backend(const std::filesystem::path& sidecar) {
  return std::make_unique<AnnotationBackend>(load_annotations(sidecar));
}

}  // namespace imgtrans
