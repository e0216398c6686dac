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

// Per-image record of everything the pipeline detected and produced.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "imgtrans/error.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/ocr.hpp"
#include "imgtrans/render.hpp"
#include "imgtrans/timing.hpp"
#include "imgtrans/units.hpp"

namespace imgtrans {

struct SidecarLine {
  std::size_t id = 0;
  std::size_t block = 0;
  std::vector<std::size_t> token_ids;
  BBox bbox;

  friend bool operator==(const SidecarLine&, const SidecarLine&) = default;
};

struct SidecarBlock {
  std::size_t id = 0;
  std::vector<std::size_t> line_ids;
  BBox bbox;

  friend bool operator==(const SidecarBlock&, const SidecarBlock&) = default;
};

struct SidecarUnit {
  std::size_t id = 0;
  std::string source_text;
  SegmentationLevel level = SegmentationLevel::kBlock;
  std::size_t block_ref = 0;
  std::vector<std::size_t> line_refs;

  friend bool operator==(const SidecarUnit&, const SidecarUnit&) = default;
};

struct StageFailure {
  std::string stage;
  std::string message;

  friend bool operator==(const StageFailure&, const StageFailure&) = default;
};

struct SidecarDocument {
  std::string image_id;
  std::string src;
  std::string tgt;
  SegmentationLevel level = SegmentationLevel::kBlock;
  std::vector<OCRToken> tokens;
  std::vector<SidecarLine> lines;
  std::vector<SidecarBlock> blocks;
  std::vector<SidecarUnit> units;
  std::vector<TranslatedUnit> translations;
  std::vector<RenderSpec> render_specs;
  std::array<double, 5> timings{};
  Warnings warnings;
  std::optional<StageFailure> failure;

  friend bool operator==(const SidecarDocument&, const SidecarDocument&) = default;

  /// Fills tokens/lines/blocks from a layout result. Line ids run over all
  /// blocks in reading order.
  void set_layout(std::span<const TextBlock> layout) {
    lines.clear();
    blocks.clear();
    for (std::size_t b = 0; b < layout.size(); ++b) {
      SidecarBlock sb{b, {}, layout[b].bbox};
      for (const auto& line : layout[b].lines) {
        sb.line_ids.push_back(lines.size());
        lines.push_back({lines.size(), b, line.token_ids, line.bbox});
      }
      blocks.push_back(std::move(sb));
    }
  }

  void set_units(std::span<const TranslationUnit> list) {
    units.clear();
    for (const auto& u : list) units.push_back({u.id, u.source_text, u.level, u.block_ref, u.line_refs});
  }

  void set_timings(const StageTimes& t) {
    for (auto s : kStages) timings[static_cast<std::size_t>(s)] = t[s];
  }
};

namespace detail {

inline nlohmann::json bbox_to_json(const BBox& b) { return {b.x0, b.y0, b.x1, b.y1}; }

inline BBox bbox_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorKind::kDecode, "bbox must be [x0,y0,x1,y1]");
  return BBox::make(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

inline SegmentationLevel level_from_string(const std::string& s) {
  if (s == "line") return SegmentationLevel::kLine;
  if (s == "block") return SegmentationLevel::kBlock;
  throw Error(ErrorKind::kDecode, "unknown segmentation level '" + s + "'");
}

}  // namespace detail

inline nlohmann::json render_spec_to_json(const RenderSpec& s) {
  return {{"text", s.text},
          {"target_box", detail::bbox_to_json(s.target_box)},
          {"initial_px", s.initial_px},
          {"final_px", s.final_px},
          {"color", {s.color.r, s.color.g, s.color.b}},
          {"align", to_string(s.align)},
          {"overflow", s.overflow},
          {"shrink_steps", s.shrink_steps},
          {"block", s.block_ref},
          {"line", s.line_ref}};
}

inline RenderSpec render_spec_from_json(const nlohmann::json& j) {
  RenderSpec s;
  s.text = j.at("text").get<std::string>();
  s.target_box = detail::bbox_from_json(j.at("target_box"));
  s.initial_px = j.at("initial_px").get<double>();
  s.final_px = j.at("final_px").get<double>();
  const auto& c = j.at("color");
  s.color = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(), c.at(2).get<std::uint8_t>()};
  s.align = align_from_string(j.at("align").get<std::string>());
  s.overflow = j.at("overflow").get<bool>();
  s.shrink_steps = j.at("shrink_steps").get<int>();
  s.block_ref = j.at("block").get<std::size_t>();
  s.line_ref = j.at("line").get<std::size_t>();
  return s;
}

inline nlohmann::json timings_to_json(const std::array<double, 5>& t) {
  nlohmann::json j = nlohmann::json::object();
  for (auto s : kStages) j[stage_key(s)] = t[static_cast<std::size_t>(s)];
  return j;
}

inline nlohmann::json sidecar_to_json(const SidecarDocument& d) {
  nlohmann::json j;
  j["image_id"] = d.image_id;
  j["pair"] = {{"src", d.src}, {"tgt", d.tgt}};
  j["level"] = to_string(d.level);
  j["tokens"] = nlohmann::json::array();
  for (const auto& t : d.tokens) j["tokens"].push_back(token_to_json(t));
  j["lines"] = nlohmann::json::array();
  for (const auto& l : d.lines) {
    j["lines"].push_back({{"id", l.id}, {"block", l.block}, {"tokens", l.token_ids}, {"bbox", detail::bbox_to_json(l.bbox)}});
  }
  j["blocks"] = nlohmann::json::array();
  for (const auto& b : d.blocks) {
    j["blocks"].push_back({{"id", b.id}, {"lines", b.line_ids}, {"bbox", detail::bbox_to_json(b.bbox)}});
  }
  j["units"] = nlohmann::json::array();
  for (const auto& u : d.units) {
    j["units"].push_back({{"id", u.id},
                          {"source", u.source_text},
                          {"level", to_string(u.level)},
                          {"block", u.block_ref},
                          {"lines", u.line_refs}});
  }
  j["translations"] = nlohmann::json::array();
  for (const auto& t : d.translations) {
    j["translations"].push_back({{"unit", t.unit_id}, {"text", t.target_text}, {"backend", t.backend_name}});
  }
  j["render_specs"] = nlohmann::json::array();
  for (const auto& s : d.render_specs) j["render_specs"].push_back(render_spec_to_json(s));
  j["timings"] = timings_to_json(d.timings);
  j["warnings"] = d.warnings;
  j["error"] = d.failure ? nlohmann::json{{"stage", d.failure->stage}, {"message", d.failure->message}}
                         : nlohmann::json(nullptr);
  return j;
}

inline SidecarDocument sidecar_from_json(const nlohmann::json& j) {
  try {
    SidecarDocument d;
    d.image_id = j.at("image_id").get<std::string>();
    d.src = j.at("pair").at("src").get<std::string>();
    d.tgt = j.at("pair").at("tgt").get<std::string>();
    d.level = detail::level_from_string(j.at("level").get<std::string>());
    for (const auto& t : j.at("tokens")) d.tokens.push_back(token_from_json(t));
    for (const auto& l : j.at("lines")) {
      d.lines.push_back({l.at("id").get<std::size_t>(), l.at("block").get<std::size_t>(),
                         l.at("tokens").get<std::vector<std::size_t>>(), detail::bbox_from_json(l.at("bbox"))});
    }
    for (const auto& b : j.at("blocks")) {
      d.blocks.push_back({b.at("id").get<std::size_t>(), b.at("lines").get<std::vector<std::size_t>>(),
                          detail::bbox_from_json(b.at("bbox"))});
    }
    for (const auto& u : j.at("units")) {
      d.units.push_back({u.at("id").get<std::size_t>(), u.at("source").get<std::string>(),
                         detail::level_from_string(u.at("level").get<std::string>()), u.at("block").get<std::size_t>(),
                         u.at("lines").get<std::vector<std::size_t>>()});
    }
    for (const auto& t : j.at("translations")) {
      d.translations.push_back(
          {t.at("unit").get<std::size_t>(), t.at("text").get<std::string>(), t.at("backend").get<std::string>()});
    }
    for (const auto& s : j.at("render_specs")) d.render_specs.push_back(render_spec_from_json(s));
    for (auto s : kStages) d.timings[static_cast<std::size_t>(s)] = j.at("timings").at(stage_key(s)).get<double>();
    d.warnings = j.at("warnings").get<Warnings>();
    if (const auto& e = j.at("error"); !e.is_null()) {
      d.failure = StageFailure{e.at("stage").get<std::string>(), e.at("message").get<std::string>()};
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kDecode, std::string("sidecar: ") + e.what());
  }
}

inline std::string serialize_sidecar(const SidecarDocument& d) { return sidecar_to_json(d).dump(2) + "\n"; }

inline SidecarDocument parse_sidecar(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kDecode, std::string("sidecar: ") + e.what());
  }
  return sidecar_from_json(j);
}

inline void save_sidecar(const SidecarDocument& d, const std::filesystem::path& path) {
  write_file(path, serialize_sidecar(d));
}

inline SidecarDocument load_sidecar(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_sidecar(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace imgtrans
