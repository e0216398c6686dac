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

// Pipeline configuration. The canonical form is one JSON document with
// namespaced keys; values are layered defaults < file < environment < CLI.
// Environment variables are named IMGTRANS_<KEY PATH>, path segments joined
// by "__" and upper-cased (IMGTRANS_LAYOUT__V_OVERLAP_MIN).

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "imgtrans/error.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/inpaint.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/ocr.hpp"
#include "imgtrans/render.hpp"
#include "imgtrans/translation.hpp"
#include "imgtrans/units.hpp"

namespace imgtrans {

/// Backend selectors. Mock selectors: ocr "annotation" (reads ocr.annotations)
/// or "annotation:PATH"; layout "geometric", "ground-truth" or
/// "ground-truth:PATH"; mt "identity" or "dictionary:PATH"; inpaint "naive".
/// Any stage also accepts an http:// base URL.
struct BackendSelectors {
  std::string ocr = "annotation";
  std::string layout = "geometric";
  std::string mt = "identity";
  std::string text_mt;  // deck text runs; empty means use mt
  std::string inpaint = "naive";

  friend bool operator==(const BackendSelectors&, const BackendSelectors&) = default;
};

struct RemoteSettings {
  int connect_timeout_ms = 5000;
  int read_timeout_ms = 120000;
  bool concurrent = false;

  friend bool operator==(const RemoteSettings&, const RemoteSettings&) = default;
};

struct PipelineConfig {
  LangPair pair{"en", "de"};
  SegmentationLevel level = SegmentationLevel::kBlock;
  BackendSelectors backends;
  OCRConfig ocr;
  std::string annotations;
  LayoutParams layout;
  MaskParams mask;
  RenderParams render;
  std::string font;
  std::map<std::string, std::string> fonts;  // target language -> font path
  Modality mt_modality = Modality::kTextImage;
  bool full_image_context = false;
  double context_pad = 0.10;
  bool merge_paragraphs = false;
  RemoteSettings remote;
  std::string output_dir = "out";
  int jobs = 1;

  /// Font for the configured target language.
  std::filesystem::path font_path() const {
    if (auto it = fonts.find(pair.tgt); it != fonts.end()) return it->second;
    if (!font.empty()) return font;
    return default_font_path();
  }
};

inline const char* to_string(Modality m) { return m == Modality::kText ? "text" : "text+image"; }

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["pair"] = {{"src", c.pair.src}, {"tgt", c.pair.tgt}};
  j["level"] = to_string(c.level);
  j["backends"] = {{"ocr", c.backends.ocr},
                   {"layout", c.backends.layout},
                   {"mt", c.backends.mt},
                   {"text_mt", c.backends.text_mt},
                   {"inpaint", c.backends.inpaint}};
  j["ocr"] = {{"min_conf", c.ocr.min_conf},
              {"lang_hint", c.ocr.lang_hint ? nlohmann::json(*c.ocr.lang_hint) : nlohmann::json(nullptr)},
              {"annotations", c.annotations}};
  j["layout"] = {{"v_overlap_min", c.layout.v_overlap_min},       {"token_gap_factor", c.layout.token_gap_factor},
                 {"line_gap_factor", c.layout.line_gap_factor},   {"h_overlap_min", c.layout.h_overlap_min},
                 {"left_align_factor", c.layout.left_align_factor}, {"size_ratio_low", c.layout.size_ratio_low},
                 {"size_ratio_high", c.layout.size_ratio_high}};
  j["mask"] = {{"dilation_frac", c.mask.dilation_frac}, {"ring_width", c.mask.ring_width}};
  j["render"] = {{"shrink_factor", c.render.shrink_factor},
                 {"width_tolerance", c.render.width_tolerance},
                 {"floor_ratio", c.render.floor_ratio},
                 {"size_from_line_height", c.render.size_from_line_height},
                 {"box_padding", c.render.box_padding},
                 {"font", c.font},
                 {"fonts", c.fonts}};
  j["translation"] = {{"modality", to_string(c.mt_modality)},
                      {"full_image_context", c.full_image_context},
                      {"context_pad", c.context_pad}};
  j["deck"] = {{"merge_paragraphs", c.merge_paragraphs}};
  j["remote"] = {{"connect_timeout_ms", c.remote.connect_timeout_ms},
                 {"read_timeout_ms", c.remote.read_timeout_ms},
                 {"concurrent", c.remote.concurrent}};
  j["output_dir"] = c.output_dir;
  j["jobs"] = c.jobs;
  return j;
}

namespace detail {

// Keys whose value is a free-form map rather than a fixed set of fields.
inline bool is_free_map(const std::string& path) { return path == "render.fonts"; }

inline bool same_kind(const nlohmann::json& def, const nlohmann::json& v) {
  if (def.is_null()) return v.is_null() || v.is_string();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  return def.type() == v.type();
}

inline void overlay(nlohmann::json& base, const nlohmann::json& patch, const std::string& prefix,
                    std::vector<std::string>& errors) {
  if (!patch.is_object()) {
    errors.push_back((prefix.empty() ? std::string("config") : prefix) + ": expected an object");
    return;
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) {
      errors.push_back("unknown key " + path);
      continue;
    }
    auto& slot = base[key];
    if (slot.is_object() && !is_free_map(path)) {
      overlay(slot, value, path, errors);
    } else if (is_free_map(path)) {
      if (!value.is_object()) {
        errors.push_back(path + ": expected an object");
        continue;
      }
      for (const auto& [k, v] : value.items()) {
        if (!v.is_string()) errors.push_back(path + "." + k + ": expected a string");
      }
      slot = value;
    } else if (!same_kind(slot, value)) {
      errors.push_back(path + ": expected " + std::string(slot.is_null() ? "string" : slot.type_name()) + ", got " +
                       value.type_name());
    } else {
      slot = value;
    }
  }
}

inline void leaves(const nlohmann::json& j, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object() && !is_free_map(path)) {
      leaves(value, path, out);
    } else {
      out.push_back(path);
    }
  }
}

inline nlohmann::json* find_path(nlohmann::json& j, const std::string& path) {
  nlohmann::json* cur = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
    if (dot == std::string::npos) return cur;
    start = dot + 1;
  }
}

/// {"a": {"b": value}} for path "a.b".
inline nlohmann::json nest(const std::string& path, nlohmann::json value) {
  std::string rest = path;
  while (true) {
    const auto dot = rest.rfind('.');
    value = nlohmann::json{{rest.substr(dot == std::string::npos ? 0 : dot + 1), std::move(value)}};
    if (dot == std::string::npos) return value;
    rest.resize(dot);
  }
}

}  // namespace detail

/// Environment variable that overrides config key `path` ("layout.v_overlap_min").
inline std::string env_name(const std::string& path) {
  std::string out = "IMGTRANS_";
  for (char c : path) {
    if (c == '.') {
      out += "__";
    } else {
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

/// Parses a textual override for the key at `path`. String keys take the
/// text verbatim; other keys take a JSON literal.
inline nlohmann::json parse_override(const nlohmann::json& current, const std::string& path,
                                     const std::string& text) {
  if (current.is_string()) return text;
  if (current.is_null()) return text.empty() || text == "null" ? nlohmann::json(nullptr) : nlohmann::json(text);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kConfig, path + ": cannot parse '" + text + "'");
  }
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  nlohmann::json full = config_to_json(PipelineConfig{});
  std::vector<std::string> errors;
  detail::overlay(full, j, "", errors);
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(ErrorKind::kConfig, msg);
  }
  PipelineConfig c;
  try {
    c.pair = LangPair::make(full["pair"]["src"].get<std::string>(), full["pair"]["tgt"].get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  const auto level = full["level"].get<std::string>();
  if (level == "line") {
    c.level = SegmentationLevel::kLine;
  } else if (level == "block") {
    c.level = SegmentationLevel::kBlock;
  } else {
    throw Error(ErrorKind::kConfig, "level must be line or block, got '" + level + "'");
  }
  const auto& b = full["backends"];
  c.backends = {b["ocr"].get<std::string>(), b["layout"].get<std::string>(), b["mt"].get<std::string>(),
                b["text_mt"].get<std::string>(), b["inpaint"].get<std::string>()};
  c.ocr.min_conf = full["ocr"]["min_conf"].get<double>();
  if (!full["ocr"]["lang_hint"].is_null()) c.ocr.lang_hint = full["ocr"]["lang_hint"].get<std::string>();
  c.annotations = full["ocr"]["annotations"].get<std::string>();
  const auto& l = full["layout"];
  c.layout = {l["v_overlap_min"].get<double>(),    l["token_gap_factor"].get<double>(),
              l["line_gap_factor"].get<double>(),  l["h_overlap_min"].get<double>(),
              l["left_align_factor"].get<double>(), l["size_ratio_low"].get<double>(),
              l["size_ratio_high"].get<double>()};
  c.mask = {full["mask"]["dilation_frac"].get<double>(), full["mask"]["ring_width"].get<int>()};
  const auto& r = full["render"];
  c.render = {r["shrink_factor"].get<double>(), r["width_tolerance"].get<double>(), r["floor_ratio"].get<double>(),
              r["size_from_line_height"].get<double>(), r["box_padding"].get<double>()};
  c.font = r["font"].get<std::string>();
  c.fonts = r["fonts"].get<std::map<std::string, std::string>>();
  const auto modality = full["translation"]["modality"].get<std::string>();
  if (modality == "text") {
    c.mt_modality = Modality::kText;
  } else if (modality == "text+image") {
    c.mt_modality = Modality::kTextImage;
  } else {
    throw Error(ErrorKind::kConfig, "translation.modality must be text or text+image");
  }
  c.full_image_context = full["translation"]["full_image_context"].get<bool>();
  c.context_pad = full["translation"]["context_pad"].get<double>();
  c.merge_paragraphs = full["deck"]["merge_paragraphs"].get<bool>();
  c.remote = {full["remote"]["connect_timeout_ms"].get<int>(), full["remote"]["read_timeout_ms"].get<int>(),
              full["remote"]["concurrent"].get<bool>()};
  c.output_dir = full["output_dir"].get<std::string>();
  c.jobs = full["jobs"].get<int>();

  if (c.jobs < 1) throw Error(ErrorKind::kConfig, "jobs must be >= 1");
  if (!(c.ocr.min_conf >= 0.0 && c.ocr.min_conf <= 1.0)) throw Error(ErrorKind::kConfig, "ocr.min_conf must be in [0,1]");
  if (!(c.context_pad >= 0.0)) throw Error(ErrorKind::kConfig, "translation.context_pad must be >= 0");
  if (c.remote.connect_timeout_ms <= 0 || c.remote.read_timeout_ms <= 0) {
    throw Error(ErrorKind::kConfig, "remote timeouts must be positive");
  }
  c.layout.validate();
  c.mask.validate();
  c.render.validate();
  return c;
}

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

/// Layers: defaults, then `file` (if given), then environment, then the
/// `overrides` (key path -> text), and validates the result.
inline PipelineConfig load_config(const std::optional<std::filesystem::path>& file,
                                  const std::map<std::string, std::string>& overrides = {},
                                  const EnvLookup& env = process_env) {
  nlohmann::json doc = config_to_json(PipelineConfig{});
  std::vector<std::string> errors;
  if (file) {
    if (!std::filesystem::exists(*file)) throw Error(ErrorKind::kConfig, "config file not found: " + file->string());
    try {
      const auto bytes = read_file(*file);
      detail::overlay(doc, nlohmann::json::parse(bytes.begin(), bytes.end()), "", errors);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kConfig, file->string() + ": " + e.what());
    }
  }
  auto apply = [&](const std::string& key, const std::string& text) {
    const auto* slot = detail::find_path(doc, key);
    if (slot == nullptr || (slot->is_object() && !detail::is_free_map(key))) {
      errors.push_back("unknown key " + key);
      return;
    }
    detail::overlay(doc, detail::nest(key, parse_override(*slot, key, text)), "", errors);
  };
  std::vector<std::string> keys;
  detail::leaves(doc, "", keys);
  for (const auto& key : keys) {
    if (auto v = env(env_name(key))) apply(key, *v);
  }
  for (const auto& [key, text] : overrides) apply(key, text);
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(ErrorKind::kConfig, msg);
  }
  return config_from_json(doc);
}

}  // namespace imgtrans
