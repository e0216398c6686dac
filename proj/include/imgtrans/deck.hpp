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

// Presentation (.pptx) localization. Editable text runs (<a:t> nodes in slide
// parts) are replaced in place by splicing their byte ranges, so everything
// else in a part stays byte-identical. Raster media parts go through an
// image translator supplied by the caller.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "imgtrans/error.hpp"
#include "imgtrans/image.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/timing.hpp"
#include "imgtrans/translation.hpp"
#include "imgtrans/units.hpp"
#include "imgtrans/zip.hpp"

namespace imgtrans::deck {

// ---------------------------------------------------------------------------
// XML text-node scanning

namespace xml {

inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s.compare(i, 9, "<![CDATA[") == 0) {
      const auto end = s.find("]]>", i + 9);
      if (end == std::string_view::npos) throw Error(ErrorKind::kPartParse, "unterminated CDATA");
      out.append(s.substr(i + 9, end - i - 9));
      i = end + 3;
      continue;
    }
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos) throw Error(ErrorKind::kPartParse, "unterminated entity");
    const auto name = s.substr(i + 1, semi - i - 1);
    if (name == "amp") {
      out.push_back('&');
    } else if (name == "lt") {
      out.push_back('<');
    } else if (name == "gt") {
      out.push_back('>');
    } else if (name == "quot") {
      out.push_back('"');
    } else if (name == "apos") {
      out.push_back('\'');
    } else if (!name.empty() && name[0] == '#') {
      const bool hexa = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      const std::string digits(name.substr(hexa ? 2 : 1));
      char32_t cp = 0;
      try {
        cp = static_cast<char32_t>(std::stoul(digits, nullptr, hexa ? 16 : 10));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kPartParse, "bad character reference &" + std::string(name) + ";");
      }
      out += text::encode_utf8(std::u32string(1, cp));
    } else {
      throw Error(ErrorKind::kPartParse, "unknown entity &" + std::string(name) + ";");
    }
    i = semi + 1;
  }
  return out;
}

inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct TextNode {
  std::size_t content_begin = 0;
  std::size_t content_end = 0;
  bool self_closing = false;
  std::size_t paragraph = 0;
  std::string text;
};

/// Position just past the '>' closing the tag that starts at `lt`.
inline std::size_t tag_end(std::string_view doc, std::size_t lt) {
  char quote = 0;
  for (std::size_t i = lt + 1; i < doc.size(); ++i) {
    const char c = doc[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return i + 1;
    }
  }
  throw Error(ErrorKind::kPartParse, "unterminated tag");
}

/// Every <a:t> element in document order, with the paragraph (<a:p>) it
/// belongs to.
inline std::vector<TextNode> scan_text_nodes(std::string_view doc) {
  std::vector<TextNode> nodes;
  std::size_t paragraphs = 0;
  std::size_t i = 0;
  while ((i = doc.find('<', i)) != std::string_view::npos) {
    if (doc.compare(i, 4, "<!--") == 0) {
      const auto end = doc.find("-->", i + 4);
      if (end == std::string_view::npos) throw Error(ErrorKind::kPartParse, "unterminated comment");
      i = end + 3;
      continue;
    }
    if (doc.compare(i, 9, "<![CDATA[") == 0) {
      const auto end = doc.find("]]>", i + 9);
      if (end == std::string_view::npos) throw Error(ErrorKind::kPartParse, "unterminated CDATA");
      i = end + 3;
      continue;
    }
    if (doc.compare(i, 2, "<?") == 0 || doc.compare(i, 2, "<!") == 0 || doc.compare(i, 2, "</") == 0) {
      i = tag_end(doc, i);
      continue;
    }
    std::size_t name_end = i + 1;
    while (name_end < doc.size() && !text::is_ascii_space(doc[name_end]) && doc[name_end] != '>' &&
           doc[name_end] != '/') {
      ++name_end;
    }
    const auto name = doc.substr(i + 1, name_end - i - 1);
    const std::size_t after = tag_end(doc, i);
    const bool self_closing = doc[after - 2] == '/';
    if (name == "a:p") {
      ++paragraphs;
    } else if (name == "a:t") {
      TextNode node;
      node.paragraph = paragraphs == 0 ? 0 : paragraphs - 1;
      node.self_closing = self_closing;
      if (self_closing) {
        node.content_begin = node.content_end = after;
      } else {
        const auto close = doc.find("</a:t>", after);
        if (close == std::string_view::npos) throw Error(ErrorKind::kPartParse, "unterminated <a:t>");
        node.content_begin = after;
        node.content_end = close;
        node.text = decode_entities(doc.substr(after, close - after));
        i = close + 6;
        nodes.push_back(std::move(node));
        continue;
      }
      nodes.push_back(std::move(node));
    }
    i = after;
  }
  return nodes;
}

inline std::optional<std::string> attribute(std::string_view tag, std::string_view name) {
  std::size_t pos = 0;
  while ((pos = tag.find(name, pos)) != std::string_view::npos) {
    const bool boundary = pos > 0 && text::is_ascii_space(tag[pos - 1]);
    std::size_t k = pos + name.size();
    while (k < tag.size() && text::is_ascii_space(tag[k])) ++k;
    if (boundary && k < tag.size() && tag[k] == '=') {
      ++k;
      while (k < tag.size() && text::is_ascii_space(tag[k])) ++k;
      if (k < tag.size() && (tag[k] == '"' || tag[k] == '\'')) {
        const char q = tag[k];
        const auto end = tag.find(q, k + 1);
        if (end != std::string_view::npos) return decode_entities(tag.substr(k + 1, end - k - 1));
      }
    }
    pos += name.size();
  }
  return std::nullopt;
}

/// Start tags named `name`, as raw strings, in document order.
inline std::vector<std::string> start_tags(std::string_view doc, std::string_view name) {
  std::vector<std::string> tags;
  std::size_t i = 0;
  while ((i = doc.find('<', i)) != std::string_view::npos) {
    if (doc.compare(i + 1, name.size(), name) == 0) {
      const std::size_t k = i + 1 + name.size();
      if (k < doc.size() && (text::is_ascii_space(doc[k]) || doc[k] == '/' || doc[k] == '>')) {
        const auto end = tag_end(doc, i);
        tags.emplace_back(doc.substr(i, end - i));
        i = end;
        continue;
      }
    }
    ++i;
  }
  return tags;
}

}  // namespace xml

// ---------------------------------------------------------------------------

/// Locates one text node: the part and the node's ordinal among the <a:t>
/// elements of that part.
struct EditableRun {
  std::string part;
  std::size_t index = 0;
  std::size_t paragraph = 0;
  std::string text;

  friend bool operator==(const EditableRun&, const EditableRun&) = default;
};

struct EmbeddedImage {
  std::string part_name;
  Bytes bytes;
  ImageFormat format = ImageFormat::kUnknown;
};

struct SkippedPart {
  std::string part_name;
  std::string reason;
};

class Deck {
 public:
  static Deck from_bytes(std::span<const std::uint8_t> bytes) {
    Deck d;
    d.archive_ = zip::Archive::parse(bytes);
    for (const char* required : {"[Content_Types].xml", "ppt/presentation.xml"}) {
      if (!d.archive_.contains(required)) {
        throw Error(ErrorKind::kInvalidDeck, std::string("missing required part ") + required);
      }
    }
    return d;
  }

  static Deck open(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::kMissingFile, "deck not found: " + path.string());
    }
    Deck d = from_bytes(read_file(path));
    d.source_ = std::filesystem::weakly_canonical(path);
    return d;
  }

  /// Writes a new file; refuses to overwrite the file the deck was opened from.
  void save(const std::filesystem::path& path) const {
    if (source_ && std::filesystem::weakly_canonical(path) == *source_) {
      throw Error(ErrorKind::kInvalidArgument, "refusing to overwrite the source deck " + path.string());
    }
    write_file(path, archive_.serialize());
  }

  Bytes to_bytes() const { return archive_.serialize(); }

  const zip::Archive& archive() const { return archive_; }
  zip::Archive& archive() { return archive_; }

  std::vector<std::string> part_names() const { return archive_.names(); }

  /// Slide parts in presentation order; slides missing from the slide list
  /// follow in numeric order.
  std::vector<std::string> slide_parts() const {
    std::vector<std::string> ordered;
    std::set<std::string> seen;
    try {
      const auto pres = archive_.read_text("ppt/presentation.xml");
      std::map<std::string, std::string> rels;
      if (archive_.contains("ppt/_rels/presentation.xml.rels")) {
        const auto rel_doc = archive_.read_text("ppt/_rels/presentation.xml.rels");
        for (const auto& tag : xml::start_tags(rel_doc, "Relationship")) {
          auto id = xml::attribute(tag, "Id");
          auto target = xml::attribute(tag, "Target");
          if (id && target) rels[*id] = resolve_target("ppt/", *target);
        }
      }
      for (const auto& tag : xml::start_tags(pres, "p:sldId")) {
        if (auto rid = xml::attribute(tag, "r:id")) {
          auto it = rels.find(*rid);
          if (it != rels.end() && archive_.contains(it->second) && seen.insert(it->second).second) {
            ordered.push_back(it->second);
          }
        }
      }
    } catch (const Error& e) {
      throw Error(ErrorKind::kPartParse, std::string("ppt/presentation.xml: ") + e.what());
    }
    static const std::regex kSlide(R"(ppt/slides/slide(\d+)\.xml)");
    std::vector<std::pair<long, std::string>> rest;
    for (const auto& name : archive_.names()) {
      std::smatch m;
      if (std::regex_match(name, m, kSlide) && !seen.count(name)) rest.push_back({std::stol(m[1]), name});
    }
    std::sort(rest.begin(), rest.end());
    for (auto& [n, name] : rest) ordered.push_back(name);
    return ordered;
  }

 private:
  static std::string resolve_target(const std::string& base, const std::string& target) {
    if (!target.empty() && target[0] == '/') return target.substr(1);
    std::vector<std::string> parts;
    std::string joined = base + target;
    std::size_t start = 0;
    while (start <= joined.size()) {
      const auto slash = joined.find('/', start);
      const auto seg = joined.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
      if (seg == "..") {
        if (!parts.empty()) parts.pop_back();
      } else if (!seg.empty() && seg != ".") {
        parts.push_back(seg);
      }
      if (slash == std::string::npos) break;
      start = slash + 1;
    }
    return text::join(parts, "/");
  }

  zip::Archive archive_;
  std::optional<std::filesystem::path> source_;
};

inline std::vector<EditableRun> extract_editable(const Deck& deck) {
  std::vector<EditableRun> runs;
  for (const auto& part : deck.slide_parts()) {
    std::vector<xml::TextNode> nodes;
    try {
      nodes = xml::scan_text_nodes(deck.archive().read_text(part));
    } catch (const Error& e) {
      throw Error(ErrorKind::kPartParse, part + ": " + e.what());
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].text.empty()) continue;
      runs.push_back({part, i, nodes[i].paragraph, std::move(nodes[i].text)});
    }
  }
  return runs;
}

/// Returns a copy of `deck` with each run's text node replaced. A run whose
/// locator no longer resolves to the recorded text raises locator-mismatch.
inline Deck replace_editable(const Deck& deck,
                             std::span<const std::pair<EditableRun, std::string>> replacements) {
  Deck out = deck;
  std::map<std::string, std::vector<const std::pair<EditableRun, std::string>*>> by_part;
  for (const auto& r : replacements) by_part[r.first.part].push_back(&r);
  for (auto& [part, list] : by_part) {
    if (!deck.archive().contains(part)) {
      throw Error(ErrorKind::kLocatorMismatch, "part " + part + " does not exist");
    }
    const std::string doc = deck.archive().read_text(part);
    std::vector<xml::TextNode> nodes;
    try {
      nodes = xml::scan_text_nodes(doc);
    } catch (const Error& e) {
      throw Error(ErrorKind::kPartParse, part + ": " + e.what());
    }
    std::map<std::size_t, std::string> edits;
    for (const auto* r : list) {
      const auto& run = r->first;
      if (run.index >= nodes.size() || nodes[run.index].text != run.text) {
        throw Error(ErrorKind::kLocatorMismatch,
                    part + ": text node " + std::to_string(run.index) + " no longer holds '" + run.text + "'");
      }
      edits[run.index] = r->second;
    }
    std::string updated = doc;
    for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
      const auto& node = nodes[it->first];
      updated.replace(node.content_begin, node.content_end - node.content_begin,
                      xml::escape_text(it->second));
    }
    if (updated != doc) out.archive().put(part, updated);
  }
  return out;
}

inline bool is_raster_part(std::string_view name) {
  const auto fmt = format_from_extension(std::filesystem::path(std::string(name)));
  return fmt != ImageFormat::kUnknown;
}

/// Raster media parts sorted by part name. Parts that do not decode are
/// reported through `skipped`.
inline std::vector<EmbeddedImage> extract_images(const Deck& deck,
                                                 std::vector<SkippedPart>* skipped = nullptr) {
  auto names = deck.part_names();
  std::sort(names.begin(), names.end());
  std::vector<EmbeddedImage> images;
  for (const auto& name : names) {
    if (!is_raster_part(name)) continue;
    try {
      Bytes bytes = deck.archive().read(name);
      const auto fmt = sniff_format(bytes);
      (void)decode_image(bytes);
      images.push_back({name, std::move(bytes), fmt});
    } catch (const Error& e) {
      if (skipped != nullptr) skipped->push_back({name, e.what()});
    }
  }
  return images;
}

// ---------------------------------------------------------------------------

struct ImageOutcome {
  RasterImage image;
  std::size_t units = 0;
  StageTimes times;
  Warnings warnings;
};

/// Runs the image pipeline on one decoded image. Must be safe to call from
/// several threads when `jobs` > 1.
using ImageTranslator = std::function<ImageOutcome(const RasterImage&, const std::string& image_id)>;

struct RunReport {
  std::string part;
  std::size_t index = 0;
  std::string source;
  std::string target;
};

struct ImageReport {
  std::string part;
  std::string status;  // translated | unchanged | failed | skipped
  std::size_t units = 0;
  std::string error;
};

struct DeckReport {
  std::vector<RunReport> runs;
  std::vector<ImageReport> images;
  StageTimes timings;
  Warnings warnings;

  std::size_t count_images(std::string_view status) const {
    return static_cast<std::size_t>(std::count_if(images.begin(), images.end(),
                                                  [&](const ImageReport& r) { return r.status == status; }));
  }
};

inline nlohmann::json report_to_json(const DeckReport& r) {
  nlohmann::json j;
  j["runs"] = nlohmann::json::array();
  for (const auto& run : r.runs) {
    j["runs"].push_back({{"part", run.part}, {"index", run.index}, {"source", run.source}, {"target", run.target}});
  }
  j["images"] = nlohmann::json::array();
  for (const auto& im : r.images) {
    nlohmann::json e = {{"part", im.part}, {"status", im.status}, {"units", im.units}};
    if (!im.error.empty()) e["error"] = im.error;
    j["images"].push_back(std::move(e));
  }
  j["summary"] = {{"runs", r.runs.size()},
                  {"images_translated", r.count_images("translated")},
                  {"images_unchanged", r.count_images("unchanged")},
                  {"images_failed", r.count_images("failed") + r.count_images("skipped")}};
  nlohmann::json t = nlohmann::json::object();
  for (auto s : kStages) t[stage_key(s)] = r.timings[s];
  j["timings"] = std::move(t);
  j["warnings"] = r.warnings;
  return j;
}

struct LocalizeOptions {
  bool merge_paragraphs = false;
  std::size_t jobs = 1;
};

struct LocalizeResult {
  Deck deck;
  DeckReport report;
};

/// Editable runs go through `text_backend`; raster media through
/// `translate_image`. A failing image keeps its original bytes and is
/// flagged in the report.
inline LocalizeResult localize_deck(const Deck& deck, const LangPair& pair, MtBackend& text_backend,
                                    const ImageTranslator& translate_image,
                                    const LocalizeOptions& options = {}) {
  DeckReport report;
  const auto runs = extract_editable(deck);

  // Text units: one per run, or one per paragraph in merge mode.
  std::vector<std::vector<std::size_t>> groups;
  if (options.merge_paragraphs) {
    std::map<std::pair<std::string, std::size_t>, std::size_t> index;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto key = std::make_pair(runs[i].part, runs[i].paragraph);
      auto [it, inserted] = index.try_emplace(key, groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    }
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) groups.push_back({i});
  }
  std::vector<TranslationUnit> units;
  std::vector<std::size_t> unit_group;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::string joined;
    for (auto i : groups[g]) joined += runs[i].text;
    if (text::trim(joined).empty()) continue;
    TranslationUnit u;
    u.id = units.size();
    u.source_text = std::move(joined);
    u.level = SegmentationLevel::kLine;
    units.push_back(std::move(u));
    unit_group.push_back(g);
  }
  const auto translated = report.timings.time(Stage::kTranslation, [&] {
    return translate_units(units, pair, text_backend, options.jobs, &report.warnings);
  });
  std::vector<std::string> targets(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) targets[i] = runs[i].text;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& members = groups[unit_group[u]];
    targets[members.front()] = translated[u].target_text;
    for (std::size_t k = 1; k < members.size(); ++k) targets[members[k]].clear();
  }
  std::vector<std::pair<EditableRun, std::string>> replacements;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    report.runs.push_back({runs[i].part, runs[i].index, runs[i].text, targets[i]});
    if (targets[i] != runs[i].text) replacements.emplace_back(runs[i], targets[i]);
  }
  Deck out = replace_editable(deck, replacements);

  std::vector<SkippedPart> skipped;
  const auto images = extract_images(deck, &skipped);
  for (const auto& s : skipped) {
    report.warnings.push_back("image part " + s.part_name + " skipped: " + s.reason);
  }

  struct Done {
    std::optional<ImageOutcome> outcome;
    std::string error;
  };
  auto work = [&](const EmbeddedImage& img) {
    Done d;
    try {
      d.outcome = translate_image(decode_image(img.bytes), img.part_name);
    } catch (const std::exception& e) {
      d.error = e.what();
    }
    return d;
  };
  std::vector<Done> results(images.size());
  if (options.jobs <= 1) {
    for (std::size_t i = 0; i < images.size(); ++i) results[i] = work(images[i]);
  } else {
    std::vector<std::future<Done>> pending;
    std::size_t next = 0, done = 0;
    while (done < images.size()) {
      while (next < images.size() && pending.size() < options.jobs) {
        pending.push_back(std::async(std::launch::async, work, std::cref(images[next++])));
      }
      results[done++] = pending.front().get();
      pending.erase(pending.begin());
    }
  }

  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    auto& res = results[i];
    ImageReport ir{img.part_name, "", 0, ""};
    if (!res.outcome) {
      ir.status = "failed";
      ir.error = res.error;
      report.warnings.push_back("image part " + img.part_name + " kept original: " + res.error);
    } else {
      report.timings += res.outcome->times;
      for (auto& w : res.outcome->warnings) report.warnings.push_back(img.part_name + ": " + w);
      ir.units = res.outcome->units;
      if (res.outcome->units == 0) {
        ir.status = "unchanged";
      } else {
        try {
          out.archive().put(img.part_name, encode_image(res.outcome->image, img.format));
          ir.status = "translated";
        } catch (const std::exception& e) {
          ir.status = "failed";
          ir.error = e.what();
        }
      }
    }
    report.images.push_back(std::move(ir));
  }
  for (const auto& s : skipped) report.images.push_back({s.part_name, "skipped", 0, s.reason});
  std::sort(report.images.begin(), report.images.end(),
            [](const ImageReport& a, const ImageReport& b) { return a.part < b.part; });
  return {std::move(out), std::move(report)};
}

}  // namespace imgtrans::deck
