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

// Shared helpers for the unit and acceptance tests.

#include <atomic>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "imgtrans/imgtrans.hpp"

namespace imgtrans::testing {

inline std::filesystem::path test_font_path() { return IMGTRANS_TEST_FONT; }

inline const TrueTypeFont& test_font() {
  static const TrueTypeFont font = TrueTypeFont::load(test_font_path());
  return font;
}

/// Width 0.6 × size per character, height = size.
class StubMetrics final : public FontMetrics {
 public:
  TextExtent measure(std::string_view text, double font_px) const override {
    return {0.6 * font_px * static_cast<double>(text::codepoint_count(text)), font_px};
  }
};

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("imgtrans-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
  const auto b = read_file(p);
  return std::string(b.begin(), b.end());
}

// ---------------------------------------------------------------------------
// Synthetic slides: text drawn with the test font, one annotation token per
// word with ground-truth line/block ids.

struct TextLineSpec {
  std::string text;
  double x = 0.0;
  double baseline = 0.0;
  double px = 20.0;
  int block = 0;
  Color color{0, 0, 0};
};

struct Slide {
  RasterImage image;
  std::vector<AnnotatedToken> tokens;
};

inline Slide draw_slide(int width, int height, Color background, const std::vector<TextLineSpec>& lines) {
  const auto& font = test_font();
  Slide s{RasterImage(width, height, background), {}};
  const BBox everything{0, 0, static_cast<double>(width), static_cast<double>(height)};
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto& l = lines[li];
    const auto [ascent, descent] = font.vertical_extent(l.px);
    const double space = font.measure(" ", l.px).width;
    double x = l.x;
    for (const auto& word : text::split_whitespace(l.text)) {
      const double w = font.measure(word, l.px).width;
      font.draw_text(s.image, word, l.px, x, l.baseline, l.color, everything);
      const BBox box{x, l.baseline - ascent, x + w, l.baseline - descent};
      s.tokens.push_back({make_token(word, box), static_cast<int>(li), l.block});
      x += w + space;
    }
  }
  return s;
}

/// A slide with three text blocks: a title, a two-line paragraph and a
/// right-hand label.
inline Slide three_block_slide() {
  return draw_slide(480, 270, Color{250, 250, 245},
                    {{"Quarterly results", 30, 50, 28, 0, {20, 20, 80}},
                     {"Revenue grew in every region", 30, 120, 18, 1, {0, 0, 0}},
                     {"while costs stayed flat", 30, 145, 18, 1, {0, 0, 0}},
                     {"Exit", 380, 230, 22, 2, {200, 30, 30}}});
}

/// The "Exit" sign fixture: white text on green.
inline Slide exit_sign() {
  return draw_slide(200, 80, Color{20, 110, 40}, {{"Exit", 60, 52, 32, 0, {255, 255, 255}}});
}

// ---------------------------------------------------------------------------
// Minimal presentation packages built with the zip writer.

struct FixtureSlide {
  /// Paragraphs, each a list of formatting runs.
  std::vector<std::vector<std::string>> paragraphs;
  /// Media part names (under ppt/media/) shown on this slide.
  std::vector<std::string> pictures;
};

inline std::string slide_xml(const FixtureSlide& s) {
  std::string x =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<p:sld xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\" "
      "xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\" "
      "xmlns:p=\"http://schemas.openxmlformats.org/presentationml/2006/main\">"
      "<p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id=\"1\" name=\"\"/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>"
      "<p:grpSpPr/>";
  if (!s.paragraphs.empty()) {
    x += "<p:sp><p:nvSpPr><p:cNvPr id=\"2\" name=\"Text 1\"/><p:cNvSpPr txBox=\"1\"/><p:nvPr/></p:nvSpPr>"
         "<p:spPr><a:xfrm><a:off x=\"457200\" y=\"274638\"/><a:ext cx=\"8229600\" cy=\"1143000\"/></a:xfrm>"
         "</p:spPr><p:txBody><a:bodyPr/><a:lstStyle/>";
    for (const auto& para : s.paragraphs) {
      x += "<a:p>";
      for (std::size_t i = 0; i < para.size(); ++i) {
        x += "<a:r><a:rPr lang=\"en-US\" sz=\"" + std::to_string(2400 + 100 * i) + "\" b=\"" +
             std::to_string(i % 2) + "\" dirty=\"0\"/><a:t>" + deck::xml::escape_text(para[i]) + "</a:t></a:r>";
      }
      x += "<a:endParaRPr lang=\"en-US\"/></a:p>";
    }
    x += "</p:txBody></p:sp>";
  }
  for (std::size_t i = 0; i < s.pictures.size(); ++i) {
    x += "<p:pic><p:nvPicPr><p:cNvPr id=\"" + std::to_string(10 + i) +
         "\" name=\"Picture\"/><p:cNvPicPr/><p:nvPr/></p:nvPicPr><p:blipFill><a:blip r:embed=\"rIdImg" +
         std::to_string(i) +
         "\"/><a:stretch><a:fillRect/></a:stretch></p:blipFill><p:spPr><a:xfrm><a:off x=\"0\" y=\"0\"/>"
         "<a:ext cx=\"3000000\" cy=\"1500000\"/></a:xfrm><a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom>"
         "</p:spPr></p:pic>";
  }
  x += "</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sld>";
  return x;
}

/// Builds a .pptx with the given slides and media parts. Slide order in the
/// presentation is `order` when given (indices into `slides`).
inline Bytes build_deck(const std::vector<FixtureSlide>& slides, const std::map<std::string, Bytes>& media,
                        std::vector<std::size_t> order = {}) {
  if (order.empty()) {
    for (std::size_t i = 0; i < slides.size(); ++i) order.push_back(i);
  }
  zip::Archive ar;
  std::string types =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
      "<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
      "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
      "<Default Extension=\"png\" ContentType=\"image/png\"/>"
      "<Default Extension=\"jpeg\" ContentType=\"image/jpeg\"/>"
      "<Override PartName=\"/ppt/presentation.xml\" "
      "ContentType=\"application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml\"/>";
  for (std::size_t i = 0; i < slides.size(); ++i) {
    types += "<Override PartName=\"/ppt/slides/slide" + std::to_string(i + 1) +
             ".xml\" ContentType=\"application/vnd.openxmlformats-officedocument.presentationml.slide+xml\"/>";
  }
  types += "</Types>";
  ar.put("[Content_Types].xml", types);
  ar.put("_rels/.rels",
         "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
         "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
         "<Relationship Id=\"rId1\" "
         "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument\" "
         "Target=\"ppt/presentation.xml\"/></Relationships>");
  std::string pres =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<p:presentation xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\" "
      "xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\" "
      "xmlns:p=\"http://schemas.openxmlformats.org/presentationml/2006/main\"><p:sldIdLst>";
  std::string rels =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">";
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto n = std::to_string(order[k] + 1);
    pres += "<p:sldId id=\"" + std::to_string(256 + k) + "\" r:id=\"rId" + std::to_string(10 + k) + "\"/>";
    rels += "<Relationship Id=\"rId" + std::to_string(10 + k) +
            "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/slide\" "
            "Target=\"slides/slide" + n + ".xml\"/>";
  }
  pres += "</p:sldIdLst><p:sldSz cx=\"9144000\" cy=\"6858000\"/><p:notesSz cx=\"6858000\" cy=\"9144000\"/>"
          "</p:presentation>";
  rels += "</Relationships>";
  ar.put("ppt/presentation.xml", pres);
  ar.put("ppt/_rels/presentation.xml.rels", rels);
  for (std::size_t i = 0; i < slides.size(); ++i) {
    const auto n = std::to_string(i + 1);
    ar.put("ppt/slides/slide" + n + ".xml", slide_xml(slides[i]));
    std::string srels =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
        "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">";
    for (std::size_t p = 0; p < slides[i].pictures.size(); ++p) {
      srels += "<Relationship Id=\"rIdImg" + std::to_string(p) +
               "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/image\" "
               "Target=\"../media/" + slides[i].pictures[p] + "\"/>";
    }
    srels += "</Relationships>";
    ar.put("ppt/slides/_rels/slide" + n + ".xml.rels", srels);
  }
  for (const auto& [name, bytes] : media) ar.put("ppt/media/" + name, bytes);
  ar.put("docProps/app.xml",
         "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
         "<Properties xmlns=\"http://schemas.openxmlformats.org/officeDocument/2006/extended-properties\">"
         "<Application>fixture</Application></Properties>");
  return ar.serialize();
}

// ---------------------------------------------------------------------------
// Toy evaluation corpus on disk:
//   images/slide_NN.png, ground_truth.json, references.json, dict.json and,
//   optionally, predicted_ocr.json (ground truth with "Exit" misread).

inline const std::map<std::string, std::string>& toy_dictionary() {
  static const std::map<std::string, std::string> d = {
      {"exit", "Ausgang"},  {"welcome", "Willkommen"}, {"to", "zu"},       {"the", "der"},
      {"meeting", "Sitzung"}, {"sales", "Umsatz"},     {"rose", "stieg"},  {"this", "dieses"},
      {"year", "Jahr"},     {"please", "bitte"},       {"turn", "schalten"}, {"off", "aus"},
      {"phones", "Telefone"}, {"room", "Raum"},        {"open", "offen"}};
  return d;
}

inline Slide corpus_slide(std::size_t i) {
  static const char* kTitles[] = {"Welcome to the meeting", "Sales rose this year", "Room open"};
  static const char* kBodies[][2] = {{"Please turn off", "the phones"}, {"Sales rose", "this year"},
                                     {"Welcome to", "the room"}};
  const auto k = i % 3;
  const Color bg{static_cast<std::uint8_t>(230 + i % 20), 240, static_cast<std::uint8_t>(250 - i % 15)};
  return draw_slide(360, 200, bg,
                    {{kTitles[k], 20.0 + static_cast<double>(i % 4), 40, 24, 0, {20, 20, 90}},
                     {kBodies[k][0], 20, 95, 18, 1, {0, 0, 0}},
                     {kBodies[k][1], 20, 118, 18, 1, {0, 0, 0}},
                     {"Exit", 270, 175, 20, 2, {200, 30, 30}}});
}

/// Translates `text` word by word with toy_dictionary().
inline std::string toy_translate(const std::string& text) {
  DictionaryBackend d(toy_dictionary());
  return d.translate(text, LangPair::make("en", "de"), nullptr);
}

struct Corpus {
  std::filesystem::path root;
  std::vector<std::string> ids;
  AnnotationSet ground_truth;
};

inline Corpus write_corpus(const std::filesystem::path& root, std::size_t count, bool with_predictions) {
  namespace fs = std::filesystem;
  Corpus c{root, {}, {}};
  fs::create_directories(root / "images");
  AnnotationSet predicted;
  nlohmann::json refs = nlohmann::json::object();
  for (std::size_t i = 0; i < count; ++i) {
    const auto slide = corpus_slide(i);
    const std::string id = std::string("slide_") + (i < 10 ? "0" : "") + std::to_string(i) + ".png";
    save_image(slide.image, root / "images" / id);
    c.ids.push_back(id);
    c.ground_truth[id] = slide.tokens;
    auto pred = slide.tokens;
    for (auto& t : pred) {
      if (t.token.text == "Exit") t.token.text = "Exlt";
      t.line.reset();
      t.block.reset();
    }
    predicted[id] = pred;
    // One reference per ground-truth block, in block order.
    std::map<int, std::vector<std::string>> words;
    for (const auto& t : slide.tokens) words[*t.block].push_back(t.token.text);
    for (const auto& [b, w] : words) refs[id][std::to_string(b)] = toy_translate(text::join(w, " "));
  }
  save_annotations(c.ground_truth, root / "ground_truth.json");
  if (with_predictions) save_annotations(predicted, root / "predicted_ocr.json");
  write_file(root / "references.json", refs.dump(2));
  write_file(root / "dict.json", nlohmann::json(toy_dictionary()).dump(2));
  return c;
}

}  // namespace imgtrans::testing
