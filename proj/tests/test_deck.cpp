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


#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace imgtrans {
namespace {

using testing::build_deck;
using testing::FixtureSlide;
using testing::TempDir;

const LangPair kEnDe = LangPair::make("en", "de");

DictionaryBackend exit_dictionary() {
  return DictionaryBackend(std::map<std::string, std::string>{{"exit", "Ausgang"}, {"welcome", "Willkommen"}});
}

// Paints a red bar over the image and reports one unit.
deck::ImageOutcome red_bar(const RasterImage& img, const std::string&) {
  deck::ImageOutcome o{img, 1, {}, {}};
  for (int x = 0; x < img.width(); ++x) o.image.set(x, 0, Color{255, 0, 0});
  return o;
}

deck::ImageOutcome untouched(const RasterImage& img, const std::string&) { return {img, 0, {}, {}}; }

Bytes png_of(int w, int h, Color c) { return encode_png(RasterImage(w, h, c)); }

TEST(ZipArchive, RoundTripPreservesPayloads) {
  zip::Archive ar;
  ar.put("a.txt", std::string("hello"));
  Bytes big(100000);
  std::mt19937 rng(3);
  for (auto& b : big) b = static_cast<std::uint8_t>(rng() % 7);
  ar.put("dir/big.bin", big);
  ar.put("empty", std::string());
  const auto bytes = ar.serialize();
  const auto back = zip::Archive::parse(bytes);
  EXPECT_EQ(back.names(), (std::vector<std::string>{"a.txt", "dir/big.bin", "empty"}));
  EXPECT_EQ(back.read_text("a.txt"), "hello");
  EXPECT_EQ(back.read("dir/big.bin"), big);
  EXPECT_EQ(back.read_text("empty"), "");
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_THROW(zip::Archive::parse(Bytes{1, 2, 3, 4}), Error);
}

TEST(DeckXml, EntitiesAndNodes) {
  EXPECT_EQ(deck::xml::decode_entities("a &amp; b &lt;c&gt; &#65;&#x42; &quot;"), "a & b <c> AB \"");
  EXPECT_EQ(deck::xml::escape_text("a & <b>"), "a &amp; &lt;b&gt;");
  const auto nodes = deck::xml::scan_text_nodes(
      "<a:p><a:r><a:t>One</a:t></a:r><a:r><a:t/></a:r></a:p><a:p><a:r><a:t xml:space=\"preserve\"> &amp;</a:t></a:r></a:p>");
  ASSERT_EQ(nodes.size(), 3u);
  EXPECT_EQ(nodes[0].text, "One");
  EXPECT_TRUE(nodes[1].self_closing);
  EXPECT_EQ(nodes[2].text, " &");
  EXPECT_EQ(nodes[0].paragraph, 0u);
  EXPECT_EQ(nodes[2].paragraph, 1u);
}

TEST(Deck, RejectsNonPresentations) {
  zip::Archive ar;
  ar.put("word/document.xml", std::string("<w/>"));
  try {
    deck::Deck::from_bytes(ar.serialize());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidDeck);
  }
  try {
    deck::Deck::open("/nonexistent/deck.pptx");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingFile);
  }
}

TEST(Deck, ExtractsRunsInPresentationOrder) {
  const auto bytes = build_deck({FixtureSlide{{{"first"}}, {}}, FixtureSlide{{{"Welcome ", "home"}, {"Exit"}}, {}}},
                                {}, {1, 0});
  const auto d = deck::Deck::from_bytes(bytes);
  EXPECT_EQ(d.slide_parts(), (std::vector<std::string>{"ppt/slides/slide2.xml", "ppt/slides/slide1.xml"}));
  const auto runs = deck::extract_editable(d);
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0], (deck::EditableRun{"ppt/slides/slide2.xml", 0, 0, "Welcome "}));
  EXPECT_EQ(runs[2], (deck::EditableRun{"ppt/slides/slide2.xml", 2, 1, "Exit"}));
  EXPECT_EQ(runs[3].text, "first");
}

TEST(Deck, ReplaceEditsOnlyTargetNodes) {
  const auto bytes = build_deck({FixtureSlide{{{"Fish & Chips", "Exit"}}, {}}, FixtureSlide{{{"other"}}, {}}}, {});
  const auto d = deck::Deck::from_bytes(bytes);
  const auto runs = deck::extract_editable(d);
  EXPECT_EQ(runs[0].text, "Fish & Chips");
  const std::vector<std::pair<deck::EditableRun, std::string>> edits = {{runs[1], "Ausgang <Nord>"}};
  const auto out = deck::replace_editable(d, edits);
  const auto after = deck::extract_editable(out);
  EXPECT_EQ(after[0].text, "Fish & Chips");
  EXPECT_EQ(after[1].text, "Ausgang <Nord>");
  const auto before_xml = d.archive().read_text("ppt/slides/slide1.xml");
  const auto after_xml = out.archive().read_text("ppt/slides/slide1.xml");
  EXPECT_NE(after_xml.find("Ausgang &lt;Nord&gt;"), std::string::npos);
  // Everything except the replaced content is unchanged.
  const auto at = before_xml.find(">Exit<") + 1;
  EXPECT_EQ(after_xml.substr(0, at), before_xml.substr(0, at));
  EXPECT_EQ(after_xml.substr(at + std::string("Ausgang &lt;Nord&gt;").size()), before_xml.substr(at + 4));
  EXPECT_EQ(out.archive().entry("ppt/slides/slide2.xml").raw, d.archive().entry("ppt/slides/slide2.xml").raw);
}

TEST(Deck, StaleLocatorIsReported) {
  const auto d = deck::Deck::from_bytes(build_deck({FixtureSlide{{{"Exit"}}, {}}}, {}));
  const std::vector<std::pair<deck::EditableRun, std::string>> wrong_text = {
      {deck::EditableRun{"ppt/slides/slide1.xml", 0, 0, "Entry"}, "x"}};
  const std::vector<std::pair<deck::EditableRun, std::string>> wrong_part = {
      {deck::EditableRun{"ppt/slides/slide9.xml", 0, 0, "Exit"}, "x"}};
  for (const auto& edits : {wrong_text, wrong_part}) {
    try {
      deck::replace_editable(d, edits);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kLocatorMismatch);
    }
  }
}

TEST(Deck, ExtractImagesSkipsUndecodableParts) {
  Bytes corrupt = png_of(4, 4, {1, 2, 3});
  corrupt.resize(30);
  const auto jpeg = encode_image(RasterImage(8, 8, Color{9, 9, 9}), ImageFormat::kJpeg);
  const auto d = deck::Deck::from_bytes(
      build_deck({FixtureSlide{{}, {"image1.png", "image2.jpeg"}}, FixtureSlide{{}, {"image1.png", "broken.png"}}},
                 {{"image1.png", png_of(4, 4, {1, 2, 3})}, {"image2.jpeg", jpeg}, {"broken.png", corrupt}}));
  std::vector<deck::SkippedPart> skipped;
  const auto images = deck::extract_images(d, &skipped);
  ASSERT_EQ(images.size(), 2u);
  EXPECT_EQ(images[0].part_name, "ppt/media/image1.png");
  EXPECT_EQ(images[1].format, ImageFormat::kJpeg);
  ASSERT_EQ(skipped.size(), 1u);
  EXPECT_EQ(skipped[0].part_name, "ppt/media/broken.png");
}

TEST(LocalizeDeck, TranslatesRunsAndImages) {
  const auto bytes = build_deck({FixtureSlide{{{"Welcome"}, {"Exit.", " "}}, {"image1.png"}},
                                 FixtureSlide{{{"Exit"}}, {"image1.png", "image2.png"}}},
                                {{"image1.png", png_of(6, 3, {0, 0, 0})}, {"image2.png", png_of(5, 5, {7, 7, 7})}});
  const auto d = deck::Deck::from_bytes(bytes);
  auto dict = exit_dictionary();
  std::atomic<int> calls{0};
  const deck::ImageTranslator translator = [&](const RasterImage& img, const std::string& id) {
    ++calls;
    return id == "ppt/media/image1.png" ? red_bar(img, id) : untouched(img, id);
  };
  const auto result = deck::localize_deck(d, kEnDe, dict, translator);
  const auto runs = deck::extract_editable(result.deck);
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0].text, "Willkommen");
  EXPECT_EQ(runs[1].text, "Ausgang.");
  EXPECT_EQ(runs[2].text, " ");
  EXPECT_EQ(runs[3].text, "Ausgang");
  // A part shared by two slides is translated once.
  EXPECT_EQ(calls.load(), 2);
  const auto img1 = decode_image(result.deck.archive().read("ppt/media/image1.png"));
  EXPECT_EQ(img1.at(0, 0), (Color{255, 0, 0}));
  EXPECT_EQ(img1.at(0, 1), (Color{0, 0, 0}));
  EXPECT_EQ(result.deck.archive().read("ppt/media/image2.png"), d.archive().read("ppt/media/image2.png"));
  EXPECT_EQ(result.report.count_images("translated"), 1u);
  EXPECT_EQ(result.report.count_images("unchanged"), 1u);
  EXPECT_EQ(result.report.runs.size(), 4u);

  const auto j = deck::report_to_json(result.report);
  EXPECT_EQ(j["summary"]["runs"], 4);
  EXPECT_EQ(j["summary"]["images_translated"], 1);
  EXPECT_TRUE(j["timings"].contains("translation"));
  // Parts the pipeline does not touch are byte-identical.
  EXPECT_EQ(result.deck.archive().read("docProps/app.xml"), d.archive().read("docProps/app.xml"));
  EXPECT_EQ(result.deck.archive().read("ppt/presentation.xml"), d.archive().read("ppt/presentation.xml"));
}

TEST(LocalizeDeck, FailingImageKeepsOriginalBytes) {
  Bytes corrupt = png_of(4, 4, {1, 2, 3});
  corrupt.resize(40);
  const auto d = deck::Deck::from_bytes(
      build_deck({FixtureSlide{{{"Exit"}}, {"good.png", "bad.png", "boom.png"}}},
                 {{"good.png", png_of(3, 3, {0, 0, 0})}, {"bad.png", corrupt}, {"boom.png", png_of(2, 2, {5, 5, 5})}}));
  IdentityBackend id;
  const deck::ImageTranslator translator = [](const RasterImage& img, const std::string& part) {
    if (part == "ppt/media/boom.png") throw Error(ErrorKind::kBackendUnreachable, "ocr backend down");
    return red_bar(img, part);
  };
  const auto result = deck::localize_deck(d, kEnDe, id, translator, {false, 3});
  EXPECT_EQ(result.deck.archive().read("ppt/media/bad.png"), corrupt);
  EXPECT_EQ(result.deck.archive().read("ppt/media/boom.png"), d.archive().read("ppt/media/boom.png"));
  EXPECT_NE(result.deck.archive().read("ppt/media/good.png"), d.archive().read("ppt/media/good.png"));
  EXPECT_EQ(result.report.count_images("failed"), 1u);
  EXPECT_EQ(result.report.count_images("translated"), 1u);
  EXPECT_EQ(deck::report_to_json(result.report)["summary"]["images_failed"], 2);
  EXPECT_EQ(deck::extract_editable(result.deck)[0].text, "Exit");
}

TEST(LocalizeDeck, MergeModeTranslatesParagraphs) {
  const auto d = deck::Deck::from_bytes(build_deck({FixtureSlide{{{"Emergency ", "exit"}}, {}}}, {}));
  DictionaryBackend phrase(std::map<std::string, std::string>{{"emergency", "Notfall"}, {"exit", "Ausgang"}});
  const auto merged = deck::localize_deck(d, kEnDe, phrase, untouched, {true, 1});
  const auto runs = deck::extract_editable(merged.deck);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].text, "Notfall Ausgang");
  // The emptied run is still present, so formatting survives.
  EXPECT_EQ(deck::xml::scan_text_nodes(merged.deck.archive().read_text("ppt/slides/slide1.xml")).size(), 2u);
}

TEST(Deck, SaveRefusesToOverwriteSource) {
  TempDir dir;
  write_file(dir / "in.pptx", build_deck({FixtureSlide{{{"Exit"}}, {}}}, {}));
  const auto d = deck::Deck::open(dir / "in.pptx");
  EXPECT_THROW(d.save(dir / "in.pptx"), Error);
  d.save(dir / "out.pptx");
  EXPECT_EQ(read_file(dir / "out.pptx"), read_file(dir / "in.pptx"));
}

}  // namespace
}  // namespace imgtrans
