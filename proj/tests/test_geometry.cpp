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

BBox random_box(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-50.0, 50.0), ext(0.5, 40.0);
  const double x = pos(rng), y = pos(rng);
  return BBox{x, y, x + ext(rng), y + ext(rng)};
}

TEST(PolygonToBBox, Envelopes) {
  EXPECT_EQ(polygon_to_bbox(Polygon({{0, 0}, {4, 0}, {0, 3}})), (BBox{0, 0, 4, 3}));
  EXPECT_EQ(polygon_to_bbox(Polygon({{1, 1}, {1, 2}, {2, 2}, {2, 1}})), (BBox{1, 1, 2, 2}));
  EXPECT_EQ(polygon_to_bbox(Polygon({{2, 0}, {4, 2}, {2, 4}, {0, 2}})), (BBox{0, 0, 4, 4}));
}

TEST(PolygonToBBox, RejectsShortPolygons) {
  const std::vector<Point> two = {{0, 0}, {1, 1}};
  try {
    polygon_to_bbox(two);
    FAIL() << "expected invalid-geometry";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidGeometry);
  }
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}}), Error);
  EXPECT_THROW(Polygon({{0, 0}, {1, 0}, {2, 0}}), Error);  // zero-area envelope
}

TEST(PolygonToBBox, ContainsEveryPoint) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> c(-100, 100);
  std::uniform_int_distribution<int> n(3, 9);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<Point> pts(static_cast<std::size_t>(n(rng)));
    for (auto& p : pts) p = {c(rng), c(rng)};
    const BBox b = polygon_to_bbox(pts);
    for (const auto& p : pts) EXPECT_TRUE(b.contains(p));
  }
}

TEST(BBoxUnion, Examples) {
  const BBox b{0, 0, 1, 1};
  EXPECT_EQ(bbox_union(b, b), b);
  EXPECT_EQ(bbox_union(BBox{0, 0, 1, 1}, BBox{2, 2, 3, 3}), (BBox{0, 0, 3, 3}));
  EXPECT_EQ(bbox_union(BBox{0, 0, 2, 2}, BBox{1, 1, 3, 1.5}), (BBox{0, 0, 3, 2}));
}

TEST(BBoxUnion, AssociativeAndCommutative) {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_box(rng), b = random_box(rng), c = random_box(rng);
    EXPECT_EQ(bbox_union(a, b), bbox_union(b, a));
    EXPECT_EQ(bbox_union(bbox_union(a, b), c), bbox_union(a, bbox_union(b, c)));
  }
}

TEST(BBoxIou, Examples) {
  EXPECT_DOUBLE_EQ(bbox_iou(BBox{3, 4, 9, 5.5}, BBox{3, 4, 9, 5.5}), 1.0);
  EXPECT_DOUBLE_EQ(bbox_iou(BBox{0, 0, 1, 1}, BBox{5, 5, 6, 6}), 0.0);
  EXPECT_NEAR(bbox_iou(BBox{0, 0, 2, 2}, BBox{1, 0, 3, 2}), 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(bbox_iou(BBox{1, 1, 1, 1}, BBox{1, 1, 1, 1}), 0.0);
}

TEST(BBoxIou, SymmetricAndOneOnlyForEqualBoxes) {
  std::mt19937 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_box(rng), b = random_box(rng);
    const double ab = bbox_iou(a, b);
    EXPECT_DOUBLE_EQ(ab, bbox_iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    if (!(a == b)) EXPECT_LT(ab, 1.0);
    EXPECT_DOUBLE_EQ(bbox_iou(a, a), 1.0);
  }
}

TEST(VOverlap, Examples) {
  EXPECT_DOUBLE_EQ(v_overlap(BBox{0, 0, 5, 10}, BBox{7, 0, 9, 10}), 1.0);
  EXPECT_DOUBLE_EQ(v_overlap(BBox{0, 0, 5, 10}, BBox{0, 20, 5, 30}), 0.0);
  EXPECT_DOUBLE_EQ(v_overlap(BBox{0, 0, 5, 10}, BBox{0, 5, 5, 25}), 0.5);
  EXPECT_DOUBLE_EQ(v_overlap(BBox{0, 3, 5, 3}, BBox{0, 0, 5, 10}), 0.0);
}

TEST(VOverlap, SymmetricAndMonotoneWhenApproaching) {
  std::mt19937 rng(17);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_box(rng);
    auto b = random_box(rng).translated(0, 120);
    EXPECT_DOUBLE_EQ(v_overlap(a, b), v_overlap(b, a));
    // Slide b upward until its top edge reaches a's top edge.
    double prev = v_overlap(a, b);
    const double step = 0.5;
    while (b.y0 - step > a.y0) {
      b = b.translated(0, -step);
      const double cur = v_overlap(a, b);
      EXPECT_GE(cur + 1e-12, prev);
      prev = cur;
    }
  }
}

TEST(BBox, InvariantsAndFactory) {
  EXPECT_THROW(BBox::make(2, 0, 1, 1), Error);
  const auto b = BBox::make(1, 2, 4, 8);
  EXPECT_DOUBLE_EQ(b.width(), 3);
  EXPECT_DOUBLE_EQ(b.height(), 6);
  EXPECT_EQ(b.padded(0.1), (BBox{0.7, 1.4, 4.3, 8.6}));
}

TEST(RasterImage, ValidatesAndCrops) {
  EXPECT_THROW(RasterImage(0, 3), Error);
  EXPECT_THROW(RasterImage(2, 2, std::vector<std::uint8_t>(5)), Error);
  RasterImage img(10, 8, Color{1, 2, 3});
  img.set(4, 5, Color{9, 9, 9});
  const auto c = img.crop(BBox{3.2, 4.7, 6.0, 7.0});
  EXPECT_EQ(c.width(), 3);
  EXPECT_EQ(c.height(), 3);
  EXPECT_EQ(c.at(1, 1), (Color{9, 9, 9}));
}

TEST(ImageIo, PngRoundTrip) {
  std::mt19937 rng(3);
  std::vector<std::uint8_t> px(17 * 9 * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng());
  const RasterImage img(17, 9, px);
  const auto bytes = encode_png(img);
  EXPECT_EQ(sniff_format(bytes), ImageFormat::kPng);
  EXPECT_EQ(decode_image(bytes), img);
}

TEST(ImageIo, JpegRoundTripIsClose) {
  RasterImage img(32, 16, Color{200, 100, 50});
  const auto bytes = encode_jpeg(img);
  EXPECT_EQ(sniff_format(bytes), ImageFormat::kJpeg);
  const auto back = decode_image(bytes);
  ASSERT_EQ(back.width(), 32);
  ASSERT_EQ(back.height(), 16);
  const auto c = back.at(10, 10);
  EXPECT_NEAR(c.r, 200, 4);
  EXPECT_NEAR(c.g, 100, 4);
  EXPECT_NEAR(c.b, 50, 4);
}

TEST(ImageIo, RejectsGarbage) {
  const Bytes junk = {'n', 'o', 't', ' ', 'a', 'n', ' ', 'i', 'm', 'a', 'g', 'e'};
  EXPECT_THROW(decode_image(junk), Error);
  Bytes truncated = encode_png(RasterImage(20, 20));
  truncated.resize(truncated.size() / 2);
  EXPECT_THROW(decode_image(truncated), Error);
}

TEST(ImageIo, MaskRoundTrip) {
  Mask m(13, 7);
  m.set(0, 0, true);
  m.set(12, 6, true);
  m.set(5, 3, true);
  EXPECT_EQ(decode_mask_png(encode_mask_png(m)), m);
}

TEST(Base64, RoundTripAndRejects) {
  std::mt19937 rng(5);
  for (std::size_t n = 0; n < 40; ++n) {
    Bytes data(n);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    EXPECT_EQ(base64::decode(base64::encode(data)), data);
  }
  EXPECT_EQ(base64::encode(Bytes{'M', 'a', 'n'}), "TWFu");
  EXPECT_EQ(base64::encode(Bytes{'M'}), "TQ==");
  EXPECT_THROW(base64::decode("@@@@"), Error);
}

TEST(Text, Utf8AndWhitespace) {
  EXPECT_EQ(text::codepoint_count("Größe"), 5u);
  EXPECT_EQ(text::normalize_space("  a \n\t b  "), "a b");
  EXPECT_EQ(text::split_whitespace(" x  y z "), (std::vector<std::string>{"x", "y", "z"}));
}

}  // namespace
}  // namespace imgtrans
