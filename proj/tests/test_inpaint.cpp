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

// Center-in-closed-box rasterization of an axis-aligned token grown by `grow`.
Mask oracle_mask(const std::vector<BBox>& boxes, double frac, int w, int h) {
  Mask m(w, h);
  for (const auto& b : boxes) {
    const double g = frac * (b.y1 - b.y0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double cx = x + 0.5, cy = y + 0.5;
        if (cx >= b.x0 - g && cx <= b.x1 + g && cy >= b.y0 - g && cy <= b.y1 + g) m.set(x, y);
      }
    }
  }
  return m;
}

std::vector<OCRToken> tokens_for(const std::vector<BBox>& boxes) {
  std::vector<OCRToken> out;
  for (const auto& b : boxes) out.push_back(make_token("w", b));
  return out;
}

TEST(BuildMask, Examples) {
  EXPECT_FALSE(build_mask({}, 10, 10).any());
  // Height 10, grow 1.5: covered centers lie in [-1.5, 11.5], so pixels 0..11.
  const auto m = build_mask(tokens_for({BBox{0, 0, 10, 10}}), 20, 20);
  EXPECT_TRUE(m.at(0, 0));
  EXPECT_TRUE(m.at(10, 10));
  EXPECT_TRUE(m.at(11, 11));
  EXPECT_FALSE(m.at(12, 5));
  EXPECT_FALSE(m.at(5, 12));
  EXPECT_EQ(m.count(), 12u * 12u);
  MaskParams none{0.0, 3};
  EXPECT_EQ(build_mask(tokens_for({BBox{2, 2, 4, 3}}), 8, 8, none).count(), 2u);
}

TEST(BuildMask, MatchesRectangleOracle) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coord(-8, 60), size(1, 20), count(0, 4);
  const MaskParams params{0.25, 3};
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<BBox> boxes;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const double x = coord(rng) / 2.0, y = coord(rng) / 2.0;
      boxes.push_back(BBox{x, y, x + size(rng), y + size(rng)});
    }
    EXPECT_EQ(build_mask(tokens_for(boxes), 48, 40, params), oracle_mask(boxes, 0.25, 48, 40));
  }
}

TEST(BuildMask, MonotoneInTokensAndDilation) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> coord(0, 50), size(2, 15), frac(0, 0.5);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<OCRToken> toks;
    for (int i = 0; i < 3; ++i) {
      const double x = coord(rng), y = coord(rng);
      toks.push_back(make_token("w", BBox{x, y, x + size(rng), y + size(rng) / 2}));
    }
    const double f0 = frac(rng), f1 = f0 + frac(rng);
    const auto small = build_mask(std::span(toks).first(2), 64, 64, {f0, 3});
    const auto more_tokens = build_mask(toks, 64, 64, {f0, 3});
    const auto more_dilation = build_mask(toks, 64, 64, {f1, 3});
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if (small.at(x, y)) EXPECT_TRUE(more_tokens.at(x, y));
        if (more_tokens.at(x, y)) EXPECT_TRUE(more_dilation.at(x, y));
      }
    }
  }
}

TEST(BuildMask, RotatedPolygonCoversInteriorOnly) {
  const OCRToken diamond = make_token("d", Polygon({{10, 0}, {20, 10}, {10, 20}, {0, 10}}));
  const auto m = build_mask(std::span(&diamond, 1), 24, 24, {0.0, 3});
  EXPECT_TRUE(m.at(10, 10));
  EXPECT_FALSE(m.at(1, 1));
  EXPECT_FALSE(m.at(18, 18));
}

TEST(MedianColor, EvenCountRoundsHalfUp) {
  const std::vector<Color> c = {{0, 10, 1}, {3, 20, 2}};
  EXPECT_EQ(median_color(c), (Color{2, 15, 2}));
  const std::vector<Color> odd = {{9, 0, 0}, {1, 0, 0}, {5, 0, 0}};
  EXPECT_EQ(median_color(odd), (Color{5, 0, 0}));
}

std::uint8_t sorted_median(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  if (n % 2 == 1) return static_cast<std::uint8_t>(v[n / 2]);
  return static_cast<std::uint8_t>((v[n / 2 - 1] + v[n / 2] + 1) / 2);
}

TEST(NaiveFill, SinglePixelTakesRingMedian) {
  std::mt19937 rng(10);
  std::uniform_int_distribution<int> value(0, 255);
  for (int iter = 0; iter < 100; ++iter) {
    RasterImage img(5, 5);
    std::vector<int> r, g, b;
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 5; ++x) {
        const Color c{static_cast<std::uint8_t>(value(rng)), static_cast<std::uint8_t>(value(rng)),
                      static_cast<std::uint8_t>(value(rng))};
        img.set(x, y, c);
        if (x == 2 && y == 2) continue;
        r.push_back(c.r);
        g.push_back(c.g);
        b.push_back(c.b);
      }
    }
    Mask m(5, 5);
    m.set(2, 2);
    const auto out = naive_fill(img, m, {0.15, 2});
    EXPECT_EQ(out.at(2, 2), (Color{sorted_median(r), sorted_median(g), sorted_median(b)}));
  }
}

TEST(NaiveFill, UniformBackgroundIsRestored) {
  const auto slide = testing::exit_sign();
  std::vector<OCRToken> toks;
  for (const auto& t : slide.tokens) toks.push_back(t.token);
  const auto mask = build_mask(toks, slide.image.width(), slide.image.height());
  const auto out = naive_fill(slide.image, mask);
  EXPECT_EQ(out, RasterImage(200, 80, Color{20, 110, 40}));
}

TEST(NaiveFill, PreservesUnmaskedAndIsIdempotent) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> value(0, 255), coord(0, 30);
  for (int iter = 0; iter < 50; ++iter) {
    RasterImage img(32, 32);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        img.set(x, y, {static_cast<std::uint8_t>(value(rng)), static_cast<std::uint8_t>(value(rng)), 7});
      }
    }
    Mask m(32, 32);
    for (int k = 0; k < 40; ++k) m.set(coord(rng), coord(rng));
    const auto once = naive_fill(img, m);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        if (!m.at(x, y)) EXPECT_EQ(once.at(x, y), img.at(x, y));
      }
    }
    EXPECT_EQ(naive_fill(once, m), once);
  }
}

TEST(NaiveFill, FullMaskIsMidGray) {
  Mask m(3, 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 3; ++x) m.set(x, y);
  }
  Warnings w;
  EXPECT_EQ(naive_fill(RasterImage(3, 2, Color{1, 2, 3}), m, {}, &w), RasterImage(3, 2, Color{128, 128, 128}));
  EXPECT_EQ(w.size(), 1u);
}

class CountingInpaint final : public InpaintBackend {
 public:
  explicit CountingInpaint(bool cheat) : cheat_(cheat) {}
  const BackendInfo& info() const override { return info_; }
  RasterImage fill(const RasterImage& image, const Mask&) override {
    ++calls;
    RasterImage out = image;
    if (cheat_) out.set(0, 0, {1, 2, 3});
    return out;
  }
  int calls = 0;

 private:
  bool cheat_;
  BackendInfo info_{"counting", {}, true};
};

TEST(Inpaint, EmptyMaskSkipsBackend) {
  CountingInpaint backend(true);
  const RasterImage img(4, 4, Color{9, 9, 9});
  EXPECT_EQ(inpaint(img, Mask(4, 4), backend), img);
  EXPECT_EQ(backend.calls, 0);
}

TEST(Inpaint, RejectsChangesOutsideMask) {
  CountingInpaint backend(true);
  Mask m(4, 4);
  m.set(3, 3);
  try {
    inpaint(RasterImage(4, 4), m, backend);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kContractViolation);
  }
  EXPECT_THROW(inpaint(RasterImage(5, 4), m, backend), Error);
}

}  // namespace
}  // namespace imgtrans
