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

// TrueType/OpenType (glyf outlines) loading, measuring and glyph compositing
// on top of stb_truetype.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#define STBTT_STATIC
#define STB_TRUETYPE_IMPLEMENTATION
#include "stb_truetype.h"

#include "imgtrans/error.hpp"
#include "imgtrans/geometry.hpp"
#include "imgtrans/image.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/text.hpp"

namespace imgtrans {

struct TextExtent {
  double width = 0.0;
  double height = 0.0;
};

/// Width must be non-decreasing in font size and in text length, and
/// measure("", s) must report zero width with the line height of s.
class FontMetrics {
 public:
  virtual ~FontMetrics() = default;
  virtual TextExtent measure(std::string_view text, double font_px) const = 0;
};

class TrueTypeFont final : public FontMetrics {
 public:
  static TrueTypeFont load(const std::filesystem::path& path, int face_index = 0) {
    Bytes data;
    try {
      data = read_file(path);
    } catch (const Error& e) {
      throw Error(ErrorKind::kFontLoad, e.what());
    }
    return TrueTypeFont(std::move(data), face_index, path.string());
  }

  TrueTypeFont(Bytes data, int face_index = 0, std::string label = "<memory>")
      : data_(std::make_shared<Bytes>(std::move(data))), label_(std::move(label)) {
    const int offset = stbtt_GetFontOffsetForIndex(data_->data(), face_index);
    if (offset < 0 || !stbtt_InitFont(&info_, data_->data(), offset)) {
      throw Error(ErrorKind::kFontLoad, "not a usable TrueType/OpenType font: " + label_);
    }
    stbtt_GetFontVMetrics(&info_, &ascent_, &descent_, &line_gap_);
  }

  const std::string& label() const { return label_; }

  TextExtent measure(std::string_view text, double font_px) const override {
    if (!(font_px > 0.0)) return {0.0, 0.0};
    const double scale = stbtt_ScaleForPixelHeight(&info_, static_cast<float>(font_px));
    double advance = 0.0;
    int prev = 0;
    for (char32_t cp : text::decode_utf8(text)) {
      if (cp < 0x20) continue;
      const int glyph = stbtt_FindGlyphIndex(&info_, static_cast<int>(cp));
      if (prev != 0) advance += scale * stbtt_GetGlyphKernAdvance(&info_, prev, glyph);
      int adv = 0, lsb = 0;
      stbtt_GetGlyphHMetrics(&info_, glyph, &adv, &lsb);
      advance += scale * adv;
      prev = glyph;
    }
    return {std::max(0.0, advance), font_px};
  }

  /// Ascender and descender (negative) in pixels for the given size.
  std::pair<double, double> vertical_extent(double font_px) const {
    const double scale = stbtt_ScaleForPixelHeight(&info_, static_cast<float>(font_px));
    return {scale * ascent_, scale * descent_};
  }

  bool has_glyph(char32_t cp) const { return stbtt_FindGlyphIndex(&info_, static_cast<int>(cp)) != 0; }

  /// Blends `text` into `image` starting at pen position (x, baseline).
  /// Only pixels inside `clip` are touched. Missing glyphs use the font's
  /// replacement glyph and add a warning.
  void draw_text(RasterImage& image, std::string_view text, double font_px, double x,
                 double baseline, Color color, const BBox& clip,
                 Warnings* warnings = nullptr) const {
    if (!(font_px > 0.0)) return;
    const float scale = stbtt_ScaleForPixelHeight(&info_, static_cast<float>(font_px));
    const int cx0 = std::max(0, static_cast<int>(std::ceil(clip.x0 - 0.5)));
    const int cy0 = std::max(0, static_cast<int>(std::ceil(clip.y0 - 0.5)));
    const int cx1 = std::min(image.width() - 1, static_cast<int>(std::floor(clip.x1 - 0.5)));
    const int cy1 = std::min(image.height() - 1, static_cast<int>(std::floor(clip.y1 - 0.5)));
    double pen = x;
    int prev = 0;
    std::set<char32_t> missing;
    std::vector<unsigned char> bitmap;
    const int base_y = static_cast<int>(std::floor(baseline));
    const float shift_y = static_cast<float>(baseline - base_y);
    for (char32_t cp : text::decode_utf8(text)) {
      if (cp < 0x20) continue;
      const int glyph = stbtt_FindGlyphIndex(&info_, static_cast<int>(cp));
      if (glyph == 0 && cp != U' ' && missing.insert(cp).second) {
        warn(warnings, "glyph U+" + hex(cp) + " missing in " + label_ + "; using replacement glyph");
      }
      if (prev != 0) pen += scale * stbtt_GetGlyphKernAdvance(&info_, prev, glyph);
      int adv = 0, lsb = 0;
      stbtt_GetGlyphHMetrics(&info_, glyph, &adv, &lsb);
      const int pen_x = static_cast<int>(std::floor(pen));
      const float shift_x = static_cast<float>(pen - pen_x);
      int bx0 = 0, by0 = 0, bx1 = 0, by1 = 0;
      stbtt_GetGlyphBitmapBoxSubpixel(&info_, glyph, scale, scale, shift_x, shift_y, &bx0, &by0,
                                      &bx1, &by1);
      const int gw = bx1 - bx0, gh = by1 - by0;
      if (gw > 0 && gh > 0) {
        bitmap.assign(static_cast<std::size_t>(gw) * gh, 0);
        stbtt_MakeGlyphBitmapSubpixel(&info_, bitmap.data(), gw, gh, gw, scale, scale, shift_x,
                                      shift_y, glyph);
        for (int gy = 0; gy < gh; ++gy) {
          const int py = base_y + by0 + gy;
          if (py < cy0 || py > cy1) continue;
          for (int gx = 0; gx < gw; ++gx) {
            const int px = pen_x + bx0 + gx;
            if (px < cx0 || px > cx1) continue;
            const int a = bitmap[static_cast<std::size_t>(gy) * gw + gx];
            if (a == 0) continue;
            const Color under = image.at(px, py);
            auto mix = [a](int bg, int fg) {
              return static_cast<std::uint8_t>((bg * (255 - a) + fg * a + 127) / 255);
            };
            image.set(px, py, {mix(under.r, color.r), mix(under.g, color.g), mix(under.b, color.b)});
          }
        }
      }
      pen += scale * adv;
      prev = glyph;
    }
  }

 private:
  static std::string hex(char32_t cp) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
    return buf;
  }

  std::shared_ptr<Bytes> data_;
  std::string label_;
  stbtt_fontinfo info_{};
  int ascent_ = 0, descent_ = 0, line_gap_ = 0;
};

/// First existing path from a list of common system font locations.
inline std::filesystem::path default_font_path() {
  static const char* kCandidates[] = {
      "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf",
      "/usr/share/fonts/dejavu/DejaVuSans.ttf",
      "/usr/share/fonts/TTF/DejaVuSans.ttf",
      "/usr/share/fonts/truetype/liberation/LiberationSans-Regular.ttf",
      "/System/Library/Fonts/Supplemental/Arial.ttf",
      "C:/Windows/Fonts/arial.ttf",
  };
  for (const char* c : kCandidates) {
    if (std::filesystem::exists(c)) return c;
  }
  return {};
}

}  // namespace imgtrans
