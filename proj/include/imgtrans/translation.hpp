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
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "imgtrans/error.hpp"
#include "imgtrans/image.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/text.hpp"
#include "imgtrans/units.hpp"

namespace imgtrans {

inline bool is_iso639_1(std::string_view code) {
  static const std::set<std::string_view> kCodes = {
      "aa", "ab", "ae", "af", "ak", "am", "an", "ar", "as", "av", "ay", "az", "ba", "be", "bg",
      "bh", "bi", "bm", "bn", "bo", "br", "bs", "ca", "ce", "ch", "co", "cr", "cs", "cu", "cv",
      "cy", "da", "de", "dv", "dz", "ee", "el", "en", "eo", "es", "et", "eu", "fa", "ff", "fi",
      "fj", "fo", "fr", "fy", "ga", "gd", "gl", "gn", "gu", "gv", "ha", "he", "hi", "ho", "hr",
      "ht", "hu", "hy", "hz", "ia", "id", "ie", "ig", "ii", "ik", "io", "is", "it", "iu", "ja",
      "jv", "ka", "kg", "ki", "kj", "kk", "kl", "km", "kn", "ko", "kr", "ks", "ku", "kv", "kw",
      "ky", "la", "lb", "lg", "li", "ln", "lo", "lt", "lu", "lv", "mg", "mh", "mi", "mk", "ml",
      "mn", "mr", "ms", "mt", "my", "na", "nb", "nd", "ne", "ng", "nl", "nn", "no", "nr", "nv",
      "ny", "oc", "oj", "om", "or", "os", "pa", "pi", "pl", "ps", "pt", "qu", "rm", "rn", "ro",
      "ru", "rw", "sa", "sc", "sd", "se", "sg", "si", "sk", "sl", "sm", "sn", "so", "sq", "sr",
      "ss", "st", "su", "sv", "sw", "ta", "te", "tg", "th", "ti", "tk", "tl", "tn", "to", "tr",
      "ts", "tt", "tw", "ty", "ug", "uk", "ur", "uz", "ve", "vi", "vo", "wa", "wo", "xh", "yi",
      "yo", "za", "zh", "zu"};
  return kCodes.count(code) > 0;
}

struct LangPair {
  std::string src;
  std::string tgt;

  static LangPair make(std::string src, std::string tgt) {
    if (!is_iso639_1(src) || !is_iso639_1(tgt)) {
      throw Error(ErrorKind::kInvalidArgument, "unknown language code in pair " + src + "-" + tgt);
    }
    if (src == tgt) throw Error(ErrorKind::kInvalidArgument, "source and target language are equal");
    return LangPair{std::move(src), std::move(tgt)};
  }

  std::string str() const { return src + "-" + tgt; }

  friend bool operator==(const LangPair&, const LangPair&) = default;
  friend auto operator<=>(const LangPair&, const LangPair&) = default;
};

enum class Modality { kText, kTextImage };

struct MtInfo {
  std::string name;
  Modality modality = Modality::kText;
  std::vector<LangPair> pairs;  // empty means any pair
  bool concurrent = false;
};

class MtBackend {
 public:
  virtual ~MtBackend() = default;
  virtual const MtInfo& info() const = 0;
  /// `context` is only passed to TEXT+IMAGE backends.
  virtual std::string translate(const std::string& text, const LangPair& pair,
                                const RasterImage* context) = 0;

  bool supports(const LangPair& pair) const {
    const auto& pairs = info().pairs;
    return pairs.empty() || std::find(pairs.begin(), pairs.end(), pair) != pairs.end();
  }
};

class IdentityBackend final : public MtBackend {
 public:
  explicit IdentityBackend(Modality modality = Modality::kText)
      : info_{"identity", modality, {}, true} {}
  const MtInfo& info() const override { return info_; }
  std::string translate(const std::string& text, const LangPair&, const RasterImage*) override {
    return text;
  }

 private:
  MtInfo info_;
};

/// Word-by-word lookup with case-insensitive keys. Leading and trailing ASCII
/// punctuation stays attached to the replaced word; whitespace is preserved
/// exactly; unknown words pass through.
class DictionaryBackend final : public MtBackend {
 public:
  DictionaryBackend(std::map<std::string, std::string> table,
                    Modality modality = Modality::kText, std::vector<LangPair> pairs = {},
                    std::string name = "dictionary")
      : info_{std::move(name), modality, std::move(pairs), true} {
    for (auto& [k, v] : table) table_[text::to_lower_ascii(k)] = std::move(v);
  }

  const MtInfo& info() const override { return info_; }

  std::string translate(const std::string& input, const LangPair&,
                        const RasterImage* context) override {
    if (context != nullptr) ++contexts_seen_;
    std::string out;
    std::size_t i = 0;
    while (i < input.size()) {
      if (text::is_ascii_space(input[i])) {
        out.push_back(input[i++]);
        continue;
      }
      std::size_t j = i;
      while (j < input.size() && !text::is_ascii_space(input[j])) ++j;
      out += translate_word(std::string_view(input).substr(i, j - i));
      i = j;
    }
    return out;
  }

  /// Number of calls that received an image context.
  std::size_t contexts_seen() const { return contexts_seen_; }

 private:
  static bool is_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  }

  std::string translate_word(std::string_view word) const {
    std::size_t b = 0, e = word.size();
    while (b < e && is_punct(word[b])) ++b;
    while (e > b && is_punct(word[e - 1])) --e;
    if (b == e) return std::string(word);
    const auto it = table_.find(text::to_lower_ascii(word.substr(b, e - b)));
    if (it == table_.end()) return std::string(word);
    return std::string(word.substr(0, b)) + it->second + std::string(word.substr(e));
  }

  MtInfo info_;
  std::map<std::string, std::string> table_;
  std::atomic<std::size_t> contexts_seen_{0};
};

inline std::map<std::string, std::string> load_dictionary(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kMissingFile, "dictionary not found: " + path.string());
  }
  const auto bytes = read_file(path);
  try {
    const auto doc = nlohmann::json::parse(bytes.begin(), bytes.end());
    return doc.get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, "dictionary " + path.string() + ": " + e.what());
  }
}

inline std::unique_ptr<DictionaryBackend> dictionary_backend(
    std::map<std::string, std::string> table, Modality modality = Modality::kText) {
  return std::make_unique<DictionaryBackend>(std::move(table), modality);
}

/// Attaches the context image each unit's block should be translated with:
/// the block box padded by `pad_frac` of its size, or the whole image.
inline void attach_context(std::span<TranslationUnit> units, std::span<const TextBlock> blocks,
                           const RasterImage& image, bool full_image, double pad_frac = 0.10) {
  for (auto& u : units) {
    if (full_image) {
      u.context_crop = image;
    } else {
      u.context_crop = image.crop(blocks[u.block_ref].bbox.padded(pad_frac));
    }
  }
}

/// One TranslatedUnit per unit, in input order. Concurrent-capable backends
/// are called from up to `jobs` threads; otherwise calls are sequential.
inline std::vector<TranslatedUnit> translate_units(std::span<const TranslationUnit> units,
                                                   const LangPair& pair, MtBackend& backend,
                                                   std::size_t jobs = 1,
                                                   Warnings* warnings = nullptr) {
  if (!backend.supports(pair)) {
    throw BackendError(ErrorKind::kUnsupportedPair, backend.info().name,
                       "pair " + pair.str() + " not supported");
  }
  const bool with_image = backend.info().modality == Modality::kTextImage;
  auto run_one = [&](const TranslationUnit& u) {
    const RasterImage* ctx = with_image && u.context_crop ? &*u.context_crop : nullptr;
    return TranslatedUnit{u.id, backend.translate(u.source_text, pair, ctx), backend.info().name};
  };
  std::vector<TranslatedUnit> out(units.size());
  if (jobs <= 1 || !backend.info().concurrent || units.size() < 2) {
    for (std::size_t i = 0; i < units.size(); ++i) out[i] = run_one(units[i]);
  } else {
    std::vector<std::future<TranslatedUnit>> pending;
    std::size_t next = 0;
    while (next < units.size() || !pending.empty()) {
      while (next < units.size() && pending.size() < jobs) {
        pending.push_back(std::async(std::launch::async, run_one, std::cref(units[next])));
        ++next;
      }
      // Results are placed by position, so completion order does not matter.
      auto result = pending.front().get();
      pending.erase(pending.begin());
      const auto pos = static_cast<std::size_t>(
          std::find_if(units.begin(), units.end(),
                       [&](const TranslationUnit& u) { return u.id == result.unit_id; }) -
          units.begin());
      out[pos] = std::move(result);
    }
  }
  for (const auto& t : out) {
    if (text::trim(t.target_text).empty()) {
      warn(warnings, "unit " + std::to_string(t.unit_id) + " translated to empty text");
    }
  }
  return out;
}

/// Splits target words over lines in proportion to the line weights. Each
/// boundary goes to the word boundary whose cumulative character share is
/// nearest the cumulative weight share (earlier boundary on ties). Groups are
/// non-empty unless there are more lines than words.
inline std::vector<std::string> redistribute(std::string_view target_text,
                                             std::span<const double> line_weights) {
  if (line_weights.empty()) throw Error(ErrorKind::kInvalidArgument, "no line weights");
  for (double w : line_weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::kInvalidArgument, "line weights must be positive");
  }
  const auto words = text::split_whitespace(target_text);
  const std::size_t n_lines = line_weights.size();
  const std::size_t n_words = words.size();
  std::vector<std::string> out(n_lines);
  if (n_words <= n_lines) {
    for (std::size_t i = 0; i < n_words; ++i) out[i] = words[i];
    return out;
  }
  std::vector<double> cum_chars(n_words + 1, 0.0);
  for (std::size_t i = 0; i < n_words; ++i) {
    cum_chars[i + 1] = cum_chars[i] + static_cast<double>(text::codepoint_count(words[i]));
  }
  const double total_chars = cum_chars.back();
  const double total_weight = std::accumulate(line_weights.begin(), line_weights.end(), 0.0);
  std::vector<std::size_t> cuts;  // word index where each group after the first starts
  double cum_weight = 0.0;
  std::size_t prev = 0;
  for (std::size_t k = 1; k < n_lines; ++k) {
    cum_weight += line_weights[k - 1];
    const double target = cum_weight / total_weight;
    const std::size_t lo = prev + 1;
    const std::size_t hi = n_words - (n_lines - k);
    std::size_t best = lo;
    double best_diff = std::abs(cum_chars[lo] / total_chars - target);
    for (std::size_t j = lo + 1; j <= hi; ++j) {
      const double diff = std::abs(cum_chars[j] / total_chars - target);
      if (diff < best_diff) {
        best = j;
        best_diff = diff;
      }
    }
    cuts.push_back(best);
    prev = best;
  }
  cuts.push_back(n_words);
  std::size_t start = 0;
  for (std::size_t k = 0; k < n_lines; ++k) {
    std::vector<std::string> group(words.begin() + static_cast<std::ptrdiff_t>(start),
                                   words.begin() + static_cast<std::ptrdiff_t>(cuts[k]));
    out[k] = text::join(group, " ");
    start = cuts[k];
  }
  return out;
}

inline std::vector<std::string> redistribute(std::string_view target_text,
                                             std::initializer_list<double> line_weights) {
  return redistribute(target_text, std::span<const double>(line_weights.begin(), line_weights.size()));
}

}  // namespace imgtrans
