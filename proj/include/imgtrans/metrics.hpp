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

// OCR and MT evaluation metrics: character/word edit rates with
// substitution/deletion/insertion counts, corpus BLEU (13a tokenization,
// exponential smoothing) and corpus chrF (character 6-grams, beta 2). BLEU
// and chrF follow the SacreBLEU definitions so scores are comparable.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cwctype>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imgtrans/error.hpp"
#include "imgtrans/text.hpp"

namespace imgtrans::metrics {

struct EditCounts {
  std::size_t sub = 0;
  std::size_t del = 0;
  std::size_t ins = 0;
  std::size_t hits = 0;

  std::size_t distance() const { return sub + del + ins; }
  std::size_t ref_length() const { return sub + del + hits; }
  std::size_t hyp_length() const { return sub + ins + hits; }

  EditCounts& operator+=(const EditCounts& o) {
    sub += o.sub;
    del += o.del;
    ins += o.ins;
    hits += o.hits;
    return *this;
  }

  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

struct RateResult {
  double rate = 0.0;
  EditCounts counts;
};

struct MetricOptions {
  bool case_fold = false;
  bool strip_punctuation = false;
};

/// Levenshtein alignment of `hyp` against `ref`. Among minimal alignments the
/// backtrace prefers a diagonal step (hit or substitution), then a deletion
/// (reference symbol missing from the hypothesis), then an insertion.
template <typename T>
EditCounts align(std::span<const T> hyp, std::span<const T> ref) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts c;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        same ? ++c.hits : ++c.sub;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.del;
      --i;
    } else {
      ++c.ins;
      --j;
    }
  }
  return c;
}

namespace detail {

inline std::u32string prepare(std::string_view s, const MetricOptions& opts) {
  std::u32string out;
  for (char32_t c : text::decode_utf8(s)) {
    if (opts.strip_punctuation && std::iswpunct(static_cast<wint_t>(c))) continue;
    if (opts.case_fold) c = static_cast<char32_t>(std::towlower(static_cast<wint_t>(c)));
    out.push_back(c);
  }
  // Collapse whitespace runs and trim.
  std::u32string norm;
  bool pending_space = false;
  for (char32_t c : out) {
    if (text::is_space(c)) {
      pending_space = !norm.empty();
      continue;
    }
    if (pending_space) norm.push_back(U' ');
    pending_space = false;
    norm.push_back(c);
  }
  return norm;
}

inline std::vector<std::u32string> split_words(const std::u32string& s) {
  std::vector<std::u32string> words;
  std::u32string cur;
  for (char32_t c : s) {
    if (text::is_space(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace detail

/// Character edit distance over the whitespace-normalized reference length.
inline RateResult char_error_rate(std::string_view hyp, std::string_view ref,
                                  const MetricOptions& opts = {}) {
  const auto r = detail::prepare(ref, opts);
  if (r.empty()) throw Error(ErrorKind::kUndefinedReference, "reference is empty");
  const auto h = detail::prepare(hyp, opts);
  const auto c = align<char32_t>(h, r);
  return {static_cast<double>(c.distance()) / static_cast<double>(r.size()), c};
}

/// Word-level Levenshtein rate. This is TER without block shifts.
inline RateResult word_edit_rate(std::string_view hyp, std::string_view ref,
                                 const MetricOptions& opts = {}) {
  const auto r = detail::split_words(detail::prepare(ref, opts));
  if (r.empty()) throw Error(ErrorKind::kUndefinedReference, "reference is empty");
  const auto h = detail::split_words(detail::prepare(hyp, opts));
  const auto c = align<std::u32string>(h, r);
  return {static_cast<double>(c.distance()) / static_cast<double>(r.size()), c};
}

// ---------------------------------------------------------------------------

struct CorpusPair {
  std::vector<std::string> hypotheses;
  std::vector<std::string> references;

  void add(std::string hyp, std::string ref) {
    hypotheses.push_back(std::move(hyp));
    references.push_back(std::move(ref));
  }
  std::size_t size() const { return hypotheses.size(); }

  void validate() const {
    if (hypotheses.size() != references.size()) {
      throw Error(ErrorKind::kInvalidArgument, "hypothesis and reference counts differ");
    }
    if (hypotheses.empty()) throw Error(ErrorKind::kEmptyCorpus, "corpus is empty");
  }
};

/// mteval-v13a tokenization as implemented by SacreBLEU.
inline std::string tokenize_13a(std::string_view input) {
  std::string line(input);
  auto replace_all = [&line](std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = line.find(from, pos)) != std::string::npos) {
      line.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("<skipped>", "");
  replace_all("-\n", "");
  replace_all("\n", " ");
  if (line.find('&') != std::string::npos) {
    replace_all("&quot;", "\"");
    replace_all("&amp;", "&");
    replace_all("&lt;", "<");
    replace_all("&gt;", ">");
  }
  line = " " + line + " ";

  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_dot_comma = [](char c) { return c == '.' || c == ','; };
  auto is_symbol = [](char c) {
    return (c >= '{' && c <= '~') || (c >= '[' && c <= '`') || (c >= ' ' && c <= '&') ||
           (c >= '(' && c <= '+') || (c >= ':' && c <= '@') || c == '/';
  };

  std::string s1;
  for (char c : line) {
    if (is_symbol(c)) {
      s1 += ' ';
      s1 += c;
      s1 += ' ';
    } else {
      s1 += c;
    }
  }
  // The remaining rules are two-character patterns applied left to right
  // without overlap, like re.sub.
  auto apply = [](const std::string& s, auto first_ok, auto second_ok, std::string_view pre,
                  std::string_view mid, std::string_view post) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
      if (i + 1 < s.size() && first_ok(s[i]) && second_ok(s[i + 1])) {
        out += pre;
        out += s[i];
        out += mid;
        out += s[i + 1];
        out += post;
        i += 2;
      } else {
        out += s[i++];
      }
    }
    return out;
  };
  auto not_digit = [&](char c) { return !is_digit(c); };
  auto dash = [](char c) { return c == '-'; };
  std::string s2 = apply(s1, not_digit, is_dot_comma, "", " ", " ");
  std::string s3 = apply(s2, is_dot_comma, not_digit, " ", " ", "");
  std::string s4 = apply(s3, is_digit, dash, "", " ", " ");

  const auto words = detail::split_words(text::decode_utf8(s4));
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += text::encode_utf8(words[i]);
  }
  return out;
}

struct BleuScore {
  double score = 0.0;
  std::vector<std::size_t> correct;
  std::vector<std::size_t> total;
  std::vector<double> precisions;
  double brevity_penalty = 1.0;
  std::size_t sys_len = 0;
  std::size_t ref_len = 0;
};

namespace detail {

inline std::string rstrip(std::string_view s) {
  std::u32string u = text::decode_utf8(s);
  while (!u.empty() && text::is_space(u.back())) u.pop_back();
  return text::encode_utf8(u);
}

inline std::map<std::vector<std::u32string>, std::size_t> word_ngrams(
    const std::vector<std::u32string>& toks, std::size_t max_order) {
  std::map<std::vector<std::u32string>, std::size_t> counts;
  for (std::size_t n = 1; n <= max_order; ++n) {
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      ++counts[std::vector<std::u32string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                           toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
  }
  return counts;
}

}  // namespace detail

/// Corpus BLEU with one reference per segment.
inline BleuScore bleu_details(const CorpusPair& corpus, std::size_t max_order = 4) {
  corpus.validate();
  BleuScore s;
  s.correct.assign(max_order, 0);
  s.total.assign(max_order, 0);
  s.precisions.assign(max_order, 0.0);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto hyp = detail::split_words(text::decode_utf8(tokenize_13a(detail::rstrip(corpus.hypotheses[k]))));
    const auto ref = detail::split_words(text::decode_utf8(tokenize_13a(detail::rstrip(corpus.references[k]))));
    s.sys_len += hyp.size();
    s.ref_len += ref.size();
    const auto hyp_ngrams = detail::word_ngrams(hyp, max_order);
    const auto ref_ngrams = detail::word_ngrams(ref, max_order);
    for (const auto& [gram, count] : hyp_ngrams) {
      const std::size_t n = gram.size() - 1;
      s.total[n] += count;
      if (auto it = ref_ngrams.find(gram); it != ref_ngrams.end()) {
        s.correct[n] += std::min(count, it->second);
      }
    }
  }
  if (s.sys_len < s.ref_len) {
    s.brevity_penalty = s.sys_len > 0
                            ? std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.sys_len))
                            : 0.0;
  }
  bool any_correct = false;
  for (auto c : s.correct) any_correct = any_correct || c > 0;
  if (!any_correct) return s;

  double smooth = 1.0;
  for (std::size_t n = 0; n < max_order; ++n) {
    if (s.total[n] == 0) break;
    if (s.correct[n] == 0) {
      smooth *= 2.0;
      s.precisions[n] = 100.0 / (smooth * static_cast<double>(s.total[n]));
    } else {
      s.precisions[n] = 100.0 * static_cast<double>(s.correct[n]) / static_cast<double>(s.total[n]);
    }
  }
  double log_sum = 0.0;
  for (double p : s.precisions) log_sum += p == 0.0 ? -9999999999.0 : std::log(p);
  s.score = s.brevity_penalty * std::exp(log_sum / static_cast<double>(max_order));
  return s;
}

inline double bleu(const CorpusPair& corpus) { return bleu_details(corpus).score; }

struct ChrfStats {
  // Per order: hypothesis n-grams, reference n-grams, matches.
  std::vector<std::size_t> hyp, ref, match;
};

inline ChrfStats chrf_statistics(const CorpusPair& corpus, std::size_t char_order = 6) {
  corpus.validate();
  ChrfStats st;
  st.hyp.assign(char_order, 0);
  st.ref.assign(char_order, 0);
  st.match.assign(char_order, 0);
  auto squeeze = [](std::string_view s) {
    std::u32string out;
    for (char32_t c : text::decode_utf8(s)) {
      if (!text::is_space(c)) out.push_back(c);
    }
    return out;
  };
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto h = squeeze(corpus.hypotheses[k]);
    const auto r = squeeze(corpus.references[k]);
    for (std::size_t n = 1; n <= char_order; ++n) {
      std::map<std::u32string, std::size_t> hc, rc;
      for (std::size_t i = 0; i + n <= h.size(); ++i) ++hc[h.substr(i, n)];
      for (std::size_t i = 0; i + n <= r.size(); ++i) ++rc[r.substr(i, n)];
      std::size_t hyp_total = 0, ref_total = 0, matches = 0;
      for (const auto& [g, c] : hc) {
        hyp_total += c;
        if (auto it = rc.find(g); it != rc.end()) matches += std::min(c, it->second);
      }
      for (const auto& [g, c] : rc) ref_total += c;
      st.hyp[n - 1] += hyp_total;
      st.ref[n - 1] += ref_total;
      st.match[n - 1] += matches;
    }
  }
  return st;
}

/// Corpus chrF: per-order precision and recall averaged over the orders
/// where both sides have n-grams, combined into F-beta.
inline double chrf(const CorpusPair& corpus, std::size_t char_order = 6, double beta = 2.0) {
  const auto st = chrf_statistics(corpus, char_order);
  const double factor = beta * beta;
  double avg_prec = 0.0, avg_rec = 0.0;
  std::size_t effective = 0;
  for (std::size_t n = 0; n < char_order; ++n) {
    if (st.hyp[n] > 0 && st.ref[n] > 0) {
      avg_prec += static_cast<double>(st.match[n]) / static_cast<double>(st.hyp[n]);
      avg_rec += static_cast<double>(st.match[n]) / static_cast<double>(st.ref[n]);
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  avg_prec /= static_cast<double>(effective);
  avg_rec /= static_cast<double>(effective);
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100.0 * (1.0 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec);
}

}  // namespace imgtrans::metrics
