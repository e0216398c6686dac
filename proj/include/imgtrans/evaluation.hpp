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

// Dataset evaluation and latency benchmarking.
//
// Dataset layout:
//   images/              image files; the file name is the image id
//   ground_truth.json    annotation sidecar with line/block ids
//   references.json      {image id: {unit id: reference translation}}
//   predicted_ocr.json   optional annotation sidecar of OCR predictions

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "imgtrans/config.hpp"
#include "imgtrans/error.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/metrics.hpp"
#include "imgtrans/ocr.hpp"
#include "imgtrans/pipeline.hpp"
#include "imgtrans/timing.hpp"
#include "imgtrans/translation.hpp"

namespace imgtrans::eval {

inline const std::vector<std::string>& ocr_columns() {
  static const std::vector<std::string> kColumns = {"CER", "TER", "Sub.", "Del.", "Ins.", "Average Time"};
  return kColumns;
}

inline const std::vector<std::string>& mt_columns() {
  static const std::vector<std::string> kColumns = {"BLEU", "ChrF"};
  return kColumns;
}

enum class Condition { kPredictedLine, kPredictedLayout, kGroundTruth };

inline constexpr std::array<Condition, 3> kConditions = {Condition::kPredictedLine, Condition::kPredictedLayout,
                                                         Condition::kGroundTruth};

inline const char* condition_name(Condition c) {
  switch (c) {
    case Condition::kPredictedLine: return "OCR Predicted + Line-level";
    case Condition::kPredictedLayout: return "OCR Predicted + Layout-level";
    case Condition::kGroundTruth: return "Ground-Truth (OCR + Segmentation)";
  }
  return "?";
}

struct Dataset {
  std::filesystem::path root;
  std::vector<std::filesystem::path> images;
  AnnotationSet ground_truth;
  std::optional<AnnotationSet> predicted;
  std::map<std::string, std::map<std::size_t, std::string>> references;

  std::string id(const std::filesystem::path& image) const { return image.filename().string(); }

  /// Validates the whole layout and reports every problem at once.
  static Dataset load(const std::filesystem::path& dir) {
    Dataset d;
    d.root = dir;
    std::vector<std::string> problems;
    auto parse_json = [&](const std::filesystem::path& p) -> std::optional<nlohmann::json> {
      try {
        const auto bytes = read_file(p);
        return nlohmann::json::parse(bytes.begin(), bytes.end());
      } catch (const std::exception& e) {
        problems.push_back(p.filename().string() + ": " + e.what());
        return std::nullopt;
      }
    };

    if (!std::filesystem::is_directory(dir)) {
      throw Error(ErrorKind::kDataset, "dataset directory not found: " + dir.string());
    }
    if (std::filesystem::is_directory(dir / "images")) {
      d.images = list_images(dir / "images");
      if (d.images.empty()) problems.push_back("images/: no png or jpeg files");
    } else {
      problems.push_back("images/: directory missing");
    }
    if (auto j = parse_json(dir / "ground_truth.json")) {
      try {
        d.ground_truth = parse_annotations(*j);
      } catch (const std::exception& e) {
        problems.push_back(std::string("ground_truth.json: ") + e.what());
      }
    }
    if (std::filesystem::exists(dir / "predicted_ocr.json")) {
      if (auto j = parse_json(dir / "predicted_ocr.json")) {
        try {
          d.predicted = parse_annotations(*j);
        } catch (const std::exception& e) {
          problems.push_back(std::string("predicted_ocr.json: ") + e.what());
        }
      }
    }
    if (auto j = parse_json(dir / "references.json")) {
      if (!j->is_object()) {
        problems.push_back("references.json: expected an object keyed by image id");
      } else {
        for (const auto& [image_id, units] : j->items()) {
          if (!units.is_object()) {
            problems.push_back("references.json: " + image_id + ": expected an object keyed by unit id");
            continue;
          }
          auto& slot = d.references[image_id];
          for (const auto& [unit, text] : units.items()) {
            std::size_t pos = 0;
            unsigned long id = 0;
            try {
              id = std::stoul(unit, &pos);
            } catch (const std::exception&) {
              pos = 0;
            }
            if (pos == 0 || pos != unit.size()) {
              problems.push_back("references.json: " + image_id + ": unit id '" + unit + "' is not an integer");
            } else if (!text.is_string()) {
              problems.push_back("references.json: " + image_id + "/" + unit + ": expected a string");
            } else {
              slot[id] = text.get<std::string>();
            }
          }
        }
      }
    }
    for (const auto& img : d.images) {
      const auto id = d.id(img);
      if (!problems.empty() && d.ground_truth.empty()) break;
      if (!d.ground_truth.count(id)) problems.push_back("ground_truth.json: no entry for " + id);
      if (!d.references.count(id)) problems.push_back("references.json: no entry for " + id);
      if (d.predicted && !d.predicted->count(id)) problems.push_back("predicted_ocr.json: no entry for " + id);
    }
    if (!problems.empty()) {
      std::string msg = "malformed dataset " + dir.string() + ":";
      for (const auto& p : problems) msg += "\n  " + p;
      throw Error(ErrorKind::kDataset, msg);
    }
    return d;
  }

  std::string reference_translation(const std::string& image_id) const {
    std::vector<std::string> parts;
    if (auto it = references.find(image_id); it != references.end()) {
      for (const auto& [unit, text] : it->second) parts.push_back(text);
    }
    return text::normalize_space(text::join(parts, " "));
  }
};

/// Reading-order text of a layout: lines joined by single spaces.
inline std::string layout_text(std::span<const TextBlock> blocks) {
  std::vector<std::string> lines;
  for (const auto& b : blocks) {
    for (const auto& l : b.lines) lines.push_back(l.text());
  }
  return text::normalize_space(text::join(lines, " "));
}

struct OcrImageResult {
  std::string image_id;
  std::string hypothesis;
  std::string reference;
  metrics::RateResult cer;
  metrics::RateResult ter;
  double seconds = 0.0;
};

struct OcrReport {
  std::string model;
  double cer = 0.0;  // percent, corpus level
  double ter = 0.0;  // percent, corpus level
  metrics::EditCounts char_counts;
  metrics::EditCounts word_counts;
  double average_time = 0.0;
  std::vector<OcrImageResult> images;
};

struct MtRow {
  Condition condition;
  double bleu = 0.0;
  double chrf = 0.0;
  std::vector<std::string> hypotheses;
  std::vector<std::string> references;
};

struct MtReport {
  std::string model;
  std::vector<MtRow> rows;
};

struct EvalResult {
  OcrReport ocr;
  MtReport mt;
  Warnings warnings;
};

/// Evaluation reads OCR output from the dataset's predicted_ocr.json when the
/// configured selector is "none" or "annotation" without a file.
inline bool uses_dataset_predictions(const Dataset& d, const PipelineConfig& config) {
  if (!d.predicted) return false;
  const auto& sel = config.backends.ocr;
  return sel == "none" || (sel == "annotation" && config.annotations.empty());
}

inline EvalResult evaluate(const Dataset& d, const PipelineConfig& config) {
  EvalResult result;
  const bool dataset_ocr = uses_dataset_predictions(d, config);
  PipelineConfig effective = config;
  if (dataset_ocr) effective.backends.ocr = "none";
  Backends backends = make_backends(effective);
  std::unique_ptr<OcrBackend> ocr = dataset_ocr ? std::make_unique<AnnotationBackend>(*d.predicted, "predicted_ocr")
                                                : std::move(backends.ocr);
  GeometricLayout geometric(config.layout);
  GroundTruthLayout truth(d.ground_truth);
  MtBackend& mt = *backends.mt;
  const bool with_image = mt.info().modality == Modality::kTextImage;

  result.ocr.model = ocr->info().name;
  result.mt.model = mt.info().name;
  for (auto c : kConditions) result.mt.rows.push_back({c, 0.0, 0.0, {}, {}});

  double total_seconds = 0.0;
  for (const auto& path : d.images) {
    const auto id = d.id(path);
    const RasterImage image = load_image(path);

    const auto start = std::chrono::steady_clock::now();
    auto predicted = recognize(image, config.ocr, *ocr, id, &result.warnings);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    predicted = filter_tokens(predicted, config.ocr.min_conf);
    total_seconds += seconds;

    std::vector<OCRToken> gt_tokens;
    for (const auto& at : d.ground_truth.at(id)) gt_tokens.push_back(at.token);
    gt_tokens = clamp_tokens(std::move(gt_tokens), image.width(), image.height(), &result.warnings);
    const auto gt_blocks = truth.analyze(gt_tokens, id);
    const auto pred_blocks = geometric.analyze(predicted, id);

    OcrImageResult r;
    r.image_id = id;
    r.hypothesis = layout_text(pred_blocks);
    r.reference = layout_text(gt_blocks);
    r.seconds = seconds;
    if (r.reference.empty()) {
      result.warnings.push_back(id + ": empty ground-truth text, excluded from OCR rates");
    } else {
      r.cer = metrics::char_error_rate(r.hypothesis, r.reference);
      r.ter = metrics::word_edit_rate(r.hypothesis, r.reference);
      result.ocr.char_counts += r.cer.counts;
      result.ocr.word_counts += r.ter.counts;
    }
    result.ocr.images.push_back(std::move(r));

    for (auto& row : result.mt.rows) {
      const bool gt = row.condition == Condition::kGroundTruth;
      const auto& blocks = gt ? gt_blocks : pred_blocks;
      const auto level = row.condition == Condition::kPredictedLine ? SegmentationLevel::kLine : SegmentationLevel::kBlock;
      auto units = make_units(blocks, level);
      if (with_image) attach_context(units, blocks, image, config.full_image_context, config.context_pad);
      const auto translated = translate_units(units, config.pair, mt, 1, &result.warnings);
      std::vector<std::string> parts;
      for (const auto& t : translated) parts.push_back(t.target_text);
      row.hypotheses.push_back(text::normalize_space(text::join(parts, " ")));
      row.references.push_back(d.reference_translation(id));
    }
  }

  const auto& cc = result.ocr.char_counts;
  const auto& wc = result.ocr.word_counts;
  result.ocr.cer = cc.ref_length() == 0 ? 0.0 : 100.0 * static_cast<double>(cc.distance()) / cc.ref_length();
  result.ocr.ter = wc.ref_length() == 0 ? 0.0 : 100.0 * static_cast<double>(wc.distance()) / wc.ref_length();
  result.ocr.average_time = d.images.empty() ? 0.0 : total_seconds / static_cast<double>(d.images.size());

  for (auto& row : result.mt.rows) {
    metrics::CorpusPair corpus;
    for (std::size_t i = 0; i < row.hypotheses.size(); ++i) corpus.add(row.hypotheses[i], row.references[i]);
    row.bleu = metrics::bleu(corpus);
    row.chrf = metrics::chrf(corpus);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Report formatting

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Plain-text table with a header row and left-aligned, padded columns.
inline std::string format_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = text::codepoint_count(header[c]);
    for (const auto& r : rows) width[c] = std::max(width[c], text::codepoint_count(r[c]));
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out += " | ";
      out += cells[c];
      if (c + 1 < cells.size()) out.append(width[c] - text::codepoint_count(cells[c]), ' ');
    }
    return out + "\n";
  };
  std::string out = line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  out += line(rule);
  for (const auto& r : rows) out += line(r);
  return out;
}

inline nlohmann::json counts_to_json(const metrics::EditCounts& c) {
  return {{"sub", c.sub}, {"del", c.del}, {"ins", c.ins}, {"hits", c.hits}};
}

inline nlohmann::json ocr_report_json(const OcrReport& r) {
  nlohmann::json values = {{"CER", r.cer},
                           {"TER", r.ter},
                           {"Sub.", r.word_counts.sub},
                           {"Del.", r.word_counts.del},
                           {"Ins.", r.word_counts.ins},
                           {"Average Time", r.average_time}};
  nlohmann::json images = nlohmann::json::array();
  for (const auto& im : r.images) {
    images.push_back({{"image", im.image_id},
                      {"hypothesis", im.hypothesis},
                      {"reference", im.reference},
                      {"cer", im.cer.rate},
                      {"ter", im.ter.rate},
                      {"char_counts", counts_to_json(im.cer.counts)},
                      {"word_counts", counts_to_json(im.ter.counts)}});
  }
  return {{"row_label", "Model"},
          {"columns", ocr_columns()},
          {"rows", nlohmann::json::array({{{"Model", r.model}, {"values", values}}})},
          {"char_counts", counts_to_json(r.char_counts)},
          {"images", images}};
}

inline std::string ocr_report_text(const OcrReport& r) {
  std::vector<std::string> header = {"Model"};
  header.insert(header.end(), ocr_columns().begin(), ocr_columns().end());
  header.back() = "Average Time (Seconds)";
  return format_table(header, {{r.model, fixed(r.cer, 2), fixed(r.ter, 2), std::to_string(r.word_counts.sub),
                                std::to_string(r.word_counts.del), std::to_string(r.word_counts.ins),
                                fixed(r.average_time, 4)}});
}

inline nlohmann::json mt_report_json(const MtReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"Condition", condition_name(row.condition)},
                    {"values", {{"BLEU", row.bleu}, {"ChrF", row.chrf}}},
                    {"segments", row.hypotheses.size()}});
  }
  return {{"row_label", "Condition"}, {"model", r.model}, {"columns", mt_columns()}, {"rows", rows}};
}

inline std::string mt_report_text(const MtReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) rows.push_back({condition_name(row.condition), fixed(row.bleu, 2), fixed(row.chrf, 2)});
  return "Model: " + r.model + "\n" + format_table({"Condition", "BLEU", "ChrF"}, rows);
}

/// Writes ocr_report.{json,txt} and mt_report.{json,txt} into `out_dir`.
inline void write_reports(const EvalResult& r, const std::filesystem::path& out_dir) {
  write_file(out_dir / "ocr_report.json", ocr_report_json(r.ocr).dump(2) + "\n");
  write_file(out_dir / "ocr_report.txt", ocr_report_text(r.ocr));
  write_file(out_dir / "mt_report.json", mt_report_json(r.mt).dump(2) + "\n");
  write_file(out_dir / "mt_report.txt", mt_report_text(r.mt));
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchReport {
  std::vector<StageTiming> rows;  // mean seconds per image
  double total = 0.0;
  std::size_t images = 0;
  std::vector<std::string> failures;
};

/// Mean per-stage seconds over `times`.
inline BenchReport summarize(std::span<const StageTimes> times) {
  BenchReport r;
  StageTimes sum;
  for (const auto& t : times) sum += t;
  r.images = times.size();
  const double n = times.empty() ? 1.0 : static_cast<double>(times.size());
  for (auto s : kStages) r.rows.push_back({stage_name(s), sum[s] / n});
  for (const auto& row : r.rows) r.total += row.seconds;
  return r;
}

inline BenchReport bench(Pipeline& pipeline, const std::vector<std::filesystem::path>& images) {
  if (images.empty()) throw Error(ErrorKind::kDataset, "bench needs at least one image");
  std::vector<StageTimes> times;
  std::vector<std::string> failures;
  for (const auto& path : images) {
    auto run = pipeline.run(load_image(path), path.filename().string());
    if (!run.ok()) {
      failures.push_back(path.filename().string() + ": " + run.sidecar.failure->stage + ": " +
                         run.sidecar.failure->message);
    }
    times.push_back(run.times);
  }
  auto r = summarize(times);
  r.failures = std::move(failures);
  return r;
}

inline nlohmann::json bench_json(const BenchReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) rows.push_back({{"stage", row.stage}, {"seconds", row.seconds}});
  return {{"rows", rows}, {"total", r.total}, {"images", r.images}, {"failures", r.failures}};
}

inline std::string bench_text(const BenchReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) rows.push_back({row.stage, fixed(row.seconds, 4)});
  rows.push_back({"Total", fixed(r.total, 4)});
  return format_table({"Stage", "Seconds"}, rows);
}

}  // namespace imgtrans::eval
