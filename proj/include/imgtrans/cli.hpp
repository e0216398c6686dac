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

// Command-line front end. Exit codes: 0 success, 2 usage or configuration
// error, 3 a pipeline stage failed, 4 malformed dataset.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "imgtrans/config.hpp"
#include "imgtrans/deck.hpp"
#include "imgtrans/error.hpp"
#include "imgtrans/evaluation.hpp"
#include "imgtrans/pipeline.hpp"

namespace imgtrans::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kStageFailure = 3;
inline constexpr int kDatasetError = 4;

struct CommonOptions {
  std::string config;
  std::string src, tgt, level, out;
  int jobs = 0;
  std::map<std::string, std::string> backends;
  std::vector<std::string> sets;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "JSON configuration file");
    app.add_option("--src", src, "Source language (ISO 639-1)");
    app.add_option("--tgt", tgt, "Target language (ISO 639-1)");
    app.add_option("--level", level, "Segmentation level")->check(CLI::IsMember({"line", "block"}));
    app.add_option("--out", out, "Output directory");
    app.add_option("--jobs", jobs, "Parallelism degree")->check(CLI::PositiveNumber);
    for (const char* stage : {"ocr", "layout", "mt", "text_mt", "inpaint"}) {
      app.add_option(std::string("--backend.") + stage, backends[stage],
                     std::string("Backend selector or http:// URL for ") + stage);
    }
    app.add_option("--set", sets, "Override any config key: KEY=VALUE (repeatable)");
  }

  PipelineConfig load() const {
    std::map<std::string, std::string> overrides;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::kConfig, "--set expects KEY=VALUE, got '" + kv + "'");
      overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!src.empty()) overrides["pair.src"] = src;
    if (!tgt.empty()) overrides["pair.tgt"] = tgt;
    if (!level.empty()) overrides["level"] = level;
    if (!out.empty()) overrides["output_dir"] = out;
    if (jobs > 0) overrides["jobs"] = std::to_string(jobs);
    for (const auto& [stage, sel] : backends) {
      if (!sel.empty()) overrides["backends." + stage] = sel;
    }
    return load_config(config.empty() ? std::nullopt : std::optional<std::filesystem::path>(config), overrides);
  }
};

inline int translate_images(const CommonOptions& opts, const std::vector<std::string>& inputs, std::ostream& out,
                            std::ostream& err) {
  std::vector<std::filesystem::path> files;
  for (const auto& in : inputs) {
    const std::filesystem::path p(in);
    if (!std::filesystem::exists(p)) {
      err << "error: input not found: " << in << "\n";
      return kUsage;
    }
    if (std::filesystem::is_directory(p)) {
      const auto listed = list_images(p);
      files.insert(files.end(), listed.begin(), listed.end());
    } else {
      files.push_back(p);
    }
  }
  const auto config = opts.load();
  auto pipeline = Pipeline::from_config(config);
  const auto items = pipeline.run_batch(files, config.output_dir, static_cast<std::size_t>(config.jobs));
  int code = kOk;
  for (const auto& item : items) {
    if (item.ok()) {
      out << item.sidecar.image_id << ": " << item.sidecar.translations.size() << " unit(s) -> "
          << item.output_image.string() << "\n";
    } else {
      err << "error: " << item.sidecar.image_id << ": stage " << item.sidecar.failure->stage << ": "
          << item.sidecar.failure->message << "\n";
      code = kStageFailure;
    }
  }
  return code;
}

inline int translate_deck(const CommonOptions& opts, const std::string& input, std::ostream& out, std::ostream& err) {
  const std::filesystem::path path(input);
  if (!std::filesystem::is_regular_file(path)) {
    err << "error: deck not found: " << input << "\n";
    return kUsage;
  }
  const auto config = opts.load();
  auto pipeline = Pipeline::from_config(config);
  const std::filesystem::path out_dir(config.output_dir);
  const auto out_deck = out_dir / (path.stem().string() + ".translated.pptx");
  const auto out_report = out_dir / (path.stem().string() + ".report.json");
  try {
    const auto source = deck::Deck::open(path);
    deck::LocalizeOptions lo{config.merge_paragraphs, static_cast<std::size_t>(config.jobs)};
    auto result = deck::localize_deck(source, config.pair, pipeline.text_backend(), pipeline.image_translator(), lo);
    result.deck.save(out_deck);
    write_file(out_report, deck::report_to_json(result.report).dump(2) + "\n");
    out << result.report.runs.size() << " text run(s), " << result.report.count_images("translated")
        << " image(s) translated, "
        << result.report.count_images("failed") + result.report.count_images("skipped") << " image(s) flagged -> "
        << out_deck.string() << "\n";
  } catch (const Error& e) {
    err << "error: deck: " << e.what() << "\n";
    return kStageFailure;
  }
  return kOk;
}

inline int evaluate_dataset(const CommonOptions& opts, const std::string& dir, std::ostream& out, std::ostream& err) {
  const auto config = opts.load();
  eval::Dataset dataset;
  try {
    dataset = eval::Dataset::load(dir);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDatasetError;
  }
  try {
    const auto result = eval::evaluate(dataset, config);
    eval::write_reports(result, config.output_dir);
    out << eval::ocr_report_text(result.ocr) << "\n" << eval::mt_report_text(result.mt);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kConfig ? kUsage : kStageFailure;
  }
  return kOk;
}

inline int run_bench(const CommonOptions& opts, const std::string& dir, std::ostream& out, std::ostream& err) {
  if (!std::filesystem::is_directory(dir)) {
    err << "error: image directory not found: " << dir << "\n";
    return kUsage;
  }
  const auto images = list_images(dir);
  if (images.empty()) {
    err << "error: no images in " << dir << "\n";
    return kDatasetError;
  }
  const auto config = opts.load();
  auto pipeline = Pipeline::from_config(config);
  const auto report = eval::bench(pipeline, images);
  const std::filesystem::path out_dir(config.output_dir);
  write_file(out_dir / "bench.json", eval::bench_json(report).dump(2) + "\n");
  write_file(out_dir / "bench.txt", eval::bench_text(report));
  out << eval::bench_text(report);
  for (const auto& f : report.failures) err << "error: " << f << "\n";
  return report.failures.empty() ? kOk : kStageFailure;
}

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Translate text in images and slide decks", "imgtrans"};
  app.require_subcommand(1);

  CommonOptions image_opts, deck_opts, eval_opts, bench_opts;
  std::vector<std::string> image_inputs;
  std::string deck_input, eval_dir, bench_dir;

  auto* image_cmd = app.add_subcommand("translate-image", "Translate text rendered in images");
  image_opts.attach(*image_cmd);
  image_cmd->add_option("inputs", image_inputs, "Image files or directories")->required();

  auto* deck_cmd = app.add_subcommand("translate-deck", "Localize a .pptx deck");
  deck_opts.attach(*deck_cmd);
  deck_cmd->add_option("deck", deck_input, "Input .pptx")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score OCR and translation against a dataset");
  eval_opts.attach(*eval_cmd);
  eval_cmd->add_option("dataset", eval_dir, "Dataset directory")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Per-stage latency over a directory of images");
  bench_opts.attach(*bench_cmd);
  bench_cmd->add_option("images", bench_dir, "Image directory")->required();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size());
  for (auto it = args.rbegin(); it != args.rend(); ++it) argv_store.push_back(*it);
  try {
    app.parse(argv_store);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  try {
    if (image_cmd->parsed()) return translate_images(image_opts, image_inputs, out, err);
    if (deck_cmd->parsed()) return translate_deck(deck_opts, deck_input, out, err);
    if (eval_cmd->parsed()) return evaluate_dataset(eval_opts, eval_dir, out, err);
    return run_bench(bench_opts, bench_dir, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::kConfig) return kUsage;
    if (e.kind() == ErrorKind::kDataset) return kDatasetError;
    return kStageFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kStageFailure;
  }
}

}  // namespace imgtrans::cli
