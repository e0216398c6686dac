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

// End-to-end image pipeline: OCR -> layout -> translation -> inpainting ->
// drawing, with per-stage timing and a sidecar record for every image.

#include <atomic>
#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "imgtrans/config.hpp"
#include "imgtrans/deck.hpp"
#include "imgtrans/error.hpp"
#include "imgtrans/font.hpp"
#include "imgtrans/image_io.hpp"
#include "imgtrans/inpaint.hpp"
#include "imgtrans/layout.hpp"
#include "imgtrans/ocr.hpp"
#include "imgtrans/remote.hpp"
#include "imgtrans/render.hpp"
#include "imgtrans/sidecar.hpp"
#include "imgtrans/timing.hpp"
#include "imgtrans/translation.hpp"

namespace imgtrans {

/// OCR backend that never detects anything.
class NullOcr final : public OcrBackend {
 public:
  const BackendInfo& info() const override { return info_; }
  std::vector<OCRToken> detect(const RasterImage&, const OCRConfig&, std::string_view) override { return {}; }

 private:
  BackendInfo info_{"none", {}, true};
};

struct Backends {
  std::unique_ptr<OcrBackend> ocr;
  std::unique_ptr<LayoutBackend> layout;
  std::unique_ptr<MtBackend> mt;
  std::unique_ptr<MtBackend> text_mt;  // may be null: deck text then uses mt
  std::unique_ptr<InpaintBackend> inpaint;
};

namespace detail {

inline std::pair<std::string, std::string> split_selector(const std::string& sel) {
  const auto colon = sel.find(':');
  if (colon == std::string::npos) return {sel, ""};
  return {sel.substr(0, colon), sel.substr(colon + 1)};
}

inline remote::ClientOptions client_options(const PipelineConfig& c) {
  return {std::chrono::milliseconds(c.remote.connect_timeout_ms), std::chrono::milliseconds(c.remote.read_timeout_ms),
          c.remote.concurrent};
}

inline std::unique_ptr<MtBackend> make_mt(const std::string& sel, Modality modality, const PipelineConfig& c,
                                          const char* key) {
  if (remote::looks_like_url(sel)) return std::make_unique<remote::RemoteMt>(sel, modality, client_options(c));
  const auto [kind, arg] = split_selector(sel);
  if (kind == "identity") return std::make_unique<IdentityBackend>(modality);
  if (kind == "dictionary") {
    if (arg.empty()) throw Error(ErrorKind::kConfig, std::string(key) + ": dictionary needs a path (dictionary:PATH)");
    return std::make_unique<DictionaryBackend>(load_dictionary(arg), modality);
  }
  throw Error(ErrorKind::kConfig, std::string(key) + ": unknown backend '" + sel + "'");
}

/// Runs `fn` under `gate` unless the backend declares itself concurrent.
template <typename Backend, typename F>
auto gated(std::mutex& gate, const Backend& backend, F&& fn) -> decltype(fn()) {
  if (backend.info().concurrent) return std::forward<F>(fn)();
  std::lock_guard lock(gate);
  return std::forward<F>(fn)();
}

}  // namespace detail

/// Resolves every selector; files are loaded now so that a bad path fails at
/// startup. Remote endpoints are only checked syntactically.
inline Backends make_backends(const PipelineConfig& c) {
  Backends b;
  const auto& sel = c.backends;
  const auto annotations_path = [&](const std::string& arg, const char* key) {
    const std::string path = arg.empty() ? c.annotations : arg;
    if (path.empty()) throw Error(ErrorKind::kConfig, std::string(key) + ": no annotation file (set ocr.annotations)");
    return path;
  };

  if (remote::looks_like_url(sel.ocr)) {
    b.ocr = std::make_unique<remote::RemoteOcr>(sel.ocr, detail::client_options(c));
  } else if (const auto [kind, arg] = detail::split_selector(sel.ocr); kind == "annotation") {
    b.ocr = annotation_backend(annotations_path(arg, "backends.ocr"));
  } else if (kind == "none") {
    b.ocr = std::make_unique<NullOcr>();
  } else {
    throw Error(ErrorKind::kConfig, "backends.ocr: unknown backend '" + sel.ocr + "'");
  }

  if (remote::looks_like_url(sel.layout)) {
    b.layout = std::make_unique<remote::RemoteLayout>(sel.layout, detail::client_options(c));
  } else if (const auto [kind, arg] = detail::split_selector(sel.layout); kind == "geometric") {
    b.layout = std::make_unique<GeometricLayout>(c.layout);
  } else if (kind == "ground-truth") {
    b.layout = std::make_unique<GroundTruthLayout>(load_annotations(annotations_path(arg, "backends.layout")));
  } else {
    throw Error(ErrorKind::kConfig, "backends.layout: unknown backend '" + sel.layout + "'");
  }

  b.mt = detail::make_mt(sel.mt, c.mt_modality, c, "backends.mt");
  if (!sel.text_mt.empty()) b.text_mt = detail::make_mt(sel.text_mt, Modality::kText, c, "backends.text_mt");

  if (remote::looks_like_url(sel.inpaint)) {
    b.inpaint = std::make_unique<remote::RemoteInpaint>(sel.inpaint, detail::client_options(c));
  } else if (sel.inpaint == "naive") {
    b.inpaint = std::make_unique<NaiveInpaint>(c.mask);
  } else {
    throw Error(ErrorKind::kConfig, "backends.inpaint: unknown backend '" + sel.inpaint + "'");
  }
  return b;
}

struct ImageRun {
  std::optional<RasterImage> output;  // absent when a stage failed
  SidecarDocument sidecar;
  StageTimes times;

  bool ok() const { return !sidecar.failure.has_value(); }
};

struct BatchItem {
  std::filesystem::path input;
  std::filesystem::path output_image;
  std::filesystem::path sidecar_path;
  SidecarDocument sidecar;
  StageTimes times;

  bool ok() const { return !sidecar.failure.has_value(); }
};

class Pipeline {
 public:
  Pipeline(PipelineConfig config, Backends backends, std::shared_ptr<const TrueTypeFont> font)
      : config_(std::move(config)), backends_(std::move(backends)), font_(std::move(font)) {
    if (!backends_.ocr || !backends_.layout || !backends_.mt || !backends_.inpaint || !font_) {
      throw Error(ErrorKind::kConfig, "pipeline needs every backend and a font");
    }
  }

  static Pipeline from_config(const PipelineConfig& config) {
    std::shared_ptr<const TrueTypeFont> font;
    try {
      font = std::make_shared<const TrueTypeFont>(TrueTypeFont::load(config.font_path()));
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, e.what());
    }
    return Pipeline(config, make_backends(config), std::move(font));
  }

  const PipelineConfig& config() const { return config_; }
  Backends& backends() { return backends_; }
  const TrueTypeFont& font() const { return *font_; }

  /// Never throws for stage errors: the failing stage and message are
  /// recorded in the sidecar, which keeps whatever earlier stages produced.
  ImageRun run(const RasterImage& image, const std::string& image_id) {
    ImageRun r;
    auto& doc = r.sidecar;
    doc.image_id = image_id;
    doc.src = config_.pair.src;
    doc.tgt = config_.pair.tgt;
    doc.level = config_.level;
    Stage current = Stage::kOcr;
    try {
      // OCR
      auto tokens = r.times.time(Stage::kOcr, [&] {
        auto all = detail::gated(ocr_gate_, *backends_.ocr, [&] {
          return recognize(image, config_.ocr, *backends_.ocr, image_id, &doc.warnings);
        });
        auto kept = filter_tokens(all, config_.ocr.min_conf);
        if (kept.size() != all.size()) {
          doc.warnings.push_back(std::to_string(all.size() - kept.size()) + " token(s) below min_conf " +
                                 format_number(config_.ocr.min_conf) + " dropped");
        }
        return kept;
      });
      doc.tokens = tokens;

      // Layout
      current = Stage::kLayout;
      auto [blocks, units] = r.times.time(Stage::kLayout, [&] {
        auto b = detail::gated(layout_gate_, *backends_.layout, [&] { return backends_.layout->analyze(tokens, image_id); });
        auto u = make_units(b, config_.level);
        return std::make_pair(std::move(b), std::move(u));
      });
      doc.set_layout(blocks);
      doc.set_units(units);

      // Translation
      current = Stage::kTranslation;
      auto translated = r.times.time(Stage::kTranslation, [&] {
        if (backends_.mt->info().modality == Modality::kTextImage) {
          attach_context(units, blocks, image, config_.full_image_context, config_.context_pad);
        }
        return detail::gated(mt_gate_, *backends_.mt, [&] {
          return translate_units(units, config_.pair, *backends_.mt, 1, &doc.warnings);
        });
      });
      doc.translations = translated;

      // Inpainting: erase the tokens of every unit that has a translation.
      current = Stage::kInpainting;
      auto cleaned = r.times.time(Stage::kInpainting, [&] {
        std::vector<OCRToken> erase;
        for (std::size_t i = 0; i < units.size(); ++i) {
          if (text::trim(translated[i].target_text).empty()) continue;
          const auto& block = blocks.at(units[i].block_ref);
          for (auto l : units[i].line_refs) {
            const auto& line = block.lines.at(l);
            erase.insert(erase.end(), line.tokens.begin(), line.tokens.end());
          }
        }
        const Mask mask = build_mask(erase, image.width(), image.height(), config_.mask);
        if (!mask.any()) return image;
        return detail::gated(inpaint_gate_, *backends_.inpaint, [&] { return inpaint(image, mask, *backends_.inpaint); });
      });

      // Drawing
      current = Stage::kDrawing;
      r.output = r.times.time(Stage::kDrawing, [&] {
        std::vector<std::optional<Style>> styles(blocks.size());
        std::vector<RenderSpec> specs;
        for (std::size_t i = 0; i < units.size(); ++i) {
          if (text::trim(translated[i].target_text).empty()) continue;
          const auto b = units[i].block_ref;
          if (!styles[b]) styles[b] = estimate_style(image, blocks[b], config_.render);
          auto planned = plan_block(blocks[b], units[i], translated[i], *styles[b], *font_, config_.render);
          for (const auto& s : planned) {
            if (s.overflow) doc.warnings.push_back("unit " + std::to_string(units[i].id) + " overflows its line box");
          }
          specs.insert(specs.end(), planned.begin(), planned.end());
        }
        doc.render_specs = specs;
        return draw(cleaned, specs, *font_, config_.render, &doc.warnings);
      });
    } catch (const std::exception& e) {
      doc.failure = StageFailure{stage_key(current), e.what()};
      r.output.reset();
    }
    doc.set_timings(r.times);
    return r;
  }

  /// Decodes `input`, runs the pipeline and writes <stem>.translated.png and
  /// <stem>.sidecar.json into `out_dir`. The sidecar is written even when a
  /// stage fails.
  BatchItem process_file(const std::filesystem::path& input, const std::filesystem::path& out_dir) {
    BatchItem item;
    item.input = input;
    const auto stem = input.stem().string();
    item.output_image = out_dir / (stem + ".translated.png");
    item.sidecar_path = out_dir / (stem + ".sidecar.json");
    std::optional<RasterImage> image;
    try {
      image = load_image(input);
    } catch (const std::exception& e) {
      item.sidecar.image_id = input.filename().string();
      item.sidecar.src = config_.pair.src;
      item.sidecar.tgt = config_.pair.tgt;
      item.sidecar.level = config_.level;
      item.sidecar.failure = StageFailure{"input", e.what()};
    }
    if (image) {
      auto run_result = run(*image, input.filename().string());
      item.sidecar = std::move(run_result.sidecar);
      item.times = run_result.times;
      if (run_result.output) save_image(*run_result.output, item.output_image);
    }
    save_sidecar(item.sidecar, item.sidecar_path);
    return item;
  }

  /// Processes images with up to `jobs` workers; results keep input order.
  std::vector<BatchItem> run_batch(const std::vector<std::filesystem::path>& inputs,
                                   const std::filesystem::path& out_dir, std::size_t jobs) {
    std::vector<BatchItem> items(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < inputs.size(); i = next++) items[i] = process_file(inputs[i], out_dir);
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(jobs, inputs.size()));
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    return items;
  }

  /// Adapter for deck localization.
  deck::ImageTranslator image_translator() {
    return [this](const RasterImage& image, const std::string& id) {
      auto r = run(image, id);
      if (!r.ok()) throw Error(ErrorKind::kInvalidArgument, r.sidecar.failure->stage + ": " + r.sidecar.failure->message);
      std::size_t translated = 0;
      for (const auto& t : r.sidecar.translations) translated += text::trim(t.target_text).empty() ? 0 : 1;
      return deck::ImageOutcome{std::move(*r.output), translated, r.times, r.sidecar.warnings};
    };
  }

  MtBackend& text_backend() { return backends_.text_mt ? *backends_.text_mt : *backends_.mt; }

 private:
  static std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  PipelineConfig config_;
  Backends backends_;
  std::shared_ptr<const TrueTypeFont> font_;
  std::mutex ocr_gate_, layout_gate_, mt_gate_, inpaint_gate_;
};

/// Image files (png, jpg, jpeg) directly inside `dir`, sorted by name.
inline std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && format_from_extension(e.path()) != ImageFormat::kUnknown) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace imgtrans
