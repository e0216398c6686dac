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


// Draws an "Exit" sign, describes it with an in-memory annotation, and runs
// the pipeline with a dictionary backend. Writes exit_sign.png,
// exit_sign.translated.png and exit_sign.sidecar.json to the given directory.

#include <iostream>

#include "imgtrans/imgtrans.hpp"

using namespace imgtrans;

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "sample_out";
  const auto font = std::make_shared<const TrueTypeFont>(TrueTypeFont::load(default_font_path()));

  RasterImage sign(200, 60, Color{20, 110, 40});
  font->draw_text(sign, "Exit", 32, 60, 42, Color{255, 255, 255}, BBox{0, 0, 200, 60});
  save_image(sign, out / "exit_sign.png");

  AnnotationSet annotations;
  annotations["exit_sign.png"].push_back({make_token("Exit", BBox{58, 16, 126, 44}), 0, 0});

  PipelineConfig config;
  config.pair = LangPair::make("en", "de");
  Backends backends;
  backends.ocr = std::make_unique<AnnotationBackend>(annotations);
  backends.layout = std::make_unique<GeometricLayout>();
  backends.mt = std::make_unique<DictionaryBackend>(std::map<std::string, std::string>{{"exit", "Ausgang"}},
                                                    Modality::kTextImage);
  backends.inpaint = std::make_unique<NaiveInpaint>();
  Pipeline pipeline(config, std::move(backends), font);

  const auto item = pipeline.process_file(out / "exit_sign.png", out);
  if (!item.ok()) {
    std::cerr << item.sidecar.failure->stage << ": " << item.sidecar.failure->message << "\n";
    return 1;
  }
  for (const auto& t : item.sidecar.translations) std::cout << t.target_text << "\n";
  return 0;
}
