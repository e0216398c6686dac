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


// Scores a hypothesis against a reference with the edit-rate and corpus
// metrics.

#include <cstdio>

#include "imgtrans/metrics.hpp"

using namespace imgtrans::metrics;

int main(int argc, char** argv) {
  const char* hyp = argc > 2 ? argv[1] : "the cat is on the mat";
  const char* ref = argc > 2 ? argv[2] : "the cat sat on the mat";

  const auto cer = char_error_rate(hyp, ref);
  const auto wer = word_edit_rate(hyp, ref);
  CorpusPair corpus;
  corpus.add(hyp, ref);

  std::printf("CER  %.4f (sub %zu, del %zu, ins %zu)\n", cer.rate, cer.counts.sub, cer.counts.del, cer.counts.ins);
  std::printf("TER  %.4f (sub %zu, del %zu, ins %zu)\n", wer.rate, wer.counts.sub, wer.counts.del, wer.counts.ins);
  std::printf("BLEU %.4f\n", bleu(corpus));
  std::printf("ChrF %.4f\n", chrf(corpus));
  return 0;
}
