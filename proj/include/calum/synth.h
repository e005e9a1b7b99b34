// Copyright 2026 The Calum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded generators for test fixtures and the desk-scale multitask
// benchmark. Output depends only on the arguments.

#ifndef CALUM_SYNTH_H_
#define CALUM_SYNTH_H_

#include <cstdint>
#include <map>
#include <string>

#include "calum/corpus.h"
#include "calum/rng.h"

namespace calum::synth {

// Word of `syllables` precomposed Hangul syllables (U+AC00..U+D7A3).
std::string HangulWord(Rng& rng, int syllables);

// `n` labeled examples mixing Latin pseudo-words, Hangul, digits,
// punctuation, and sentences that look like indicator decorations.
Dataset MakeFixture(const TaskSpec& task, Split split, size_t n,
                    uint64_t seed);

struct BenchmarkConfig {
  uint64_t seed = 2026;
  size_t main_train = 2000;
  size_t main_validation = 500;
  size_t main_test = 1000;
  size_t aux_train = 2000;
  // Probability that the first segment of a main-task example ends in the
  // marker word tied to its label. Every example contains all marker words
  // once, so only the marker closing the first segment carries the label.
  double positional_cue_rate = 0.75;
  // Probability that the label's content word is joined by a content word
  // of a different class.
  double distractor_rate = 0.2;
};

struct Benchmark {
  std::string main_task;
  std::map<std::string, Dataset> train;
  std::map<std::string, Dataset> validation;
  std::map<std::string, Dataset> test;
};

// Synthetic data for every builtin task. The main task is "mnli" (three
// classes); "qqp" and "mrpc" are paraphrase tasks over the same content
// vocabulary; "qnli" and "rte" are two-class tasks over it as well. Only
// the main task has validation and test splits.
Benchmark MakeBenchmark(const TaskRegistry& registry,
                        const BenchmarkConfig& config = {});

}  // namespace calum::synth

#endif  // CALUM_SYNTH_H_
