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


// Hand-rolled generators shared by the unit and acceptance tests.

#ifndef CALUM_TESTS_COMMON_GENERATORS_H_
#define CALUM_TESTS_COMMON_GENERATORS_H_

#include <string>

#include "calum/corpus.h"
#include "calum/rng.h"
#include "calum/synth.h"

namespace calum::testing {

// Random sentence of 1..max_words tokens mixing ASCII words, Hangul words,
// digits and punctuation. Never empty, never contains tab or newline.
inline std::string RandomSentence(Rng& rng, int max_words = 12) {
  static const char* const kAscii[] = {"it", "rains", "the", "wet", "Premise:",
                                       "[Hypothesis]", "a:b", "--", "café",
                                       "Q1:", "(x)", "\"q\""};
  const int words = 1 + static_cast<int>(rng.Below(max_words));
  std::string out;
  for (int w = 0; w < words; ++w) {
    if (w > 0) out += ' ';
    switch (rng.Below(3)) {
      case 0: out += kAscii[rng.Below(std::size(kAscii))]; break;
      case 1: out += synth::HangulWord(rng, 1 + static_cast<int>(rng.Below(4)));
        break;
      default: out += std::to_string(rng.Below(10000)); break;
    }
  }
  return out;
}

inline Example RandomExample(Rng& rng, const TaskSpec& task, size_t index) {
  Example ex;
  ex.id = "ex-" + std::to_string(index);
  ex.sentence_a = RandomSentence(rng);
  ex.sentence_b = RandomSentence(rng);
  ex.gold = task.labels[rng.Below(task.labels.size())];
  return ex;
}

}  // namespace calum::testing

#endif  // CALUM_TESTS_COMMON_GENERATORS_H_
