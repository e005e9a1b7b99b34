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

// Indicator-tagged rendering of sentence pairs and the two
// meaning-preserving perturbations:
//
//   ORIGINAL  "Premise: s1"  "Hypothesis: s2"
//   REVERSE   "Hypothesis: s2"  "Premise: s1"
//   SIGNAL    "[Premise] s1"  "[Hypothesis] s2"
//
// Sentence text is never modified; only the indicator decoration and the
// segment order change.

#ifndef CALUM_PERTURB_H_
#define CALUM_PERTURB_H_

#include <string>
#include <string_view>
#include <utility>

#include "calum/corpus.h"

namespace calum {

enum class IndicatorStyle { kColon, kBracket };
enum class Perturbation { kOriginal, kReverse, kSignal };

inline constexpr Perturbation kAllPerturbations[] = {
    Perturbation::kOriginal, Perturbation::kReverse, Perturbation::kSignal};

std::string_view PerturbationName(Perturbation p);  // "original", ...
Perturbation ParsePerturbation(std::string_view name);

// "L: " for kColon, "[L] " for kBracket.
std::string RenderIndicator(std::string_view label, IndicatorStyle style);

struct RenderedInput {
  std::string example_id;
  Perturbation perturbation = Perturbation::kOriginal;
  std::string segment_a;
  std::string segment_b;
  std::string joined;  // segment_a + " " + segment_b

  bool operator==(const RenderedInput&) const = default;
};

RenderedInput Render(const Example& example, const TaskSpec& task,
                     Perturbation perturbation);

// Exchanges the two segments (and rebuilds `joined`). Applying it to a
// REVERSE rendering yields the ORIGINAL segments.
RenderedInput SwapSegments(const RenderedInput& input);

// Text-to-text form: "{prefix} {a}: {sa} {b}: {sb}" with lowercased
// indicators; SIGNAL uses "[a]" and REVERSE swaps the two blocks. The task
// prefix always stays in front. Throws Error(kNoSeq2SeqPrefix).
std::string RenderSeq2Seq(const Example& example, const TaskSpec& task,
                          Perturbation perturbation);

// Seq2seq text for an already rendered pair.
std::string ToSeq2Seq(const RenderedInput& input, const TaskSpec& task);

// Removes the indicator decoration from one segment. Both styles and both
// the registered and the lowercased indicator spellings are recognized.
// Throws Error(kUnrecognizedDecoration).
std::string StripIndicator(std::string_view segment, const TaskSpec& task);

// Sentences of a rendered pair, in rendered order.
std::pair<std::string, std::string> StripIndicators(const RenderedInput& input,
                                                    const TaskSpec& task);

// Sentences of a seq2seq rendering, in rendered order.
std::pair<std::string, std::string> StripSeq2Seq(std::string_view text,
                                                 const TaskSpec& task);

}  // namespace calum

#endif  // CALUM_PERTURB_H_
