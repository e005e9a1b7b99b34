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

#include "calum/perturb.h"

#include <array>
#include <optional>

#include "calum/error.h"
#include "calum/text.h"

namespace calum {
namespace {

IndicatorStyle StyleOf(Perturbation p) {
  return p == Perturbation::kSignal ? IndicatorStyle::kBracket
                                    : IndicatorStyle::kColon;
}

struct Decoration {
  std::string text;  // e.g. "Premise: "
  std::string label;
  IndicatorStyle style;
};

// Every decoration a segment of `task` may start with.
std::vector<Decoration> Decorations(const TaskSpec& task) {
  std::vector<Decoration> out;
  for (const std::string* raw : {&task.indicator_a, &task.indicator_b}) {
    const std::array<std::string, 2> spellings = {*raw, AsciiLower(*raw)};
    for (size_t k = 0; k < spellings.size(); ++k) {
      if (k == 1 && spellings[1] == spellings[0]) break;
      for (auto style : {IndicatorStyle::kColon, IndicatorStyle::kBracket}) {
        out.push_back({RenderIndicator(spellings[k], style), spellings[k],
                       style});
      }
    }
  }
  return out;
}

std::optional<Decoration> MatchDecoration(std::string_view segment,
                                          const TaskSpec& task) {
  std::optional<Decoration> best;
  for (auto& d : Decorations(task)) {
    // Prefer the longest match in case one indicator prefixes another.
    if (StartsWith(segment, d.text) &&
        (!best || d.text.size() > best->text.size())) {
      best = std::move(d);
    }
  }
  return best;
}

const std::string& Seq2SeqPrefix(const TaskSpec& task) {
  if (!task.seq2seq_prefix) {
    throw Error(ErrorCode::kNoSeq2SeqPrefix,
                "task '" + task.task_id + "' has no seq2seq prefix");
  }
  return *task.seq2seq_prefix;
}

}  // namespace

std::string_view PerturbationName(Perturbation p) {
  switch (p) {
    case Perturbation::kOriginal: return "original";
    case Perturbation::kReverse: return "reverse";
    case Perturbation::kSignal: return "signal";
  }
  return "";
}

Perturbation ParsePerturbation(std::string_view name) {
  const std::string lower = NormalizeLabel(name);
  if (lower == "original") return Perturbation::kOriginal;
  if (lower == "reverse") return Perturbation::kReverse;
  if (lower == "signal") return Perturbation::kSignal;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown perturbation '" + std::string(name) + "'");
}

std::string RenderIndicator(std::string_view label, IndicatorStyle style) {
  std::string out;
  out.reserve(label.size() + 3);
  if (style == IndicatorStyle::kColon) {
    out.append(label);
    out += ": ";
  } else {
    out += '[';
    out.append(label);
    out += "] ";
  }
  return out;
}

RenderedInput Render(const Example& example, const TaskSpec& task,
                     Perturbation perturbation) {
  const IndicatorStyle style = StyleOf(perturbation);
  std::string first = RenderIndicator(task.indicator_a, style) +
                      example.sentence_a;
  std::string second = RenderIndicator(task.indicator_b, style) +
                       example.sentence_b;
  if (perturbation == Perturbation::kReverse) std::swap(first, second);
  RenderedInput out;
  out.example_id = example.id;
  out.perturbation = perturbation;
  out.joined = first + " " + second;
  out.segment_a = std::move(first);
  out.segment_b = std::move(second);
  return out;
}

RenderedInput SwapSegments(const RenderedInput& input) {
  RenderedInput out = input;
  std::swap(out.segment_a, out.segment_b);
  out.joined = out.segment_a + " " + out.segment_b;
  return out;
}

std::string RenderSeq2Seq(const Example& example, const TaskSpec& task,
                          Perturbation perturbation) {
  Seq2SeqPrefix(task);
  return ToSeq2Seq(Render(example, task, perturbation), task);
}

std::string ToSeq2Seq(const RenderedInput& input, const TaskSpec& task) {
  const std::string& prefix = Seq2SeqPrefix(task);
  std::string out = prefix;
  for (const std::string* segment : {&input.segment_a, &input.segment_b}) {
    const auto decoration = MatchDecoration(*segment, task);
    if (!decoration) {
      throw Error(ErrorCode::kUnrecognizedDecoration,
                  "segment '" + *segment + "'");
    }
    out += ' ';
    out += RenderIndicator(AsciiLower(decoration->label), decoration->style);
    out += std::string_view(*segment).substr(decoration->text.size());
  }
  return out;
}

std::string StripIndicator(std::string_view segment, const TaskSpec& task) {
  const auto decoration = MatchDecoration(segment, task);
  if (!decoration) {
    throw Error(ErrorCode::kUnrecognizedDecoration,
                "segment '" + std::string(segment) + "'");
  }
  return std::string(segment.substr(decoration->text.size()));
}

std::pair<std::string, std::string> StripIndicators(const RenderedInput& input,
                                                    const TaskSpec& task) {
  return {StripIndicator(input.segment_a, task),
          StripIndicator(input.segment_b, task)};
}

std::pair<std::string, std::string> StripSeq2Seq(std::string_view text,
                                                 const TaskSpec& task) {
  const std::string head = Seq2SeqPrefix(task) + " ";
  if (!StartsWith(text, head)) {
    throw Error(ErrorCode::kUnrecognizedDecoration,
                "missing task prefix in '" + std::string(text) + "'");
  }
  std::string_view rest = text.substr(head.size());
  const std::string lower_a = AsciiLower(task.indicator_a);
  const std::string lower_b = AsciiLower(task.indicator_b);
  for (auto style : {IndicatorStyle::kColon, IndicatorStyle::kBracket}) {
    for (const auto& [first, second] :
         {std::pair{lower_a, lower_b}, std::pair{lower_b, lower_a}}) {
      const std::string open = RenderIndicator(first, style);
      const std::string sep = " " + RenderIndicator(second, style);
      if (!StartsWith(rest, open)) continue;
      const size_t at = rest.find(sep, open.size());
      if (at == std::string_view::npos) continue;
      return {std::string(rest.substr(open.size(), at - open.size())),
              std::string(rest.substr(at + sep.size()))};
    }
  }
  throw Error(ErrorCode::kUnrecognizedDecoration,
              "cannot split '" + std::string(text) + "'");
}

}  // namespace calum
