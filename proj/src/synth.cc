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

#include "calum/synth.h"

#include <array>
#include <cstdio>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "calum/error.h"

namespace calum::synth {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

constexpr size_t kFillerWords = 400;
constexpr size_t kContentClasses = 3;
constexpr size_t kContentWordsPerClass = 40;

void AppendUtf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string LatinWord(Rng& rng) {
  const int syllables = 2 + static_cast<int>(rng.Below(2));
  std::string w;
  for (int s = 0; s < syllables; ++s) {
    w.push_back(kConsonants[rng.Below(kConsonants.size())]);
    w.push_back(kVowels[rng.Below(kVowels.size())]);
  }
  return w;
}

// Distinct Latin pseudo-words.
std::vector<std::string> WordPool(Rng& rng, size_t n) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w = LatinWord(rng);
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.Below(items.size())];
}

std::string Join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string MakeId(std::string_view prefix, size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "-%05zu", i);
  return std::string(prefix) + buf;
}

std::string FixtureToken(Rng& rng, const std::vector<std::string>& latin) {
  static const std::array<std::string_view, 10> kOdd = {
      "Premise:", "[Hypothesis]", "a:b", "[x]", "\"quoted\"",
      "\xF0\x9F\x99\x82", "caf\xC3\xA9", "(paren)", "--", "Q1:"};
  static const std::array<std::string_view, 5> kPunct = {",", ".", "?", "!",
                                                         ";"};
  const uint64_t kind = rng.Below(100);
  if (kind < 45) return Pick(rng, latin);
  if (kind < 75) return HangulWord(rng, 1 + static_cast<int>(rng.Below(3)));
  if (kind < 82) return std::to_string(rng.Below(10000));
  if (kind < 94) {
    return Pick(rng, latin) + std::string(kPunct[rng.Below(kPunct.size())]);
  }
  return std::string(kOdd[rng.Below(kOdd.size())]);
}

std::string FixtureSentence(Rng& rng, const std::vector<std::string>& latin) {
  const uint64_t style = rng.Below(10);
  const size_t len = 1 + rng.Below(14);
  std::vector<std::string> tokens;
  for (size_t i = 0; i < len; ++i) {
    // Style 0: all Hangul, including Hangul punctuation placement.
    tokens.push_back(style == 0 ? HangulWord(rng, 1 + rng.Below(4))
                                : FixtureToken(rng, latin));
  }
  if (style == 0 && rng.Below(2) == 0) tokens.back() += ".";
  return Join(tokens);
}

// Shared vocabulary of the benchmark.
struct Vocabulary {
  std::vector<std::string> filler;
  std::vector<std::vector<std::string>> content;  // per class
  std::vector<std::string> markers;               // one per main label
};

Vocabulary MakeVocabulary(Rng& rng, size_t marker_count) {
  const size_t total = kFillerWords +
                       kContentClasses * kContentWordsPerClass + marker_count;
  std::vector<std::string> pool = WordPool(rng, total);
  Vocabulary v;
  size_t k = 0;
  for (size_t i = 0; i < kFillerWords; ++i) v.filler.push_back(pool[k++]);
  v.content.resize(kContentClasses);
  for (auto& cls : v.content) {
    for (size_t i = 0; i < kContentWordsPerClass; ++i) {
      cls.push_back(pool[k++]);
    }
  }
  for (size_t i = 0; i < marker_count; ++i) v.markers.push_back(pool[k++]);
  return v;
}

std::vector<std::string> Fillers(Rng& rng, const Vocabulary& v, size_t lo,
                                 size_t hi) {
  const size_t n = lo + rng.Below(hi - lo + 1);
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(Pick(rng, v.filler));
  return out;
}

void InsertAt(Rng& rng, std::vector<std::string>& tokens, std::string word,
              bool keep_last) {
  const size_t limit = tokens.size() - (keep_last && !tokens.empty() ? 1 : 0);
  const size_t pos = rng.Below(limit + 1);
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                std::move(word));
}

size_t OtherClass(Rng& rng, size_t c, size_t classes) {
  return (c + 1 + rng.Below(classes - 1)) % classes;
}

// Label rule: the class of the content word, blurred by an optional
// distractor; the first segment's closing marker names the label with
// probability positional_cue_rate.
Example MainExample(Rng& rng, const Vocabulary& v, const TaskSpec& task,
                    const BenchmarkConfig& cfg, std::string id) {
  const size_t labels = task.labels.size();
  const size_t y = rng.Below(labels);
  std::array<std::vector<std::string>, 2> seg = {Fillers(rng, v, 4, 8),
                                                 Fillers(rng, v, 4, 8)};
  InsertAt(rng, seg[rng.Below(2)], Pick(rng, v.content[y]), false);
  if (rng.Uniform() < cfg.distractor_rate) {
    InsertAt(rng, seg[rng.Below(2)],
             Pick(rng, v.content[OtherClass(rng, y, labels)]), false);
  }
  const size_t first_marker =
      rng.Uniform() < cfg.positional_cue_rate ? y : rng.Below(labels);
  std::vector<std::string> rest;
  for (size_t k = 0; k < labels; ++k) {
    if (k != first_marker) rest.push_back(v.markers[k]);
  }
  rng.Shuffle(std::span<std::string>(rest));
  seg[0].push_back(v.markers[first_marker]);
  seg[1].push_back(rest.back());
  rest.pop_back();
  for (auto& m : rest) InsertAt(rng, seg[1], std::move(m), true);
  return Example{std::move(id), Join(seg[0]), Join(seg[1]),
                 task.labels[y]};
}

// Label rule: "equivalent" iff both segments carry content words of the
// same class.
Example ParaphraseExample(Rng& rng, const Vocabulary& v, const TaskSpec& task,
                          std::string id) {
  const size_t c = rng.Below(kContentClasses);
  const bool same = rng.Below(2) == 0;
  const size_t d = same ? c : OtherClass(rng, c, kContentClasses);
  std::array<std::vector<std::string>, 2> seg = {Fillers(rng, v, 4, 8),
                                                 Fillers(rng, v, 4, 8)};
  InsertAt(rng, seg[0], Pick(rng, v.content[c]), false);
  InsertAt(rng, seg[1], Pick(rng, v.content[d]), false);
  return Example{std::move(id), Join(seg[0]), Join(seg[1]),
                 task.labels[same ? 0 : 1]};
}

// Label rule: the first label iff the pair's content word is not of the
// last class.
Example BinaryExample(Rng& rng, const Vocabulary& v, const TaskSpec& task,
                      std::string id) {
  const size_t c = rng.Below(kContentClasses);
  std::array<std::vector<std::string>, 2> seg = {Fillers(rng, v, 4, 8),
                                                 Fillers(rng, v, 4, 8)};
  InsertAt(rng, seg[rng.Below(2)], Pick(rng, v.content[c]), false);
  const size_t label = c + 1 == kContentClasses ? 1 : 0;
  return Example{std::move(id), Join(seg[0]), Join(seg[1]),
                 task.labels[label]};
}

}  // namespace

std::string HangulWord(Rng& rng, int syllables) {
  std::string out;
  for (int i = 0; i < syllables; ++i) {
    AppendUtf8(out, static_cast<char32_t>(0xAC00 + rng.Below(11172)));
  }
  return out;
}

Dataset MakeFixture(const TaskSpec& task, Split split, size_t n,
                    uint64_t seed) {
  Rng rng(DeriveSeed(seed, "fixture:" + task.task_id));
  const std::vector<std::string> latin = WordPool(rng, 300);
  std::vector<Example> examples;
  examples.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Example ex;
    ex.id = MakeId(task.task_id, i);
    ex.sentence_a = FixtureSentence(rng, latin);
    ex.sentence_b = FixtureSentence(rng, latin);
    ex.gold = task.labels[rng.Below(task.labels.size())];
    examples.push_back(std::move(ex));
  }
  return Dataset(task, split, std::move(examples));
}

Benchmark MakeBenchmark(const TaskRegistry& registry,
                        const BenchmarkConfig& config) {
  if (!(config.positional_cue_rate >= 0.0 && config.positional_cue_rate <= 1.0) ||
      !(config.distractor_rate >= 0.0 && config.distractor_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "benchmark rates must be in [0, 1]");
  }
  Benchmark bench;
  bench.main_task = "mnli";
  const TaskSpec& main = registry.Get(bench.main_task);
  if (main.labels.size() > kContentClasses) {
    throw Error(ErrorCode::kInvalidArgument,
                "main task has more labels than content classes");
  }
  Rng vocab_rng(DeriveSeed(config.seed, "vocabulary"));
  const Vocabulary vocab = MakeVocabulary(vocab_rng, main.labels.size());

  auto main_split = [&](Split split, size_t n) {
    Rng rng(DeriveSeed(config.seed, "main:" + std::string(SplitName(split))));
    std::vector<Example> examples;
    for (size_t i = 0; i < n; ++i) {
      examples.push_back(MainExample(
          rng, vocab, main, config,
          MakeId(std::string(SplitName(split)), i)));
    }
    return Dataset(main, split, std::move(examples));
  };
  bench.train.emplace(main.task_id, main_split(Split::kTrain, config.main_train));
  bench.validation.emplace(main.task_id,
                           main_split(Split::kValidation, config.main_validation));
  bench.test.emplace(main.task_id, main_split(Split::kTest, config.main_test));

  for (const TaskSpec& spec : registry.tasks()) {
    if (spec.task_id == main.task_id) continue;
    Rng rng(DeriveSeed(config.seed, "aux:" + spec.task_id));
    std::vector<Example> examples;
    for (size_t i = 0; i < config.aux_train; ++i) {
      std::string id = MakeId("train", i);
      if (spec.task_type == TaskType::kSts) {
        examples.push_back(ParaphraseExample(rng, vocab, spec, std::move(id)));
      } else {
        examples.push_back(BinaryExample(rng, vocab, spec, std::move(id)));
      }
    }
    bench.train.emplace(spec.task_id,
                        Dataset(spec, Split::kTrain, std::move(examples)));
  }
  return bench;
}

}  // namespace calum::synth
