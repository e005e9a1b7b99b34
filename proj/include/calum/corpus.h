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

// Two-sentence classification corpora: the task registry, dataset loading
// (GLUE-style TSV and JSONL) and reproducible split sampling.

#ifndef CALUM_CORPUS_H_
#define CALUM_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace calum {

enum class TaskType { kNli, kSts };
enum class Split { kTrain, kValidation, kTest };

std::string_view TaskTypeName(TaskType type);
TaskType ParseTaskType(std::string_view name);
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

// A registered task. Construct through MakeTaskSpec, which normalizes the
// label set and enforces the invariants below:
//   - labels unique, non-empty, lowercase;
//   - STS has exactly 2 labels, NLI has 2 or 3;
//   - indicator_a != indicator_b, both non-empty.
struct TaskSpec {
  std::string task_id;
  std::string display_name;
  TaskType task_type = TaskType::kNli;
  std::string indicator_a;
  std::string indicator_b;
  std::vector<std::string> labels;
  std::string field_a;
  std::string field_b;
  std::string field_label;
  std::optional<std::string> seq2seq_prefix;

  bool HasLabel(std::string_view label) const;
  // Index of `label` in labels, or -1.
  int LabelIndex(std::string_view label) const;
};

TaskSpec MakeTaskSpec(TaskSpec spec);

struct Example {
  std::string id;
  std::string sentence_a;
  std::string sentence_b;
  std::optional<std::string> gold;

  bool operator==(const Example&) const = default;
};

// An immutable, validated list of examples in file order. The constructor
// rejects empty sentences, sentences containing tabs or line breaks,
// duplicate ids and gold labels outside the task's label set.
class Dataset {
 public:
  Dataset(TaskSpec task, Split split, std::vector<Example> examples);

  const TaskSpec& task() const { return task_; }
  Split split() const { return split_; }
  const std::vector<Example>& examples() const { return examples_; }
  size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const Example& operator[](size_t i) const { return examples_[i]; }

 private:
  TaskSpec task_;
  Split split_;
  std::vector<Example> examples_;
};

class TaskRegistry {
 public:
  // mnli, qnli, rte, qqp, mrpc in that order.
  static TaskRegistry Builtin();

  // Builtin registry, then the JSON override named by $CALUM_CONFIG if set.
  static TaskRegistry FromEnvironment();

  // Merges a JSON override document of the form
  //   {"task_id": {"indicator_a": .., "indicator_b": .., "labels": [..],
  //                "task_type": "NLI"|"STS",
  //                "fields": {"a": .., "b": .., "label": ..},
  //                "seq2seq_prefix": .., "display_name": ..}}
  // Keys omitted for an already registered task keep their current value.
  void ApplyOverrides(std::string_view json_text);

  void Register(TaskSpec spec);

  const TaskSpec& Get(std::string_view task_id) const;
  bool Contains(std::string_view task_id) const;
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  std::vector<std::string> TaskIds() const;
  std::vector<std::string> StsTaskIds() const;

 private:
  std::vector<TaskSpec> tasks_;
};

// GLUE-style TSV: header row, raw tab split, no quoting. The id column is
// "id" or "index" when present, otherwise "<split>-<row>" (0-based).
Dataset ParseTsv(std::string_view contents, const TaskSpec& task, Split split);
Dataset LoadTsv(const std::string& path, const TaskSpec& task, Split split);

// One JSON object per line; blank lines are skipped. Ids come from an "id"
// or "idx" key (string or integer) when present.
Dataset ParseJsonl(std::string_view contents, const TaskSpec& task,
                   Split split);
Dataset LoadJsonl(const std::string& path, const TaskSpec& task, Split split);

// Dispatches on extension: ".jsonl"/".json" to LoadJsonl, anything else TSV.
Dataset LoadDataset(const std::string& path, const TaskSpec& task,
                    Split split);

// Selects n examples without replacement (partial Fisher-Yates over indices
// with Rng(seed)) and returns them in their original relative order.
Dataset SampleSplit(const Dataset& dataset, size_t n, uint64_t seed);

}  // namespace calum

#endif  // CALUM_CORPUS_H_
