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

#include "calum/corpus.h"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <unordered_set>

#include "calum/error.h"
#include "calum/rng.h"
#include "calum/text.h"
#include "json.hpp"

namespace calum {
namespace {

using json = nlohmann::json;

std::string LineRef(size_t line_no) {
  return "line " + std::to_string(line_no);
}

// Why a sentence is unusable, or empty when it is fine.
std::string SentenceProblem(std::string_view s) {
  if (Trim(s).empty()) return "empty sentence";
  if (s.find_first_of("\t\r\n") != std::string_view::npos) {
    return "sentence contains a tab or line break";
  }
  return {};
}

}  // namespace

std::string_view TaskTypeName(TaskType type) {
  return type == TaskType::kNli ? "NLI" : "STS";
}

TaskType ParseTaskType(std::string_view name) {
  const std::string lower = NormalizeLabel(name);
  if (lower == "nli") return TaskType::kNli;
  if (lower == "sts") return TaskType::kSts;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown task type '" + std::string(name) + "'");
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "";
}

Split ParseSplit(std::string_view name) {
  const std::string lower = NormalizeLabel(name);
  if (lower == "train") return Split::kTrain;
  if (lower == "validation" || lower == "val" || lower == "dev") {
    return Split::kValidation;
  }
  if (lower == "test") return Split::kTest;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown split '" + std::string(name) + "'");
}

bool TaskSpec::HasLabel(std::string_view label) const {
  return LabelIndex(label) >= 0;
}

int TaskSpec::LabelIndex(std::string_view label) const {
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

TaskSpec MakeTaskSpec(TaskSpec spec) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument,
                "task '" + spec.task_id + "': " + why);
  };
  if (Trim(spec.task_id).empty()) fail("empty task id");
  if (spec.display_name.empty()) spec.display_name = spec.task_id;
  if (spec.indicator_a.empty() || spec.indicator_b.empty()) {
    fail("empty indicator");
  }
  if (spec.indicator_a == spec.indicator_b) fail("indicators must differ");
  std::set<std::string> seen;
  for (auto& label : spec.labels) {
    label = NormalizeLabel(label);
    if (label.empty()) fail("empty label");
    if (!seen.insert(label).second) fail("duplicate label '" + label + "'");
  }
  const size_t n = spec.labels.size();
  if (spec.task_type == TaskType::kSts && n != 2) {
    fail("STS tasks take exactly 2 labels");
  }
  if (spec.task_type == TaskType::kNli && (n < 2 || n > 3)) {
    fail("NLI tasks take 2 or 3 labels");
  }
  if (spec.field_a.empty() || spec.field_b.empty() ||
      spec.field_label.empty()) {
    fail("empty field name");
  }
  if (spec.seq2seq_prefix) {
    *spec.seq2seq_prefix = AsciiLower(*spec.seq2seq_prefix);
    if (spec.seq2seq_prefix->empty()) spec.seq2seq_prefix.reset();
  }
  return spec;
}

Dataset::Dataset(TaskSpec task, Split split, std::vector<Example> examples)
    : task_(std::move(task)), split_(split), examples_(std::move(examples)) {
  std::unordered_set<std::string_view> ids;
  for (const Example& ex : examples_) {
    if (!ids.insert(ex.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate example id '" + ex.id +
                                               "' in task " + task_.task_id);
    }
    for (const std::string* s : {&ex.sentence_a, &ex.sentence_b}) {
      if (auto why = SentenceProblem(*s); !why.empty()) {
        throw Error(ErrorCode::kMalformedRow,
                    "example '" + ex.id + "': " + why);
      }
    }
    if (ex.gold && !task_.HasLabel(*ex.gold)) {
      throw Error(ErrorCode::kBadLabel, "example '" + ex.id + "': label '" +
                                            *ex.gold + "' not in task " +
                                            task_.task_id);
    }
  }
}

TaskRegistry TaskRegistry::Builtin() {
  TaskRegistry registry;
  auto add = [&](std::string id, std::string display, TaskType type,
                 std::string ind_a, std::string ind_b,
                 std::vector<std::string> labels, std::string field_a,
                 std::string field_b) {
    TaskSpec spec;
    spec.seq2seq_prefix = id;
    spec.task_id = std::move(id);
    spec.display_name = std::move(display);
    spec.task_type = type;
    spec.indicator_a = std::move(ind_a);
    spec.indicator_b = std::move(ind_b);
    spec.labels = std::move(labels);
    spec.field_a = std::move(field_a);
    spec.field_b = std::move(field_b);
    spec.field_label = "label";
    registry.Register(std::move(spec));
  };
  add("mnli", "MNLI", TaskType::kNli, "Premise", "Hypothesis",
      {"entailment", "neutral", "contradiction"}, "sentence1", "sentence2");
  add("qnli", "QNLI", TaskType::kNli, "Question", "Sentence",
      {"entailment", "not_entailment"}, "question", "sentence");
  add("rte", "RTE", TaskType::kNli, "Sentence1", "Sentence2",
      {"entailment", "not_entailment"}, "sentence1", "sentence2");
  add("qqp", "QQP", TaskType::kSts, "Question1", "Question2",
      {"equivalent", "not_equivalent"}, "question1", "question2");
  add("mrpc", "MRPC", TaskType::kSts, "Sentence1", "Sentence2",
      {"equivalent", "not_equivalent"}, "sentence1", "sentence2");
  return registry;
}

TaskRegistry TaskRegistry::FromEnvironment() {
  TaskRegistry registry = Builtin();
  if (const char* path = std::getenv("CALUM_CONFIG"); path && *path) {
    registry.ApplyOverrides(ReadFile(path));
  }
  return registry;
}

void TaskRegistry::ApplyOverrides(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("task config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "task config must be an object");
  }
  for (const auto& [task_id, entry] : doc.items()) {
    if (!entry.is_object()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "task config entry '" + task_id + "' must be an object");
    }
    TaskSpec spec;
    const bool existing = Contains(task_id);
    if (existing) spec = Get(task_id);
    spec.task_id = task_id;
    try {
      if (entry.contains("display_name")) {
        spec.display_name = entry.at("display_name").get<std::string>();
      }
      if (entry.contains("indicator_a")) {
        spec.indicator_a = entry.at("indicator_a").get<std::string>();
      }
      if (entry.contains("indicator_b")) {
        spec.indicator_b = entry.at("indicator_b").get<std::string>();
      }
      if (entry.contains("labels")) {
        spec.labels = entry.at("labels").get<std::vector<std::string>>();
      }
      if (entry.contains("task_type")) {
        spec.task_type =
            ParseTaskType(entry.at("task_type").get<std::string>());
      }
      if (entry.contains("fields")) {
        const json& fields = entry.at("fields");
        if (fields.contains("a")) spec.field_a = fields.at("a");
        if (fields.contains("b")) spec.field_b = fields.at("b");
        if (fields.contains("label")) spec.field_label = fields.at("label");
      }
      if (entry.contains("seq2seq_prefix")) {
        const json& prefix = entry.at("seq2seq_prefix");
        if (prefix.is_null()) {
          spec.seq2seq_prefix.reset();
        } else {
          spec.seq2seq_prefix = prefix.get<std::string>();
        }
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "task config entry '" + task_id + "': " + e.what());
    }
    if (!existing && spec.field_label.empty()) spec.field_label = "label";
    Register(std::move(spec));
  }
}

void TaskRegistry::Register(TaskSpec spec) {
  spec = MakeTaskSpec(std::move(spec));
  for (auto& existing : tasks_) {
    if (existing.task_id == spec.task_id) {
      existing = std::move(spec);
      return;
    }
  }
  tasks_.push_back(std::move(spec));
}

const TaskSpec& TaskRegistry::Get(std::string_view task_id) const {
  for (const auto& spec : tasks_) {
    if (spec.task_id == task_id) return spec;
  }
  throw Error(ErrorCode::kUnknownTask,
              "no task '" + std::string(task_id) + "' registered");
}

bool TaskRegistry::Contains(std::string_view task_id) const {
  return std::any_of(tasks_.begin(), tasks_.end(), [&](const TaskSpec& s) {
    return s.task_id == task_id;
  });
}

std::vector<std::string> TaskRegistry::TaskIds() const {
  std::vector<std::string> ids;
  for (const auto& spec : tasks_) ids.push_back(spec.task_id);
  return ids;
}

std::vector<std::string> TaskRegistry::StsTaskIds() const {
  std::vector<std::string> ids;
  for (const auto& spec : tasks_) {
    if (spec.task_type == TaskType::kSts) ids.push_back(spec.task_id);
  }
  return ids;
}

Dataset ParseTsv(std::string_view contents, const TaskSpec& task,
                 Split split) {
  const std::vector<std::string> lines = SplitLines(contents);
  if (lines.empty()) {
    throw Error(ErrorCode::kMissingColumn,
                task.field_a + " (no header row)");
  }
  if (!IsValidUtf8(lines[0])) {
    throw Error(ErrorCode::kEncoding, "invalid UTF-8 on " + LineRef(1));
  }
  const std::vector<std::string_view> header = SplitOn(lines[0], '\t');
  auto column = [&](std::string_view name) -> int {
    for (size_t i = 0; i < header.size(); ++i) {
      if (Trim(header[i]) == name) return static_cast<int>(i);
    }
    return -1;
  };
  auto require = [&](const std::string& name) {
    const int idx = column(name);
    if (idx < 0) throw Error(ErrorCode::kMissingColumn, name);
    return idx;
  };
  const int col_a = require(task.field_a);
  const int col_b = require(task.field_b);
  const bool needs_gold = split != Split::kTest;
  const int col_label =
      needs_gold ? require(task.field_label) : column(task.field_label);
  int col_id = column("id");
  if (col_id < 0) col_id = column("index");

  std::vector<Example> examples;
  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    const std::string& line = lines[i];
    if (!IsValidUtf8(line)) {
      throw Error(ErrorCode::kEncoding, "invalid UTF-8 on " + LineRef(line_no));
    }
    const std::vector<std::string_view> cells = SplitOn(line, '\t');
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  LineRef(line_no) + ": expected " +
                      std::to_string(header.size()) + " columns, got " +
                      std::to_string(cells.size()));
    }
    Example ex;
    ex.id = col_id >= 0 ? std::string(Trim(cells[col_id]))
                        : std::string(SplitName(split)) + "-" +
                              std::to_string(examples.size());
    ex.sentence_a = std::string(cells[col_a]);
    ex.sentence_b = std::string(cells[col_b]);
    for (const std::string* s : {&ex.sentence_a, &ex.sentence_b}) {
      if (auto why = SentenceProblem(*s); !why.empty()) {
        throw Error(ErrorCode::kMalformedRow, LineRef(line_no) + ": " + why);
      }
    }
    if (col_label >= 0) {
      std::string label = NormalizeLabel(cells[col_label]);
      if (!label.empty()) {
        if (!task.HasLabel(label)) {
          throw Error(ErrorCode::kBadLabel, "row " + std::to_string(line_no) +
                                                ": '" +
                                                std::string(cells[col_label]) +
                                                "'");
        }
        ex.gold = std::move(label);
      }
    }
    if (needs_gold && !ex.gold) {
      throw Error(ErrorCode::kBadLabel,
                  "row " + std::to_string(line_no) + ": missing gold label");
    }
    examples.push_back(std::move(ex));
  }
  return Dataset(task, split, std::move(examples));
}

Dataset LoadTsv(const std::string& path, const TaskSpec& task, Split split) {
  return ParseTsv(ReadFile(path), task, split);
}

Dataset ParseJsonl(std::string_view contents, const TaskSpec& task,
                   Split split) {
  const std::vector<std::string> lines = SplitLines(contents);
  const bool needs_gold = split != Split::kTest;
  std::vector<Example> examples;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    if (!IsValidUtf8(lines[i])) {
      throw Error(ErrorCode::kEncoding, "invalid UTF-8 on " + LineRef(line_no));
    }
    json obj = json::parse(lines[i], nullptr, /*allow_exceptions=*/false);
    if (!obj.is_object()) {
      throw Error(ErrorCode::kMalformedRow,
                  LineRef(line_no) + ": not a JSON object");
    }
    auto text_field = [&](const std::string& key) -> std::string {
      if (!obj.contains(key)) throw Error(ErrorCode::kMissingColumn, key);
      const json& v = obj.at(key);
      if (!v.is_string()) {
        throw Error(ErrorCode::kMalformedRow,
                    LineRef(line_no) + ": '" + key + "' is not a string");
      }
      return v.get<std::string>();
    };
    Example ex;
    ex.sentence_a = text_field(task.field_a);
    ex.sentence_b = text_field(task.field_b);
    for (const std::string* s : {&ex.sentence_a, &ex.sentence_b}) {
      if (auto why = SentenceProblem(*s); !why.empty()) {
        throw Error(ErrorCode::kMalformedRow, LineRef(line_no) + ": " + why);
      }
    }
    const json* id = nullptr;
    if (obj.contains("id")) {
      id = &obj.at("id");
    } else if (obj.contains("idx")) {
      id = &obj.at("idx");
    }
    if (id && id->is_string()) {
      ex.id = id->get<std::string>();
    } else if (id && id->is_number_integer()) {
      ex.id = std::to_string(id->get<int64_t>());
    } else {
      ex.id = std::string(SplitName(split)) + "-" +
              std::to_string(examples.size());
    }
    if (obj.contains(task.field_label) && !obj.at(task.field_label).is_null()) {
      const json& v = obj.at(task.field_label);
      if (!v.is_string()) {
        throw Error(ErrorCode::kBadLabel, "row " + std::to_string(line_no) +
                                              ": " + v.dump());
      }
      std::string label = NormalizeLabel(v.get<std::string>());
      if (!task.HasLabel(label)) {
        throw Error(ErrorCode::kBadLabel, "row " + std::to_string(line_no) +
                                              ": '" + v.get<std::string>() +
                                              "'");
      }
      ex.gold = std::move(label);
    } else if (needs_gold) {
      throw Error(ErrorCode::kBadLabel,
                  "row " + std::to_string(line_no) + ": missing gold label");
    }
    examples.push_back(std::move(ex));
  }
  return Dataset(task, split, std::move(examples));
}

Dataset LoadJsonl(const std::string& path, const TaskSpec& task,
                  Split split) {
  return ParseJsonl(ReadFile(path), task, split);
}

Dataset LoadDataset(const std::string& path, const TaskSpec& task,
                    Split split) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) ==
               0;
  };
  if (ends_with(".jsonl") || ends_with(".json")) {
    return LoadJsonl(path, task, split);
  }
  return LoadTsv(path, task, split);
}

Dataset SampleSplit(const Dataset& dataset, size_t n, uint64_t seed) {
  const size_t total = dataset.size();
  if (n > total) {
    throw Error(ErrorCode::kNTooLarge, "requested " + std::to_string(n) +
                                           " of " + std::to_string(total) +
                                           " examples");
  }
  std::vector<size_t> order(total);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  for (size_t i = 0; i < n; ++i) {
    const size_t j = i + static_cast<size_t>(rng.Below(total - i));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<Example> picked;
  picked.reserve(n);
  for (const size_t idx : order) picked.push_back(dataset[idx]);
  return Dataset(dataset.task(), dataset.split(), std::move(picked));
}

}  // namespace calum
