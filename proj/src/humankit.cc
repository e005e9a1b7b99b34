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

#include "calum/humankit.h"

#include <cstdio>
#include <optional>
#include <set>
#include <unordered_map>

#include "calum/csv.h"
#include "calum/error.h"
#include "calum/rng.h"
#include "calum/text.h"

namespace calum {
namespace {

constexpr int kMaxArrangeAttempts = 1000;

std::string ItemId(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "item-%03zu", i + 1);
  return buf;
}

// Seeded greedy placement: walk a shuffled pool and take the first item
// whose source was last placed at least `min_sep` positions ago. A dead end
// restarts from a fresh shuffle.
std::vector<size_t> Arrange(Rng& rng, const std::vector<size_t>& source_of,
                            size_t source_count, size_t min_sep) {
  const size_t n = source_of.size();
  for (int attempt = 0; attempt < kMaxArrangeAttempts; ++attempt) {
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    rng.Shuffle(std::span<size_t>(pool));
    std::vector<std::optional<size_t>> last(source_count);
    std::vector<size_t> order;
    order.reserve(n);
    bool stuck = false;
    for (size_t pos = 0; pos < n && !stuck; ++pos) {
      stuck = true;
      for (size_t k = 0; k < pool.size(); ++k) {
        const size_t src = source_of[pool[k]];
        if (last[src] && pos - *last[src] < min_sep) continue;
        last[src] = pos;
        order.push_back(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        stuck = false;
        break;
      }
    }
    if (!stuck) return order;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "could not separate renderings of the same example");
}

std::string CheckedLabel(const TaskSpec& task, std::string_view raw,
                         std::string_view item_id) {
  std::string label = NormalizeLabel(raw);
  if (!task.HasLabel(label)) {
    throw Error(ErrorCode::kBadLabel, "label '" + std::string(raw) +
                                          "' for " + std::string(item_id) +
                                          " is not in task '" + task.task_id +
                                          "'");
  }
  return label;
}

std::vector<csv::Row> BodyRows(std::string_view text,
                               const csv::Row& expected_header) {
  std::vector<csv::Row> rows = csv::Parse(text);
  if (rows.empty() || rows.front() != expected_header) {
    std::string want;
    for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
    throw Error(ErrorCode::kMissingColumn, "expected header " + want);
  }
  rows.erase(rows.begin());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != expected_header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "line " + std::to_string(i + 2) + ": expected " +
                      std::to_string(expected_header.size()) + " fields");
    }
  }
  return rows;
}

}  // namespace

Packet BuildPacket(const Dataset& validation,
                   std::span<const Perturbation> perturbations,
                   const std::string& annotator_id, uint64_t seed,
                   SourcePolicy policy) {
  if (validation.size() < kPacketSources) {
    throw Error(ErrorCode::kDatasetTooSmall,
                "packets need at least " + std::to_string(kPacketSources) +
                    " validation examples, got " +
                    std::to_string(validation.size()));
  }
  std::set<Perturbation> seen;
  for (const Perturbation p : perturbations) {
    if (p == Perturbation::kOriginal || !seen.insert(p).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "perturbations must be distinct and exclude original");
    }
  }
  const TaskSpec& task = validation.task();
  const uint64_t source_seed =
      policy == SourcePolicy::kShared
          ? seed
          : DeriveSeed(seed, "annotator:" + annotator_id);
  const Dataset sources = SampleSplit(validation, kPacketSources, source_seed);

  std::vector<Perturbation> renderings = {Perturbation::kOriginal};
  renderings.insert(renderings.end(), perturbations.begin(),
                    perturbations.end());
  std::vector<RenderedInput> rendered;
  std::vector<size_t> source_of;
  for (size_t s = 0; s < sources.size(); ++s) {
    if (!sources[s].gold) {
      throw Error(ErrorCode::kBadLabel,
                  "example '" + sources[s].id + "' has no gold label");
    }
    for (const Perturbation p : renderings) {
      rendered.push_back(Render(sources[s], task, p));
      source_of.push_back(s);
    }
  }

  Rng rng(DeriveSeed(seed, "order:" + annotator_id));
  const std::vector<size_t> order =
      Arrange(rng, source_of, sources.size(), kMinPairSeparation);

  Packet packet;
  packet.packet_id = task.task_id + "-" + annotator_id + "-" +
                     std::to_string(seed);
  packet.annotator_id = annotator_id;
  packet.task_id = task.task_id;
  for (size_t pos = 0; pos < order.size(); ++pos) {
    const RenderedInput& r = rendered[order[pos]];
    const Example& src = sources[source_of[order[pos]]];
    PacketItem item{ItemId(pos), src.id, r.perturbation, r.segment_a,
                    r.segment_b};
    packet.answer_key.push_back(
        KeyEntry{item.item_id, *src.gold, src.id, r.perturbation});
    packet.items.push_back(std::move(item));
  }
  return packet;
}

std::string PacketCsv(const Packet& packet) {
  std::string out = csv::FormatRow({"item_id", "segment_a", "segment_b"});
  for (const auto& item : packet.items) {
    out += csv::FormatRow({item.item_id, item.segment_a, item.segment_b});
  }
  return out;
}

std::string KeyCsv(const Packet& packet) {
  std::string out =
      csv::FormatRow({"item_id", "gold", "source_example_id", "perturbation"});
  for (const auto& k : packet.answer_key) {
    out += csv::FormatRow({k.item_id, k.gold, k.source_example_id,
                           std::string(PerturbationName(k.perturbation))});
  }
  return out;
}

std::vector<KeyEntry> ParseKeyCsv(std::string_view text) {
  std::vector<KeyEntry> key;
  std::set<std::string> ids;
  for (auto& row : BodyRows(text, {"item_id", "gold", "source_example_id",
                                   "perturbation"})) {
    if (!ids.insert(row[0]).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate item '" + row[0] + "'");
    }
    key.push_back(KeyEntry{std::move(row[0]), std::move(row[1]),
                           std::move(row[2]), ParsePerturbation(row[3])});
  }
  return key;
}

std::map<std::string, std::string> ParseResponsesCsv(std::string_view text) {
  std::map<std::string, std::string> responses;
  for (auto& row : BodyRows(text, {"item_id", "label"})) {
    if (!responses.emplace(row[0], row[1]).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate response for '" + row[0] + "'");
    }
  }
  return responses;
}

RunMetrics ScoreResponses(const TaskSpec& task,
                          std::span<const KeyEntry> answer_key,
                          const std::map<std::string, std::string>& responses,
                          const std::string& annotator_id) {
  std::set<std::string_view> known;
  for (const auto& k : answer_key) known.insert(k.item_id);
  for (const auto& [id, label] : responses) {
    if (!known.count(id)) {
      throw Error(ErrorCode::kIdMismatch,
                  "response for unknown item '" + id + "'");
    }
  }

  // source id -> perturbation -> answer
  std::map<std::string, std::map<Perturbation, std::string>> answers;
  size_t original = 0;
  size_t correct = 0;
  for (const auto& k : answer_key) {
    const auto it = responses.find(k.item_id);
    if (it == responses.end()) {
      throw Error(ErrorCode::kMissingResponse,
                  "no response for '" + k.item_id + "'");
    }
    const std::string label = CheckedLabel(task, it->second, k.item_id);
    if (k.perturbation == Perturbation::kOriginal) {
      ++original;
      if (label == NormalizeLabel(k.gold)) ++correct;
    }
    answers[k.source_example_id][k.perturbation] = label;
  }
  if (original == 0) {
    throw Error(ErrorCode::kEmptySplit, "answer key has no original items");
  }

  auto agreement = [&](Perturbation p) -> std::optional<double> {
    size_t pairs = 0;
    size_t agree = 0;
    for (const auto& [src, by_p] : answers) {
      const auto orig = by_p.find(Perturbation::kOriginal);
      const auto other = by_p.find(p);
      if (other == by_p.end()) continue;
      if (orig == by_p.end()) {
        throw Error(ErrorCode::kIdMismatch,
                    "source '" + src + "' has no original item");
      }
      ++pairs;
      if (orig->second == other->second) ++agree;
    }
    if (pairs == 0) return std::nullopt;
    return static_cast<double>(agree) / static_cast<double>(pairs);
  };

  RunMetrics m;
  m.model_name = "human:" + annotator_id;
  m.task_id = task.task_id;
  m.acc_val = static_cast<double>(correct) / static_cast<double>(original);
  m.c_reverse = agreement(Perturbation::kReverse);
  m.c_signal = agreement(Perturbation::kSignal);
  return m;
}

}  // namespace calum
