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

// Annotator packets: 30 validation examples plus their perturbed
// renderings, shuffled, with the answer key kept in a separate file.

#ifndef CALUM_HUMANKIT_H_
#define CALUM_HUMANKIT_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "calum/corpus.h"
#include "calum/metrics.h"
#include "calum/perturb.h"

namespace calum {

inline constexpr size_t kPacketSources = 30;
// Minimum distance between two renderings of the same source example.
inline constexpr size_t kMinPairSeparation = 5;

struct PacketItem {
  std::string item_id;  // "item-001", ... in packet order
  std::string source_example_id;
  Perturbation perturbation = Perturbation::kOriginal;
  std::string segment_a;
  std::string segment_b;
};

struct KeyEntry {
  std::string item_id;
  std::string gold;
  std::string source_example_id;
  Perturbation perturbation = Perturbation::kOriginal;

  bool operator==(const KeyEntry&) const = default;
};

struct Packet {
  std::string packet_id;
  std::string annotator_id;
  std::string task_id;
  std::vector<PacketItem> items;
  std::vector<KeyEntry> answer_key;  // same order as items
};

// Which seed selects the source examples. kShared: every annotator of a
// seed sees the same 30 examples. kPerAnnotator: the selection is also
// keyed by the annotator id (independent draws, not guaranteed disjoint).
enum class SourcePolicy { kShared, kPerAnnotator };

// Throws kDatasetTooSmall when |validation| < 30, kInvalidArgument when
// `perturbations` contains ORIGINAL or repeats, kBadLabel on missing gold.
Packet BuildPacket(const Dataset& validation,
                   std::span<const Perturbation> perturbations,
                   const std::string& annotator_id, uint64_t seed,
                   SourcePolicy policy = SourcePolicy::kShared);

// "item_id,segment_a,segment_b" header plus one row per item. Contains no
// gold labels.
std::string PacketCsv(const Packet& packet);
// "item_id,gold,source_example_id,perturbation".
std::string KeyCsv(const Packet& packet);
std::vector<KeyEntry> ParseKeyCsv(std::string_view text);

// "item_id,label". Throws kDuplicateId, kMalformedRow.
std::map<std::string, std::string> ParseResponsesCsv(std::string_view text);

// Accuracy over ORIGINAL items; C_R / C_S as the agreement of each source's
// ORIGINAL answer with its REVERSE / SIGNAL answer (absent when the packet
// has no such items). Throws kMissingResponse, kBadLabel, kIdMismatch.
RunMetrics ScoreResponses(const TaskSpec& task,
                          std::span<const KeyEntry> answer_key,
                          const std::map<std::string, std::string>& responses,
                          const std::string& annotator_id);

}  // namespace calum

#endif  // CALUM_HUMANKIT_H_
