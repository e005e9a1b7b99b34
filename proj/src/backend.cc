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

#include "calum/backend.h"

#include <deque>
#include <exception>
#include <future>

#include "calum/error.h"
#include "calum/hash.h"
#include "calum/rng.h"
#include "calum/text.h"

namespace calum {
namespace {

// The splitmix64 finalizer decorrelates nearby seeds; raw FNV-1a low bits
// differ by a near-constant offset when only the last byte changes.
const std::string& PickLabel(const TaskSpec& task, uint64_t h) {
  return task.labels[SplitMix64(h) % task.labels.size()];
}

uint64_t ParseUnsigned(std::string_view key, std::string_view value) {
  uint64_t out = 0;
  if (value.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "empty value for '" + std::string(key) + "'");
  }
  for (const char c : value) {
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::kInvalidArgument,
                  "'" + std::string(key) + "' must be a non-negative integer");
    }
    out = out * 10 + static_cast<uint64_t>(c - '0');
  }
  return out;
}

}  // namespace

PredictionOutcome ParseGeneratedLabel(std::string_view raw,
                                      const TaskSpec& task) {
  std::string_view s = Trim(raw);
  while (!s.empty() && (s.back() == '.' || s.back() == ',')) {
    s.remove_suffix(1);
    s = Trim(s);
  }
  const std::string normalized = AsciiLower(s);
  if (task.HasLabel(normalized)) return PredictionOutcome::Label(normalized);
  return PredictionOutcome::Unparseable(std::string(raw));
}

std::string StubSymmetricLabel(const TaskSpec& task,
                               const std::pair<std::string, std::string>& sents,
                               uint64_t seed) {
  const bool ordered = sents.first <= sents.second;
  const std::string& lo = ordered ? sents.first : sents.second;
  const std::string& hi = ordered ? sents.second : sents.first;
  uint64_t h = Fnv1a64(lo);
  h = Fnv1a64("\n", h);
  h = Fnv1a64(hi, h);
  h = Fnv1a64("\n", h);
  h = Fnv1a64(std::to_string(seed), h);
  return PickLabel(task, h);
}

std::string StubOrderSensitiveLabel(const TaskSpec& task,
                                    std::string_view text, uint64_t seed) {
  uint64_t h = Fnv1a64(text);
  h = Fnv1a64("\n", h);
  h = Fnv1a64(std::to_string(seed), h);
  return PickLabel(task, h);
}

std::vector<PredictionOutcome> SymmetricStub::ClassifyBatch(
    const TaskSpec& task, std::span<const RenderedInput> inputs) const {
  std::vector<PredictionOutcome> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) {
    out.push_back(PredictionOutcome::Label(
        StubSymmetricLabel(task, StripIndicators(input, task), seed_)));
  }
  return out;
}

std::vector<PredictionOutcome> OrderSensitiveStub::ClassifyBatch(
    const TaskSpec& task, std::span<const RenderedInput> inputs) const {
  std::vector<PredictionOutcome> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) {
    out.push_back(PredictionOutcome::Label(
        StubOrderSensitiveLabel(task, input.joined, seed_)));
  }
  return out;
}

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttpClassifier: return "http-classifier";
    case BackendKind::kHttpGenerator: return "http-generator";
    case BackendKind::kStubSymmetric: return "stub-symmetric";
    case BackendKind::kStubOrderSensitive: return "stub-order-sensitive";
    case BackendKind::kRefModel: return "refmodel";
  }
  return "";
}

BackendDescriptor ParseBackendDescriptor(std::string_view text) {
  BackendDescriptor d;
  bool have_kind = false;
  for (std::string_view item : SplitOn(text, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "backend item '" + std::string(item) + "' lacks '='");
    }
    const std::string key = AsciiLower(Trim(item.substr(0, eq)));
    const std::string_view value = Trim(item.substr(eq + 1));
    if (key == "kind") {
      const std::string kind = AsciiLower(value);
      if (kind == "http-classifier") {
        d.kind = BackendKind::kHttpClassifier;
      } else if (kind == "http-generator") {
        d.kind = BackendKind::kHttpGenerator;
      } else if (kind == "stub-symmetric" || kind == "symmetric") {
        d.kind = BackendKind::kStubSymmetric;
      } else if (kind == "stub-order-sensitive" || kind == "order-sensitive") {
        d.kind = BackendKind::kStubOrderSensitive;
      } else if (kind == "refmodel") {
        d.kind = BackendKind::kRefModel;
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "unknown backend kind '" + std::string(value) + "'");
      }
      have_kind = true;
    } else if (key == "endpoint") {
      d.endpoint = std::string(value);
    } else if (key == "model") {
      d.model_name = std::string(value);
    } else if (key == "seed") {
      d.run_seed = ParseUnsigned(key, value);
    } else if (key == "retries") {
      d.retry.max_attempts = static_cast<int>(ParseUnsigned(key, value));
    } else if (key == "backoff_ms") {
      d.retry.initial_backoff =
          std::chrono::milliseconds(ParseUnsigned(key, value));
    } else if (key == "timeout_ms") {
      d.retry.timeout = std::chrono::milliseconds(ParseUnsigned(key, value));
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown backend key '" + key + "'");
    }
  }
  if (!have_kind) {
    throw Error(ErrorCode::kInvalidArgument, "backend descriptor needs kind=");
  }
  const bool http = d.kind == BackendKind::kHttpClassifier ||
                    d.kind == BackendKind::kHttpGenerator;
  if (http && (!d.endpoint || d.endpoint->empty())) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(BackendKindName(d.kind)) + " requires endpoint=");
  }
  if (d.kind == BackendKind::kStubSymmetric ||
      d.kind == BackendKind::kStubOrderSensitive) {
    if (!d.run_seed) d.run_seed = 0;
  }
  if (d.kind == BackendKind::kRefModel && d.model_name.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "refmodel requires model=PATH");
  }
  if (d.retry.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "retries must be >= 1");
  }
  return d;
}

std::string DescriptorModelName(const BackendDescriptor& descriptor) {
  if (!descriptor.model_name.empty()) return descriptor.model_name;
  return std::string(BackendKindName(descriptor.kind));
}

std::vector<PredictionOutcome> ClassifyAll(const Backend& backend,
                                           const TaskSpec& task,
                                           std::span<const RenderedInput> inputs,
                                           const DispatchOptions& options) {
  const size_t batch = std::max<size_t>(1, options.batch_size);
  const size_t in_flight = static_cast<size_t>(std::max(1, options.in_flight));
  std::vector<PredictionOutcome> out;
  out.reserve(inputs.size());

  auto take = [&](std::vector<PredictionOutcome> part, size_t expected) {
    if (part.size() != expected) {
      throw Error(ErrorCode::kProtocol,
                  "backend returned " + std::to_string(part.size()) +
                      " outcomes for " + std::to_string(expected) + " inputs");
    }
    for (auto& o : part) out.push_back(std::move(o));
  };

  if (in_flight == 1 || inputs.size() <= batch) {
    for (size_t start = 0; start < inputs.size(); start += batch) {
      const auto chunk = inputs.subspan(start,
                                        std::min(batch, inputs.size() - start));
      take(backend.ClassifyBatch(task, chunk), chunk.size());
    }
    return out;
  }

  struct Pending {
    size_t size;
    std::future<std::vector<PredictionOutcome>> result;
  };
  std::deque<Pending> pending;
  std::exception_ptr first_error;
  auto drain_one = [&] {
    Pending p = std::move(pending.front());
    pending.pop_front();
    try {
      auto part = p.result.get();
      if (!first_error) take(std::move(part), p.size);
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  };
  for (size_t start = 0; start < inputs.size(); start += batch) {
    if (first_error) break;
    const auto chunk =
        inputs.subspan(start, std::min(batch, inputs.size() - start));
    if (pending.size() >= in_flight) drain_one();
    pending.push_back(
        {chunk.size(), std::async(std::launch::async, [&backend, &task, chunk] {
           return backend.ClassifyBatch(task, chunk);
         })});
  }
  while (!pending.empty()) drain_one();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace calum
