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

// Model predictors behind one interface: deterministic stubs, HTTP
// classifier/generator clients and the built-in reference model.

#ifndef CALUM_BACKEND_H_
#define CALUM_BACKEND_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "calum/corpus.h"
#include "calum/perturb.h"

namespace calum {

// A parsed label, or the raw text of a generation that did not normalize to
// any label of the task.
class PredictionOutcome {
 public:
  static PredictionOutcome Label(std::string value) {
    return PredictionOutcome(true, std::move(value));
  }
  static PredictionOutcome Unparseable(std::string raw) {
    return PredictionOutcome(false, std::move(raw));
  }

  bool is_label() const { return is_label_; }
  // The label value for Label outcomes, the raw generation otherwise.
  const std::string& text() const { return text_; }

  // Structural equality (used for determinism checks). Agreement between
  // predictions is Agrees(), not this.
  bool operator==(const PredictionOutcome&) const = default;

 private:
  PredictionOutcome(bool is_label, std::string text)
      : is_label_(is_label), text_(std::move(text)) {}

  bool is_label_;
  std::string text_;
};

// True only for two Label outcomes with the same value. An Unparseable
// outcome agrees with nothing, including another Unparseable.
inline bool Agrees(const PredictionOutcome& a, const PredictionOutcome& b) {
  return a.is_label() && b.is_label() && a.text() == b.text();
}

// Trims, lowercases and strips trailing '.'/',' then requires an exact
// label match. Never throws.
PredictionOutcome ParseGeneratedLabel(std::string_view raw,
                                      const TaskSpec& task);

class Backend {
 public:
  virtual ~Backend() = default;

  // One outcome per input, order-aligned. Implementations must be safe to
  // call concurrently.
  virtual std::vector<PredictionOutcome> ClassifyBatch(
      const TaskSpec& task, std::span<const RenderedInput> inputs) const = 0;
};

// Label of the symmetric stub: labels[mix(h) % n] where h is FNV-1a-64 over
// the indicator-stripped sentences sorted bytewise, joined as
// "s1\ns2\n<seed>", and mix is one splitmix64 step with state h. Invariant
// under REVERSE and SIGNAL.
std::string StubSymmetricLabel(const TaskSpec& task,
                               const std::pair<std::string, std::string>& sents,
                               uint64_t seed);

// Label of the order-sensitive stub: labels[mix(h) % n] with h the
// FNV-1a-64 of "<text>\n<seed>", where text is the full rendered string,
// indicators and order included.
std::string StubOrderSensitiveLabel(const TaskSpec& task,
                                    std::string_view text, uint64_t seed);

class SymmetricStub final : public Backend {
 public:
  explicit SymmetricStub(uint64_t seed) : seed_(seed) {}
  std::vector<PredictionOutcome> ClassifyBatch(
      const TaskSpec& task,
      std::span<const RenderedInput> inputs) const override;

 private:
  uint64_t seed_;
};

class OrderSensitiveStub final : public Backend {
 public:
  explicit OrderSensitiveStub(uint64_t seed) : seed_(seed) {}
  std::vector<PredictionOutcome> ClassifyBatch(
      const TaskSpec& task,
      std::span<const RenderedInput> inputs) const override;

 private:
  uint64_t seed_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::milliseconds timeout{30000};
};

enum class BackendKind {
  kHttpClassifier,
  kHttpGenerator,
  kStubSymmetric,
  kStubOrderSensitive,
  kRefModel,
};

std::string_view BackendKindName(BackendKind kind);  // "http-classifier", ...

// Parsed form of `kind=http-classifier,endpoint=URL,model=NAME,seed=N`.
// HTTP kinds require an endpoint; stub kinds take seed (default 0); the
// refmodel kind reads its parameters from the file named by model. A
// "{run}" in model is replaced by the run index when a backend is made.
struct BackendDescriptor {
  BackendKind kind = BackendKind::kStubSymmetric;
  std::optional<std::string> endpoint;
  std::string model_name;
  std::optional<uint64_t> run_seed;
  RetryPolicy retry;
};

BackendDescriptor ParseBackendDescriptor(std::string_view text);

// Backend for one evaluation run. Stubs hash with `seed`; "{run}" in the
// model name becomes run_index.
std::unique_ptr<Backend> MakeBackend(const BackendDescriptor& descriptor,
                                     int run_index, uint64_t seed);

// Seeds of `runs` consecutive runs: run_seed (default 0) + i.
std::vector<uint64_t> RunSeeds(const BackendDescriptor& descriptor, int runs);

// Name recorded in metrics for a descriptor.
std::string DescriptorModelName(const BackendDescriptor& descriptor);

struct DispatchOptions {
  size_t batch_size = 32;
  int in_flight = 4;  // concurrent batches
};

// Splits `inputs` into batches, keeps up to options.in_flight batches in
// flight and reassembles the outcomes in input order. The first error
// (by batch order) is rethrown after all launched batches finish.
std::vector<PredictionOutcome> ClassifyAll(const Backend& backend,
                                           const TaskSpec& task,
                                           std::span<const RenderedInput> inputs,
                                           const DispatchOptions& options = {});

}  // namespace calum

#endif  // CALUM_BACKEND_H_
