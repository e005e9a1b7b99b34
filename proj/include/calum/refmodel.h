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

// Reference classifier: hashed bag of word uni/bigrams, a shared ReLU
// encoder h = relu(W^T x) and one softmax head per task.
//
// Training minimizes mean cross-entropy with AdamW (decoupled weight decay)
// under a linear warmup/decay schedule. Encoder moments are lazy: a row's
// moments advance only on steps whose batch activates it. Everything is
// single-threaded and seeded, so (data, config, seed) fixes the model bit
// for bit.
//
// The encoder matrix is stored as raw * scale. Weight decay multiplies the
// scale instead of touching every row, which keeps a step proportional to
// the number of active buckets.

#ifndef CALUM_REFMODEL_H_
#define CALUM_REFMODEL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "calum/backend.h"
#include "calum/corpus.h"
#include "calum/perturb.h"

namespace calum::refmodel {

inline constexpr uint64_t kDefaultBucketCount = uint64_t{1} << 18;
inline constexpr size_t kDefaultHiddenDim = 64;

struct SparseVector {
  std::vector<uint32_t> index;  // strictly increasing
  std::vector<double> value;

  size_t nnz() const { return index.size(); }
};

struct FeaturizerConfig {
  uint64_t bucket_count = kDefaultBucketCount;
  // Sorts the two segments before joining, which makes features invariant
  // under REVERSE. Test-only; never serialized.
  bool order_normalized = false;
};

// Counts of whitespace-token unigrams and bigrams hashed with FNV-1a-64
// into bucket_count buckets, L2-normalized. Zero tokens -> empty vector.
SparseVector FeaturizeText(std::string_view text, uint64_t bucket_count);
SparseVector Featurize(const RenderedInput& input,
                       const FeaturizerConfig& config);

struct TaskHead {
  std::string task_id;
  size_t label_count = 0;
  std::vector<double> weight;  // label_count x hidden_dim, row-major
  std::vector<double> bias;    // label_count
};

class Model {
 public:
  Model(uint64_t bucket_count, size_t hidden_dim);

  uint64_t bucket_count() const { return featurizer_.bucket_count; }
  size_t hidden_dim() const { return hidden_dim_; }
  const FeaturizerConfig& featurizer() const { return featurizer_; }
  void set_order_normalized(bool on) { featurizer_.order_normalized = on; }

  double EncoderWeight(size_t bucket, size_t j) const {
    return encoder_scale_ * encoder_raw_[bucket * hidden_dim_ + j];
  }
  void SetEncoderWeight(size_t bucket, size_t j, double value);

  bool HasHead(std::string_view task_id) const;
  const TaskHead& Head(std::string_view task_id) const;  // kNoHeadForTask
  TaskHead& MutableHead(std::string_view task_id);
  const std::vector<TaskHead>& heads() const { return heads_; }
  TaskHead& AddHead(std::string task_id, size_t label_count);

  // Uniform(-r, r) with r = 1/sqrt(fan_in) from Rng(seed); biases zero.
  void InitEncoder(uint64_t seed);
  void InitHead(std::string_view task_id, uint64_t seed);

  // h = relu(W^T x).
  std::vector<double> Encode(const SparseVector& x) const;
  std::vector<double> Probabilities(std::string_view task_id,
                                    const SparseVector& x) const;

  // Argmax of the head's softmax; ties go to the lowest label index.
  // Throws kNoHeadForTask, or kInvalidArgument when the task's label count
  // does not match the head.
  PredictionOutcome Predict(const TaskSpec& task,
                            const RenderedInput& input) const;
  int PredictIndex(std::string_view task_id, const SparseVector& x) const;

  // Little-endian "CALM1" format: bucket_count, hidden_dim, head count
  // (u64 each), per head the length-prefixed task id and u64 label count,
  // then f64 parameters: encoder (bucket-major), then per head its weight
  // and bias.
  std::string Serialize() const;
  static Model Deserialize(std::string_view bytes);
  void Save(const std::string& path) const;
  static Model Load(const std::string& path);

  // Decoupled decay for the encoder: W <- (1 - factor) W.
  void DecayEncoder(double factor);
  // W[bucket, :] -= step * grad (effective units).
  void UpdateEncoderRow(uint32_t bucket, std::span<const double> grad,
                        double step);

 private:
  FeaturizerConfig featurizer_;
  size_t hidden_dim_;
  std::vector<double> encoder_raw_;
  double encoder_scale_ = 1.0;
  std::vector<TaskHead> heads_;
};

struct LabeledFeatures {
  SparseVector x;
  int label = 0;
};

// Gradient of the mean cross-entropy over `batch` for one head.
struct Gradients {
  double loss = 0.0;
  // Only buckets active in the batch, increasing bucket order.
  std::vector<uint32_t> encoder_buckets;
  std::vector<std::vector<double>> encoder_rows;
  std::vector<double> head_weight;
  std::vector<double> head_bias;
};

double Loss(const Model& model, std::string_view task_id,
            std::span<const LabeledFeatures> batch);
Gradients ComputeGradients(const Model& model, std::string_view task_id,
                           std::span<const LabeledFeatures> batch);

struct TrainConfig {
  int epochs = 10;
  int batch_size = 64;
  double learning_rate = 1e-2;
  double weight_decay = 1e-3;
  double warmup_fraction = 0.1;
  int early_stop_patience = 2;
  uint64_t seed = 0;
  // Encoder learning rate = learning_rate * encoder_lr_scale. Zero freezes
  // the encoder.
  double encoder_lr_scale = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  uint64_t bucket_count = kDefaultBucketCount;
  size_t hidden_dim = kDefaultHiddenDim;

  void Validate() const;
};

// Learning rate at 0-based step `step` of `total_steps`: linear warmup over
// floor(warmup_fraction * total) steps, then linear decay to zero.
double ScheduledRate(const TrainConfig& cfg, int64_t step, int64_t total_steps);

struct AdamMoments {
  int64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

// AdamW state of one training run. Head moments cover the weights followed
// by the bias and count their own task's steps; encoder rows hold m then v
// (2 * hidden_dim values) and share one step counter.
struct OptimizerState {
  std::map<std::string, AdamMoments, std::less<>> heads;
  int64_t encoder_step = 0;
  std::unordered_map<uint32_t, std::vector<double>> encoder_rows;
};

// One AdamW step on `task_id`'s head and the shared encoder. Other heads
// and their moments are not read or written. Returns the batch loss before
// the step.
double ApplyStep(Model& model, OptimizerState& state, std::string_view task_id,
                 std::span<const LabeledFeatures> batch, double rate,
                 const TrainConfig& cfg);

// Featurizes the ORIGINAL rendering of each example (gold required).
std::vector<LabeledFeatures> PrepareExamples(const Dataset& dataset,
                                             const FeaturizerConfig& config);

double Accuracy(const Model& model, std::string_view task_id,
                std::span<const LabeledFeatures> examples);

struct TrainReport {
  std::vector<double> validation_accuracy;  // per completed epoch
  std::vector<double> epoch_loss;           // mean batch loss, main task
  int best_epoch = -1;
};

// Returns the parameters of the epoch with the best validation accuracy.
// Throws kEmptySplit, kInvalidArgument.
Model TrainSingle(const TaskSpec& task, const Dataset& train,
                  const Dataset& validation, const TrainConfig& cfg,
                  TrainReport* report = nullptr);

enum class MultitaskMode { kPara, kAll };
MultitaskMode ParseMultitaskMode(std::string_view name);

struct TaskData {
  const Dataset* train = nullptr;
  const Dataset* validation = nullptr;  // required for the main task only
};

// Auxiliary tasks implied by a mode: PARA = registered STS tasks, ALL =
// every other registered task; the main task is never its own auxiliary.
std::vector<std::string> AuxTasksFor(const TaskRegistry& registry,
                                     std::string_view main_task,
                                     MultitaskMode mode);

// Shared encoder, one head per task. Each epoch interleaves the shuffled
// minibatches of all tasks in a seeded random order, so a task is drawn in
// proportion to its dataset size. Every task keeps its own shuffle stream
// and its own schedule step counter. Model selection is on main-task
// validation accuracy. Throws kUnknownTask, kEmptySplit, kInvalidArgument.
Model TrainMultitask(const TaskRegistry& registry, std::string_view main_task,
                     std::span<const std::string> aux_tasks,
                     const std::map<std::string, TaskData>& data,
                     const TrainConfig& cfg, MultitaskMode mode,
                     TrainReport* report = nullptr);

class RefModelBackend final : public Backend {
 public:
  explicit RefModelBackend(std::shared_ptr<const Model> model)
      : model_(std::move(model)) {}
  std::vector<PredictionOutcome> ClassifyBatch(
      const TaskSpec& task,
      std::span<const RenderedInput> inputs) const override;

 private:
  std::shared_ptr<const Model> model_;
};

}  // namespace calum::refmodel

#endif  // CALUM_REFMODEL_H_
