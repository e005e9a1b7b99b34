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

#include "calum/refmodel.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <optional>

#include "calum/error.h"
#include "calum/hash.h"
#include "calum/rng.h"
#include "calum/text.h"

namespace calum::refmodel {
namespace {

constexpr char kMagic[] = "CALM1";
constexpr size_t kMagicSize = 5;

// Below this the scale is folded back into the raw weights.
constexpr double kMinEncoderScale = 1e-6;

void Softmax(std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

// Pre-activations z = W^T x.
std::vector<double> Preactivation(const Model& model, const SparseVector& x) {
  const size_t d = model.hidden_dim();
  std::vector<double> z(d, 0.0);
  for (size_t n = 0; n < x.nnz(); ++n) {
    const size_t bucket = x.index[n];
    const double xv = x.value[n];
    for (size_t j = 0; j < d; ++j) z[j] += xv * model.EncoderWeight(bucket, j);
  }
  return z;
}

std::vector<double> Logits(const TaskHead& head, std::span<const double> h) {
  const size_t d = h.size();
  std::vector<double> logits(head.label_count);
  for (size_t k = 0; k < head.label_count; ++k) {
    double v = head.bias[k];
    const double* row = head.weight.data() + k * d;
    for (size_t j = 0; j < d; ++j) v += row[j] * h[j];
    logits[k] = v;
  }
  return logits;
}

void PutU64(std::string& out, uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = __builtin_bswap64(v);
  }
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

void PutF64(std::string& out, double v) { PutU64(out, std::bit_cast<uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view Take(size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kBadModelFile, "truncated model file");
    }
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  uint64_t U64() {
    uint64_t v;
    std::memcpy(&v, Take(8).data(), 8);
    if constexpr (std::endian::native == std::endian::big) {
      v = __builtin_bswap64(v);
    }
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

int64_t StepsPerEpoch(size_t n, int batch_size) {
  return static_cast<int64_t>((n + static_cast<size_t>(batch_size) - 1) /
                              static_cast<size_t>(batch_size));
}

std::string HeadStream(std::string_view task_id) {
  return "head:" + std::string(task_id);
}
std::string ShuffleStream(std::string_view task_id) {
  return "shuffle:" + std::string(task_id);
}

// Per-task training state for one run.
struct TaskTrack {
  std::string task_id;
  std::vector<LabeledFeatures> examples;
  Rng shuffle;
  int64_t total_steps = 0;
  int64_t step = 0;
  std::vector<size_t> order;
  size_t next_batch = 0;

  TaskTrack(std::string id, std::vector<LabeledFeatures> ex, uint64_t seed,
            const TrainConfig& cfg)
      : task_id(std::move(id)),
        examples(std::move(ex)),
        shuffle(DeriveSeed(seed, ShuffleStream(task_id))) {
    total_steps = static_cast<int64_t>(cfg.epochs) *
                  StepsPerEpoch(examples.size(), cfg.batch_size);
  }

  // Reshuffles and returns the number of batches this epoch.
  size_t BeginEpoch(const TrainConfig& cfg) {
    order.resize(examples.size());
    std::iota(order.begin(), order.end(), size_t{0});
    shuffle.Shuffle(std::span<size_t>(order));
    next_batch = 0;
    return static_cast<size_t>(StepsPerEpoch(examples.size(), cfg.batch_size));
  }

  // Runs the next batch of the current epoch; returns its mean loss. Batches
  // run in the same order whatever other tracks are interleaved.
  double RunBatch(Model& model, OptimizerState& state,
                  const TrainConfig& cfg) {
    const size_t bs = static_cast<size_t>(cfg.batch_size);
    const size_t lo = next_batch++ * bs;
    const size_t hi = std::min(order.size(), lo + bs);
    std::vector<LabeledFeatures> batch;
    batch.reserve(hi - lo);
    for (size_t i = lo; i < hi; ++i) batch.push_back(examples[order[i]]);
    const double loss =
        ApplyStep(model, state, task_id, batch,
                  ScheduledRate(cfg, step, total_steps), cfg);
    ++step;
    return loss;
  }
};

// Keeps the best-validation snapshot and decides early stopping.
class Selector {
 public:
  Selector(int patience, TrainReport* report)
      : patience_(patience), report_(report) {}

  // Returns false when training should stop.
  bool Observe(const Model& model, double accuracy, double epoch_loss) {
    const int epoch = epochs_seen_++;
    if (report_) {
      report_->validation_accuracy.push_back(accuracy);
      report_->epoch_loss.push_back(epoch_loss);
    }
    if (!best_ || accuracy > best_accuracy_) {
      best_ = model;
      best_accuracy_ = accuracy;
      best_epoch_ = epoch;
      stale_ = 0;
      return true;
    }
    return ++stale_ < patience_;
  }

  Model Take() {
    if (report_) report_->best_epoch = best_epoch_;
    return std::move(*best_);
  }

 private:
  int patience_;
  TrainReport* report_;
  std::optional<Model> best_;
  double best_accuracy_ = -1.0;
  int best_epoch_ = -1;
  int epochs_seen_ = 0;
  int stale_ = 0;
};

}  // namespace

SparseVector FeaturizeText(std::string_view text, uint64_t bucket_count) {
  const auto tokens = SplitWhitespace(text);
  std::map<uint32_t, double> counts;
  auto bump = [&](uint64_t h) {
    counts[static_cast<uint32_t>(h % bucket_count)] += 1.0;
  };
  for (size_t i = 0; i < tokens.size(); ++i) {
    bump(Fnv1a64(tokens[i]));
    if (i + 1 < tokens.size()) {
      uint64_t h = Fnv1a64(tokens[i]);
      h = Fnv1a64(" ", h);
      bump(Fnv1a64(tokens[i + 1], h));
    }
  }
  SparseVector out;
  double norm = 0.0;
  for (const auto& [idx, c] : counts) norm += c * c;
  norm = std::sqrt(norm);
  for (const auto& [idx, c] : counts) {
    out.index.push_back(idx);
    out.value.push_back(c / norm);
  }
  return out;
}

SparseVector Featurize(const RenderedInput& input,
                       const FeaturizerConfig& config) {
  if (!config.order_normalized) {
    return FeaturizeText(input.joined, config.bucket_count);
  }
  const bool ordered = input.segment_a <= input.segment_b;
  const std::string& lo = ordered ? input.segment_a : input.segment_b;
  const std::string& hi = ordered ? input.segment_b : input.segment_a;
  return FeaturizeText(lo + " " + hi, config.bucket_count);
}

Model::Model(uint64_t bucket_count, size_t hidden_dim)
    : hidden_dim_(hidden_dim) {
  if (bucket_count == 0 || bucket_count > (uint64_t{1} << 32) ||
      hidden_dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bad model dimensions");
  }
  featurizer_.bucket_count = bucket_count;
  encoder_raw_.assign(bucket_count * hidden_dim, 0.0);
}

void Model::SetEncoderWeight(size_t bucket, size_t j, double value) {
  encoder_raw_[bucket * hidden_dim_ + j] = value / encoder_scale_;
}

bool Model::HasHead(std::string_view task_id) const {
  return std::any_of(heads_.begin(), heads_.end(),
                     [&](const TaskHead& h) { return h.task_id == task_id; });
}

const TaskHead& Model::Head(std::string_view task_id) const {
  for (const auto& head : heads_) {
    if (head.task_id == task_id) return head;
  }
  throw Error(ErrorCode::kNoHeadForTask,
              "model has no head for '" + std::string(task_id) + "'");
}

TaskHead& Model::MutableHead(std::string_view task_id) {
  return const_cast<TaskHead&>(std::as_const(*this).Head(task_id));
}

TaskHead& Model::AddHead(std::string task_id, size_t label_count) {
  if (HasHead(task_id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate head '" + task_id + "'");
  }
  TaskHead head;
  head.task_id = std::move(task_id);
  head.label_count = label_count;
  head.weight.assign(label_count * hidden_dim_, 0.0);
  head.bias.assign(label_count, 0.0);
  heads_.push_back(std::move(head));
  return heads_.back();
}

void Model::InitEncoder(uint64_t seed) {
  Rng rng(seed);
  const double r = 1.0 / std::sqrt(static_cast<double>(bucket_count()));
  encoder_scale_ = 1.0;
  for (double& w : encoder_raw_) w = rng.Uniform(-r, r);
}

void Model::InitHead(std::string_view task_id, uint64_t seed) {
  TaskHead& head = MutableHead(task_id);
  Rng rng(seed);
  const double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim_));
  for (double& w : head.weight) w = rng.Uniform(-r, r);
  std::fill(head.bias.begin(), head.bias.end(), 0.0);
}

std::vector<double> Model::Encode(const SparseVector& x) const {
  std::vector<double> h = Preactivation(*this, x);
  for (double& v : h) v = std::max(v, 0.0);
  return h;
}

std::vector<double> Model::Probabilities(std::string_view task_id,
                                         const SparseVector& x) const {
  std::vector<double> p = Logits(Head(task_id), Encode(x));
  Softmax(p);
  return p;
}

int Model::PredictIndex(std::string_view task_id, const SparseVector& x) const {
  const std::vector<double> p = Probabilities(task_id, x);
  int best = 0;
  for (size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = static_cast<int>(k);
  }
  return best;
}

PredictionOutcome Model::Predict(const TaskSpec& task,
                                 const RenderedInput& input) const {
  const TaskHead& head = Head(task.task_id);
  if (head.label_count != task.labels.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "head '" + task.task_id + "' has " +
                    std::to_string(head.label_count) + " labels, task has " +
                    std::to_string(task.labels.size()));
  }
  return PredictionOutcome::Label(
      task.labels[PredictIndex(task.task_id, Featurize(input, featurizer_))]);
}

std::string Model::Serialize() const {
  std::string out(kMagic, kMagicSize);
  PutU64(out, bucket_count());
  PutU64(out, hidden_dim_);
  PutU64(out, heads_.size());
  for (const auto& head : heads_) {
    PutU64(out, head.task_id.size());
    out += head.task_id;
    PutU64(out, head.label_count);
  }
  out.reserve(out.size() + 8 * (encoder_raw_.size() + 1024));
  for (const double w : encoder_raw_) PutF64(out, encoder_scale_ * w);
  for (const auto& head : heads_) {
    for (const double w : head.weight) PutF64(out, w);
    for (const double b : head.bias) PutF64(out, b);
  }
  return out;
}

Model Model::Deserialize(std::string_view bytes) {
  Reader in(bytes);
  if (in.Take(kMagicSize) != std::string_view(kMagic, kMagicSize)) {
    throw Error(ErrorCode::kBadModelFile, "missing CALM1 magic");
  }
  const uint64_t buckets = in.U64();
  const uint64_t dim = in.U64();
  const uint64_t head_count = in.U64();
  if (buckets == 0 || dim == 0 || dim > 4096 ||
      buckets > bytes.size() / 8 / dim) {
    throw Error(ErrorCode::kBadModelFile, "implausible dimensions");
  }
  Model model(buckets, dim);
  for (uint64_t i = 0; i < head_count; ++i) {
    const uint64_t len = in.U64();
    std::string id(in.Take(len));
    const uint64_t labels = in.U64();
    if (labels == 0 || labels > 1024) {
      throw Error(ErrorCode::kBadModelFile, "implausible label count");
    }
    model.AddHead(std::move(id), labels);
  }
  for (double& w : model.encoder_raw_) w = in.F64();
  for (auto& head : model.heads_) {
    for (double& w : head.weight) w = in.F64();
    for (double& b : head.bias) b = in.F64();
  }
  if (!in.done()) throw Error(ErrorCode::kBadModelFile, "trailing bytes");
  return model;
}

void Model::Save(const std::string& path) const { WriteFile(path, Serialize()); }

Model Model::Load(const std::string& path) { return Deserialize(ReadFile(path)); }

void Model::DecayEncoder(double factor) {
  encoder_scale_ *= 1.0 - factor;
  if (encoder_scale_ < kMinEncoderScale) {
    for (double& w : encoder_raw_) w *= encoder_scale_;
    encoder_scale_ = 1.0;
  }
}

void Model::UpdateEncoderRow(uint32_t bucket, std::span<const double> grad,
                             double step) {
  double* row = encoder_raw_.data() + size_t{bucket} * hidden_dim_;
  const double s = step / encoder_scale_;
  for (size_t j = 0; j < hidden_dim_; ++j) row[j] -= s * grad[j];
}

double Loss(const Model& model, std::string_view task_id,
            std::span<const LabeledFeatures> batch) {
  if (batch.empty()) return 0.0;
  const TaskHead& head = model.Head(task_id);
  double total = 0.0;
  for (const auto& ex : batch) {
    std::vector<double> p = Logits(head, model.Encode(ex.x));
    Softmax(p);
    total -= std::log(std::max(p[ex.label], 1e-300));
  }
  return total / static_cast<double>(batch.size());
}

Gradients ComputeGradients(const Model& model, std::string_view task_id,
                           std::span<const LabeledFeatures> batch) {
  const TaskHead& head = model.Head(task_id);
  const size_t d = model.hidden_dim();
  const size_t labels = head.label_count;
  Gradients g;
  g.head_weight.assign(labels * d, 0.0);
  g.head_bias.assign(labels, 0.0);
  if (batch.empty()) return g;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  std::map<uint32_t, std::vector<double>> rows;
  std::vector<double> dz(d);
  for (const auto& ex : batch) {
    const std::vector<double> z = Preactivation(model, ex.x);
    std::vector<double> h(d);
    for (size_t j = 0; j < d; ++j) h[j] = std::max(z[j], 0.0);
    std::vector<double> p = Logits(head, h);
    Softmax(p);
    g.loss -= std::log(std::max(p[ex.label], 1e-300)) * inv_n;

    std::fill(dz.begin(), dz.end(), 0.0);
    for (size_t k = 0; k < labels; ++k) {
      const double delta =
          (p[k] - (static_cast<int>(k) == ex.label ? 1.0 : 0.0)) * inv_n;
      g.head_bias[k] += delta;
      double* gw = g.head_weight.data() + k * d;
      const double* w = head.weight.data() + k * d;
      for (size_t j = 0; j < d; ++j) {
        gw[j] += delta * h[j];
        dz[j] += delta * w[j];
      }
    }
    for (size_t j = 0; j < d; ++j) {
      if (z[j] <= 0.0) dz[j] = 0.0;
    }
    for (size_t n = 0; n < ex.x.nnz(); ++n) {
      auto& row = rows[ex.x.index[n]];
      if (row.empty()) row.assign(d, 0.0);
      const double xv = ex.x.value[n];
      for (size_t j = 0; j < d; ++j) row[j] += xv * dz[j];
    }
  }
  g.encoder_buckets.reserve(rows.size());
  g.encoder_rows.reserve(rows.size());
  for (auto& [bucket, row] : rows) {
    g.encoder_buckets.push_back(bucket);
    g.encoder_rows.push_back(std::move(row));
  }
  return g;
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, "train config: " + why);
  };
  if (epochs <= 0) fail("epochs must be positive");
  if (batch_size <= 0) fail("batch_size must be positive");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    fail("warmup_fraction must be in [0, 1)");
  }
  if (early_stop_patience <= 0) fail("early_stop_patience must be positive");
  if (!(encoder_lr_scale >= 0.0)) fail("encoder_lr_scale must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    fail("adam betas must be in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be positive");
  if (bucket_count == 0 || hidden_dim == 0) fail("bad model dimensions");
}

double ScheduledRate(const TrainConfig& cfg, int64_t step,
                     int64_t total_steps) {
  if (total_steps <= 0) return 0.0;
  const auto warmup = static_cast<int64_t>(
      std::floor(cfg.warmup_fraction * static_cast<double>(total_steps)));
  if (step < warmup) {
    return cfg.learning_rate * static_cast<double>(step + 1) /
           static_cast<double>(warmup);
  }
  const int64_t remaining = std::max<int64_t>(0, total_steps - step);
  return cfg.learning_rate * static_cast<double>(remaining) /
         static_cast<double>(total_steps - warmup);
}

double ApplyStep(Model& model, OptimizerState& state, std::string_view task_id,
                 std::span<const LabeledFeatures> batch, double rate,
                 const TrainConfig& cfg) {
  const Gradients g = ComputeGradients(model, task_id, batch);
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double eps = cfg.adam_epsilon;

  TaskHead& head = model.MutableHead(task_id);
  const size_t nw = head.weight.size();
  auto it = state.heads.find(task_id);
  if (it == state.heads.end()) {
    it = state.heads.emplace(std::string(task_id), AdamMoments{}).first;
  }
  AdamMoments& hm = it->second;
  if (hm.m.empty()) {
    hm.m.assign(nw + head.bias.size(), 0.0);
    hm.v.assign(nw + head.bias.size(), 0.0);
  }
  ++hm.step;
  const double hc1 = 1.0 - std::pow(b1, static_cast<double>(hm.step));
  const double hc2 = 1.0 - std::pow(b2, static_cast<double>(hm.step));
  auto head_update = [&](size_t i, double grad) {
    hm.m[i] = b1 * hm.m[i] + (1.0 - b1) * grad;
    hm.v[i] = b2 * hm.v[i] + (1.0 - b2) * grad * grad;
    return rate * (hm.m[i] / hc1) / (std::sqrt(hm.v[i] / hc2) + eps);
  };
  const double keep = 1.0 - rate * cfg.weight_decay;
  for (size_t i = 0; i < nw; ++i) {
    head.weight[i] = head.weight[i] * keep - head_update(i, g.head_weight[i]);
  }
  for (size_t k = 0; k < head.bias.size(); ++k) {
    head.bias[k] -= head_update(nw + k, g.head_bias[k]);
  }

  const double enc_rate = rate * cfg.encoder_lr_scale;
  if (enc_rate == 0.0) return g.loss;
  ++state.encoder_step;
  const double ec1 = 1.0 - std::pow(b1, static_cast<double>(state.encoder_step));
  const double ec2 = 1.0 - std::pow(b2, static_cast<double>(state.encoder_step));
  model.DecayEncoder(enc_rate * cfg.weight_decay);
  const size_t d = model.hidden_dim();
  std::vector<double> direction(d);
  for (size_t r = 0; r < g.encoder_buckets.size(); ++r) {
    std::vector<double>& mv = state.encoder_rows[g.encoder_buckets[r]];
    if (mv.empty()) mv.assign(2 * d, 0.0);
    const std::vector<double>& grad = g.encoder_rows[r];
    for (size_t j = 0; j < d; ++j) {
      mv[j] = b1 * mv[j] + (1.0 - b1) * grad[j];
      mv[d + j] = b2 * mv[d + j] + (1.0 - b2) * grad[j] * grad[j];
      direction[j] = (mv[j] / ec1) / (std::sqrt(mv[d + j] / ec2) + eps);
    }
    model.UpdateEncoderRow(g.encoder_buckets[r], direction, enc_rate);
  }
  return g.loss;
}

std::vector<LabeledFeatures> PrepareExamples(const Dataset& dataset,
                                             const FeaturizerConfig& config) {
  std::vector<LabeledFeatures> out;
  out.reserve(dataset.size());
  for (const Example& ex : dataset.examples()) {
    if (!ex.gold) {
      throw Error(ErrorCode::kInvalidArgument,
                  "example '" + ex.id + "' has no gold label");
    }
    LabeledFeatures lf;
    lf.x = Featurize(Render(ex, dataset.task(), Perturbation::kOriginal),
                     config);
    lf.label = dataset.task().LabelIndex(*ex.gold);
    out.push_back(std::move(lf));
  }
  return out;
}

double Accuracy(const Model& model, std::string_view task_id,
                std::span<const LabeledFeatures> examples) {
  if (examples.empty()) return 0.0;
  size_t correct = 0;
  for (const auto& ex : examples) {
    if (model.PredictIndex(task_id, ex.x) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

Model TrainSingle(const TaskSpec& task, const Dataset& train,
                  const Dataset& validation, const TrainConfig& cfg,
                  TrainReport* report) {
  cfg.Validate();
  if (train.empty() || validation.empty()) {
    throw Error(ErrorCode::kEmptySplit,
                "task '" + task.task_id + "' needs train and validation data");
  }
  if (train.task().task_id != task.task_id ||
      validation.task().task_id != task.task_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "train/validation belong to a different task");
  }
  Model model(cfg.bucket_count, cfg.hidden_dim);
  model.AddHead(task.task_id, task.labels.size());
  model.InitEncoder(DeriveSeed(cfg.seed, "encoder"));
  model.InitHead(task.task_id, DeriveSeed(cfg.seed, HeadStream(task.task_id)));

  TaskTrack track(task.task_id, PrepareExamples(train, model.featurizer()),
                  cfg.seed, cfg);
  const auto val = PrepareExamples(validation, model.featurizer());
  OptimizerState state;
  Selector selector(cfg.early_stop_patience, report);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const size_t batches = track.BeginEpoch(cfg);
    double loss = 0.0;
    for (size_t b = 0; b < batches; ++b) {
      loss += track.RunBatch(model, state, cfg);
    }
    loss /= static_cast<double>(batches);
    if (!selector.Observe(model, Accuracy(model, task.task_id, val), loss)) {
      break;
    }
  }
  return selector.Take();
}

MultitaskMode ParseMultitaskMode(std::string_view name) {
  const std::string lower = NormalizeLabel(name);
  if (lower == "para") return MultitaskMode::kPara;
  if (lower == "all") return MultitaskMode::kAll;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown multitask mode '" + std::string(name) + "'");
}

std::vector<std::string> AuxTasksFor(const TaskRegistry& registry,
                                     std::string_view main_task,
                                     MultitaskMode mode) {
  registry.Get(main_task);
  std::vector<std::string> aux;
  const auto ids = mode == MultitaskMode::kPara ? registry.StsTaskIds()
                                                : registry.TaskIds();
  for (const auto& id : ids) {
    if (id != main_task) aux.push_back(id);
  }
  return aux;
}

Model TrainMultitask(const TaskRegistry& registry, std::string_view main_task,
                     std::span<const std::string> aux_tasks,
                     const std::map<std::string, TaskData>& data,
                     const TrainConfig& cfg, MultitaskMode mode,
                     TrainReport* report) {
  cfg.Validate();
  const TaskSpec& main_spec = registry.Get(main_task);
  for (const auto& id : aux_tasks) registry.Get(id);

  std::vector<std::string> wanted = AuxTasksFor(registry, main_task, mode);
  std::vector<std::string> given(aux_tasks.begin(), aux_tasks.end());
  std::sort(wanted.begin(), wanted.end());
  std::sort(given.begin(), given.end());
  if (wanted != given) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(mode == MultitaskMode::kPara ? "PARA" : "ALL") +
                    " mode requires auxiliary tasks to be exactly the "
                    "mode's registered task set");
  }

  std::vector<std::string> task_ids = {std::string(main_task)};
  task_ids.insert(task_ids.end(), aux_tasks.begin(), aux_tasks.end());

  Model model(cfg.bucket_count, cfg.hidden_dim);
  for (const auto& id : task_ids) {
    model.AddHead(id, registry.Get(id).labels.size());
  }
  model.InitEncoder(DeriveSeed(cfg.seed, "encoder"));
  for (const auto& id : task_ids) {
    model.InitHead(id, DeriveSeed(cfg.seed, HeadStream(id)));
  }

  std::vector<TaskTrack> tracks;
  tracks.reserve(task_ids.size());
  for (const auto& id : task_ids) {
    const auto it = data.find(id);
    if (it == data.end() || it->second.train == nullptr) {
      throw Error(ErrorCode::kUnknownTask, "no training data for '" + id + "'");
    }
    const Dataset& train = *it->second.train;
    if (train.empty()) {
      throw Error(ErrorCode::kEmptySplit, "empty training split for '" + id +
                                              "'");
    }
    if (train.task().task_id != id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "training data for '" + id + "' belongs to another task");
    }
    tracks.emplace_back(id, PrepareExamples(train, model.featurizer()),
                        cfg.seed, cfg);
  }
  const TaskData& main_data = data.at(std::string(main_task));
  if (main_data.validation == nullptr || main_data.validation->empty()) {
    throw Error(ErrorCode::kEmptySplit,
                "main task '" + main_spec.task_id + "' needs validation data");
  }
  const auto val = PrepareExamples(*main_data.validation, model.featurizer());

  Rng mixer(DeriveSeed(cfg.seed, "mix"));
  OptimizerState state;
  Selector selector(cfg.early_stop_patience, report);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // One slot per batch, holding the track that runs there.
    std::vector<size_t> schedule;
    for (size_t t = 0; t < tracks.size(); ++t) {
      schedule.insert(schedule.end(), tracks[t].BeginEpoch(cfg), t);
    }
    mixer.Shuffle(std::span(schedule));
    double main_loss = 0.0;
    size_t main_batches = 0;
    for (const size_t t : schedule) {
      const double loss = tracks[t].RunBatch(model, state, cfg);
      if (t == 0) {
        main_loss += loss;
        ++main_batches;
      }
    }
    main_loss /= static_cast<double>(std::max<size_t>(1, main_batches));
    if (!selector.Observe(model, Accuracy(model, main_task, val), main_loss)) {
      break;
    }
  }
  return selector.Take();
}

std::vector<PredictionOutcome> RefModelBackend::ClassifyBatch(
    const TaskSpec& task, std::span<const RenderedInput> inputs) const {
  std::vector<PredictionOutcome> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) out.push_back(model_->Predict(task, input));
  return out;
}

}  // namespace calum::refmodel
