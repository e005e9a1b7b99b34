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

#ifndef CALUM_METRICS_H_
#define CALUM_METRICS_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "calum/backend.h"
#include "calum/corpus.h"
#include "calum/error.h"
#include "calum/perturb.h"

namespace calum {

struct PredictionVector {
  std::string task_id;
  Perturbation perturbation = Perturbation::kOriginal;
  std::vector<std::pair<std::string, PredictionOutcome>> entries;

  size_t size() const { return entries.size(); }
  size_t CountUnparseable() const;
};

// Fraction of examples predicted as their gold label. Unparseable counts as
// wrong. Throws kIdMismatch unless the id sets are equal.
double Accuracy(const PredictionVector& preds, const Dataset& gold);

// Fraction of positions where both outcomes agree (see Agrees()). Throws
// kIdMismatch unless the tasks match and the id sequences are identical.
// Empty vectors have consistency 1.
double Consistency(const PredictionVector& a, const PredictionVector& b);

struct RunMetrics {
  std::string model_name;
  std::string task_id;
  int run_index = 0;
  double acc_val = 0.0;
  std::optional<double> c_reverse;
  std::optional<double> c_signal;
  // Keyed by "original", "reverse", "signal", "validation".
  std::map<std::string, int> n_unparseable;
};

struct Stat {
  double mean = 0.0;
  std::optional<double> std;  // sample (n-1) deviation, only for n >= 2
};

struct AggregateMetrics {
  std::string model_name;
  std::string task_id;
  int runs = 0;
  Stat acc_val;
  std::optional<Stat> c_reverse;
  std::optional<Stat> c_signal;
};

Stat Summarize(std::span<const double> values);

// Mean and sample standard deviation per field. Throws kMixedKeys when the
// runs disagree on (model, task), kInvalidArgument when empty.
AggregateMetrics Aggregate(std::span<const RunMetrics> runs);

// I_x(a, b) by Lentz's continued fraction (tolerance 1e-12, at most 300
// iterations), using the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) where that
// converges faster. Throws kNumerical if the fraction does not converge.
double RegularizedIncompleteBeta(double x, double a, double b);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  size_t n_a = 0;
  size_t n_b = 0;
  // Both groups have zero variance; p is 1 (equal means) or 0 by convention
  // and df is n_a + n_b - 2.
  bool degenerate = false;
};

// Welch's unequal-variance t-test. p = I_{df/(df+t^2)}(df/2, 1/2).
// Throws kDegenerateGroup when a group has fewer than 2 values or a value
// is not finite.
TTestResult WelchTTest(std::span<const double> group_a,
                       std::span<const double> group_b);

using BackendFactory =
    std::function<std::unique_ptr<Backend>(int run_index, uint64_t seed)>;

struct EvaluateOptions {
  DispatchOptions dispatch;
};

// Thrown by EvaluateModel when a backend fails; carries the runs that
// completed before the failure.
class EvaluationAborted : public Error {
 public:
  EvaluationAborted(ErrorCode code, const std::string& message,
                    std::vector<RunMetrics> completed)
      : Error(code, message), completed_(std::move(completed)) {}
  const std::vector<RunMetrics>& completed() const { return completed_; }

 private:
  std::vector<RunMetrics> completed_;
};

// Predictions of one backend over a dataset under one perturbation.
PredictionVector PredictDataset(const Backend& backend, const Dataset& dataset,
                                Perturbation perturbation,
                                const DispatchOptions& dispatch = {});

// For each seed: obtains a backend, predicts ORIGINAL/REVERSE/SIGNAL over
// `test` and ORIGINAL over `validation`, and records one RunMetrics.
// Requests go out in that order.
std::vector<RunMetrics> EvaluateModel(const BackendFactory& factory,
                                      const std::string& model_name,
                                      const Dataset& test,
                                      const Dataset& validation,
                                      std::span<const uint64_t> seeds,
                                      const EvaluateOptions& options = {});

// {"model", "task", "runs": [...], "aggregate": {...}}; 2-space indent,
// trailing newline. Missing consistency values are null.
std::string MetricsToJson(std::span<const RunMetrics> runs);
std::vector<RunMetrics> MetricsFromJson(std::string_view text);

}  // namespace calum

#endif  // CALUM_METRICS_H_
