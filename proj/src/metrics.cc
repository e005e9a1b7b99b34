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

#include "calum/metrics.h"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "json.hpp"

namespace calum {
namespace {

using json = nlohmann::json;

constexpr double kBetaTolerance = 1e-12;
constexpr int kBetaMaxIterations = 300;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), modified Lentz.
double BetaContinuedFraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kBetaMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kBetaTolerance) return h;
  }
  throw Error(ErrorCode::kNumerical,
              "incomplete beta continued fraction did not converge");
}

double SumSquaredDeviation(std::span<const double> values, double mean) {
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return ss;
}

double Mean(std::span<const double> values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

json StatJson(const Stat& s) {
  return {{"mean", s.mean}, {"std", s.std ? json(*s.std) : json(nullptr)}};
}

std::optional<Stat> OptionalStat(std::span<const RunMetrics> runs,
                                 std::optional<double> RunMetrics::*field) {
  std::vector<double> values;
  for (const auto& r : runs) {
    if (r.*field) values.push_back(*(r.*field));
  }
  if (values.empty()) return std::nullopt;
  return Summarize(values);
}

std::string PerturbationKey(Perturbation p) {
  return std::string(PerturbationName(p));
}

}  // namespace

size_t PredictionVector::CountUnparseable() const {
  size_t n = 0;
  for (const auto& [id, outcome] : entries) {
    if (!outcome.is_label()) ++n;
  }
  return n;
}

double Accuracy(const PredictionVector& preds, const Dataset& gold) {
  if (preds.size() != gold.size()) {
    throw Error(ErrorCode::kIdMismatch,
                std::to_string(preds.size()) + " predictions for " +
                    std::to_string(gold.size()) + " examples");
  }
  std::unordered_map<std::string_view, const Example*> by_id;
  for (const Example& ex : gold.examples()) by_id.emplace(ex.id, &ex);
  if (preds.size() == 0) return 0.0;
  size_t correct = 0;
  std::unordered_map<std::string_view, bool> seen;
  for (const auto& [id, outcome] : preds.entries) {
    const auto it = by_id.find(id);
    if (it == by_id.end() || !seen.emplace(id, true).second) {
      throw Error(ErrorCode::kIdMismatch, "unexpected prediction id '" + id +
                                              "'");
    }
    const Example& ex = *it->second;
    if (!ex.gold) {
      throw Error(ErrorCode::kInvalidArgument,
                  "example '" + ex.id + "' has no gold label");
    }
    if (outcome.is_label() && outcome.text() == *ex.gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double Consistency(const PredictionVector& a, const PredictionVector& b) {
  if (a.task_id != b.task_id) {
    throw Error(ErrorCode::kIdMismatch, "tasks differ: '" + a.task_id +
                                            "' vs '" + b.task_id + "'");
  }
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kIdMismatch, "vector lengths differ");
  }
  if (a.size() == 0) return 1.0;
  size_t agree = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a.entries[i].first != b.entries[i].first) {
      throw Error(ErrorCode::kIdMismatch,
                  "id sequences differ at position " + std::to_string(i));
    }
    if (Agrees(a.entries[i].second, b.entries[i].second)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(a.size());
}

Stat Summarize(std::span<const double> values) {
  Stat s;
  if (values.empty()) return s;
  s.mean = Mean(values);
  if (values.size() >= 2) {
    s.std = std::sqrt(SumSquaredDeviation(values, s.mean) /
                      static_cast<double>(values.size() - 1));
  }
  return s;
}

AggregateMetrics Aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no runs to aggregate");
  }
  AggregateMetrics agg;
  agg.model_name = runs.front().model_name;
  agg.task_id = runs.front().task_id;
  agg.runs = static_cast<int>(runs.size());
  std::vector<double> acc;
  for (const auto& r : runs) {
    if (r.model_name != agg.model_name || r.task_id != agg.task_id) {
      throw Error(ErrorCode::kMixedKeys,
                  "runs mix (" + agg.model_name + ", " + agg.task_id +
                      ") with (" + r.model_name + ", " + r.task_id + ")");
    }
    acc.push_back(r.acc_val);
  }
  agg.acc_val = Summarize(acc);
  agg.c_reverse = OptionalStat(runs, &RunMetrics::c_reverse);
  agg.c_signal = OptionalStat(runs, &RunMetrics::c_signal);
  return agg;
}

double RegularizedIncompleteBeta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "incomplete beta needs a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(x, a, b) / a;
  }
  return 1.0 - front * BetaContinuedFraction(1.0 - x, b, a) / b;
}

TTestResult WelchTTest(std::span<const double> group_a,
                       std::span<const double> group_b) {
  if (group_a.size() < 2 || group_b.size() < 2) {
    throw Error(ErrorCode::kDegenerateGroup,
                "each group needs at least 2 values");
  }
  for (auto group : {group_a, group_b}) {
    for (const double v : group) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kDegenerateGroup, "non-finite value in group");
      }
    }
  }
  TTestResult r;
  r.n_a = group_a.size();
  r.n_b = group_b.size();
  const double na = static_cast<double>(r.n_a);
  const double nb = static_cast<double>(r.n_b);
  const double mean_a = Mean(group_a);
  const double mean_b = Mean(group_b);
  const double var_a = SumSquaredDeviation(group_a, mean_a) / (na - 1.0);
  const double var_b = SumSquaredDeviation(group_b, mean_b) / (nb - 1.0);
  const double se_a = var_a / na;
  const double se_b = var_b / nb;
  const double se = se_a + se_b;

  if (se == 0.0) {
    r.degenerate = true;
    r.df = na + nb - 2.0;
    if (mean_a == mean_b) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.t = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
    }
    return r;
  }

  r.t = (mean_a - mean_b) / std::sqrt(se);
  r.df = se * se / (se_a * se_a / (na - 1.0) + se_b * se_b / (nb - 1.0));
  const double x = r.df / (r.df + r.t * r.t);
  r.p_two_sided = std::clamp(RegularizedIncompleteBeta(x, r.df / 2.0, 0.5),
                             0.0, 1.0);
  return r;
}

PredictionVector PredictDataset(const Backend& backend, const Dataset& dataset,
                                Perturbation perturbation,
                                const DispatchOptions& dispatch) {
  std::vector<RenderedInput> inputs;
  inputs.reserve(dataset.size());
  for (const Example& ex : dataset.examples()) {
    inputs.push_back(Render(ex, dataset.task(), perturbation));
  }
  std::vector<PredictionOutcome> outcomes =
      ClassifyAll(backend, dataset.task(), inputs, dispatch);
  PredictionVector out;
  out.task_id = dataset.task().task_id;
  out.perturbation = perturbation;
  out.entries.reserve(outcomes.size());
  for (size_t i = 0; i < outcomes.size(); ++i) {
    out.entries.emplace_back(dataset[i].id, std::move(outcomes[i]));
  }
  return out;
}

std::vector<RunMetrics> EvaluateModel(const BackendFactory& factory,
                                      const std::string& model_name,
                                      const Dataset& test,
                                      const Dataset& validation,
                                      std::span<const uint64_t> seeds,
                                      const EvaluateOptions& options) {
  if (test.empty() || validation.empty()) {
    throw Error(ErrorCode::kEmptySplit,
                "evaluation needs non-empty test and validation data");
  }
  if (test.task().task_id != validation.task().task_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "test and validation belong to different tasks");
  }
  std::vector<RunMetrics> runs;
  for (size_t i = 0; i < seeds.size(); ++i) {
    try {
      const auto backend = factory(static_cast<int>(i), seeds[i]);
      const auto original =
          PredictDataset(*backend, test, Perturbation::kOriginal,
                         options.dispatch);
      const auto reverse = PredictDataset(*backend, test,
                                          Perturbation::kReverse,
                                          options.dispatch);
      const auto signal = PredictDataset(*backend, test, Perturbation::kSignal,
                                         options.dispatch);
      const auto val = PredictDataset(*backend, validation,
                                      Perturbation::kOriginal,
                                      options.dispatch);
      RunMetrics m;
      m.model_name = model_name;
      m.task_id = test.task().task_id;
      m.run_index = static_cast<int>(i);
      m.acc_val = Accuracy(val, validation);
      m.c_reverse = Consistency(original, reverse);
      m.c_signal = Consistency(original, signal);
      m.n_unparseable = {
          {PerturbationKey(Perturbation::kOriginal),
           static_cast<int>(original.CountUnparseable())},
          {PerturbationKey(Perturbation::kReverse),
           static_cast<int>(reverse.CountUnparseable())},
          {PerturbationKey(Perturbation::kSignal),
           static_cast<int>(signal.CountUnparseable())},
          {"validation", static_cast<int>(val.CountUnparseable())},
      };
      runs.push_back(std::move(m));
    } catch (const Error& e) {
      throw EvaluationAborted(e.code(),
                              "run " + std::to_string(i) + ": " + e.message(),
                              std::move(runs));
    }
  }
  return runs;
}

std::string MetricsToJson(std::span<const RunMetrics> runs) {
  const AggregateMetrics agg = Aggregate(runs);
  json run_list = json::array();
  for (const auto& r : runs) {
    json unparseable = json::object();
    for (const auto& [k, v] : r.n_unparseable) unparseable[k] = v;
    run_list.push_back({
        {"run_index", r.run_index},
        {"acc_val", r.acc_val},
        {"c_reverse", r.c_reverse ? json(*r.c_reverse) : json(nullptr)},
        {"c_signal", r.c_signal ? json(*r.c_signal) : json(nullptr)},
        {"n_unparseable", unparseable},
    });
  }
  json aggregate = {
      {"runs", agg.runs},
      {"acc_val", StatJson(agg.acc_val)},
      {"c_reverse", agg.c_reverse ? StatJson(*agg.c_reverse) : json(nullptr)},
      {"c_signal", agg.c_signal ? StatJson(*agg.c_signal) : json(nullptr)},
  };
  json doc = {{"model", agg.model_name},
              {"task", agg.task_id},
              {"runs", run_list},
              {"aggregate", aggregate}};
  return doc.dump(2) + "\n";
}

std::vector<RunMetrics> MetricsFromJson(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "metrics file is not a JSON object");
  }
  std::vector<RunMetrics> runs;
  try {
    const std::string model = doc.at("model").get<std::string>();
    const std::string task = doc.at("task").get<std::string>();
    int index = 0;
    for (const json& r : doc.at("runs")) {
      RunMetrics m;
      m.model_name = model;
      m.task_id = task;
      m.run_index = r.value("run_index", index);
      m.acc_val = r.at("acc_val").get<double>();
      if (r.contains("c_reverse") && !r["c_reverse"].is_null()) {
        m.c_reverse = r["c_reverse"].get<double>();
      }
      if (r.contains("c_signal") && !r["c_signal"].is_null()) {
        m.c_signal = r["c_signal"].get<double>();
      }
      if (r.contains("n_unparseable")) {
        for (const auto& [k, v] : r["n_unparseable"].items()) {
          m.n_unparseable[k] = v.get<int>();
        }
      }
      runs.push_back(std::move(m));
      ++index;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("malformed metrics file: ") + e.what());
  }
  if (runs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "metrics file has no runs");
  }
  return runs;
}

}  // namespace calum
