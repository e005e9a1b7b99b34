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


// Toy datasets and random model instances shared by the unit and acceptance
// tests.

#ifndef CALUM_TESTS_COMMON_TOY_MODELS_H_
#define CALUM_TESTS_COMMON_TOY_MODELS_H_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "calum/corpus.h"
#include "calum/refmodel.h"
#include "calum/rng.h"

namespace calum::testing {

using refmodel::LabeledFeatures;
using refmodel::Model;

// Three noisy classes: each token is a class word with probability 0.6 and
// a shared filler otherwise.
inline Dataset ThreeClassToy(Split split, size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<Example> ex;
  for (size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng.Below(3));
    auto sentence = [&](int words) {
      std::string s;
      for (int w = 0; w < words; ++w) {
        if (w) s += ' ';
        s += rng.Uniform() < 0.6
                 ? "c" + std::to_string(y) + "w" + std::to_string(rng.Below(5))
                 : "n" + std::to_string(rng.Below(20));
      }
      return s;
    };
    ex.push_back({"x" + std::to_string(i), sentence(3), sentence(2),
                  TaskRegistry::Builtin().Get("mnli").labels[y]});
  }
  return Dataset(TaskRegistry::Builtin().Get("mnli"), split, ex);
}

struct Instance {
  Model model;
  std::vector<LabeledFeatures> batch;
};

// Random small model and batch whose hidden pre-activations all stay clear
// of the ReLU kink, so central differences are valid.
inline Instance RandomInstance(Rng& gen) {
  for (;;) {
    Model model(32, 4);
    model.AddHead("mnli", 3);
    model.InitEncoder(gen.Next());
    model.InitHead("mnli", gen.Next());
    refmodel::TaskHead& head = model.MutableHead("mnli");
    for (auto& b : head.bias) b = gen.Uniform(-0.5, 0.5);
    std::vector<LabeledFeatures> batch;
    const size_t n = 1 + gen.Below(4);
    for (size_t i = 0; i < n; ++i) {
      LabeledFeatures lf;
      for (uint32_t k = 0; k < 32; ++k) {
        if (gen.Below(4) == 0) {
          lf.x.index.push_back(k);
          lf.x.value.push_back(gen.Uniform(-1, 1));
        }
      }
      lf.label = static_cast<int>(gen.Below(3));
      batch.push_back(std::move(lf));
    }
    bool clear = true;
    for (const auto& lf : batch) {
      for (size_t j = 0; j < 4; ++j) {
        double z = 0;
        for (size_t k = 0; k < lf.x.nnz(); ++k) {
          z += model.EncoderWeight(lf.x.index[k], j) * lf.x.value[k];
        }
        if (std::abs(z) < 1e-4) clear = false;
      }
    }
    if (clear) return {std::move(model), std::move(batch)};
  }
}

inline double RelativeError(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

// Largest relative error between analytic and central-difference gradients
// over every encoder row touched by the batch and every head parameter.
inline double WorstGradientError(Instance& inst, double step = 1e-5) {
  Model& m = inst.model;
  const refmodel::Gradients g =
      refmodel::ComputeGradients(m, "mnli", inst.batch);
  auto numeric = [&](auto get, auto set) {
    const double orig = get();
    set(orig + step);
    const double up = refmodel::Loss(m, "mnli", inst.batch);
    set(orig - step);
    const double down = refmodel::Loss(m, "mnli", inst.batch);
    set(orig);
    return (up - down) / (2 * step);
  };
  double worst = 0;
  for (size_t r = 0; r < g.encoder_buckets.size(); ++r) {
    const uint32_t bucket = g.encoder_buckets[r];
    for (size_t j = 0; j < m.hidden_dim(); ++j) {
      const double n =
          numeric([&] { return m.EncoderWeight(bucket, j); },
                  [&](double v) { m.SetEncoderWeight(bucket, j, v); });
      worst = std::max(worst, RelativeError(g.encoder_rows[r][j], n));
    }
  }
  refmodel::TaskHead& head = m.MutableHead("mnli");
  for (size_t k = 0; k < head.weight.size(); ++k) {
    const double n = numeric([&] { return head.weight[k]; },
                             [&](double v) { head.weight[k] = v; });
    worst = std::max(worst, RelativeError(g.head_weight[k], n));
  }
  for (size_t k = 0; k < head.bias.size(); ++k) {
    const double n = numeric([&] { return head.bias[k]; },
                             [&](double v) { head.bias[k] = v; });
    worst = std::max(worst, RelativeError(g.head_bias[k], n));
  }
  return worst;
}

}  // namespace calum::testing

#endif  // CALUM_TESTS_COMMON_TOY_MODELS_H_
