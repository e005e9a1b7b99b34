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


// Python bindings: perturbation rendering, metrics, the Welch test, stub
// labels and stub evaluation over dataset files.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "calum/backend.h"
#include "calum/corpus.h"
#include "calum/error.h"
#include "calum/metrics.h"
#include "calum/perturb.h"
#include "calum/report.h"

namespace py = pybind11;

namespace calum {
namespace {

const TaskRegistry& Registry() {
  static const TaskRegistry registry = TaskRegistry::FromEnvironment();
  return registry;
}

py::dict Rendered(const RenderedInput& r) {
  py::dict d;
  d["segment_a"] = r.segment_a;
  d["segment_b"] = r.segment_b;
  d["joined"] = r.joined;
  return d;
}

// None stands for an unparseable prediction.
PredictionVector ToVector(const std::vector<std::optional<std::string>>& v) {
  PredictionVector out{"", Perturbation::kOriginal, {}};
  for (size_t i = 0; i < v.size(); ++i) {
    out.entries.emplace_back(std::to_string(i),
                             v[i] ? PredictionOutcome::Label(*v[i])
                                  : PredictionOutcome::Unparseable(""));
  }
  return out;
}

std::string EvaluateStub(const std::string& kind, const std::string& task_id,
                         const std::string& test_path,
                         const std::string& val_path, int runs,
                         uint64_t seed) {
  const TaskSpec& task = Registry().Get(task_id);
  const Dataset test = LoadDataset(test_path, task, Split::kTest);
  const Dataset val = LoadDataset(val_path, task, Split::kValidation);
  const BackendDescriptor d = ParseBackendDescriptor(
      "kind=" + kind + ",seed=" + std::to_string(seed));
  const std::vector<uint64_t> seeds = RunSeeds(d, runs);
  const auto metrics = EvaluateModel(
      [&](int run, uint64_t s) { return MakeBackend(d, run, s); },
      DescriptorModelName(d), test, val, seeds);
  return MetricsToJson(metrics);
}

}  // namespace
}  // namespace calum

PYBIND11_MODULE(_calum, m) {
  using namespace calum;
  m.doc() = "Consistency evaluation harness";

  py::register_exception<Error>(m, "CalumError", PyExc_ValueError);

  m.def("task_ids", [] {
    std::vector<std::string> ids;
    for (const auto& t : Registry().tasks()) ids.push_back(t.task_id);
    return ids;
  });
  m.def("task_labels",
        [](const std::string& task) { return Registry().Get(task).labels; });
  m.def(
      "render",
      [](const std::string& task, const std::string& a, const std::string& b,
         const std::string& perturbation) {
        return Rendered(Render(Example{"x", a, b, std::nullopt},
                               Registry().Get(task),
                               ParsePerturbation(perturbation)));
      },
      py::arg("task"), py::arg("sentence_a"), py::arg("sentence_b"),
      py::arg("perturbation") = "original");
  m.def(
      "render_seq2seq",
      [](const std::string& task, const std::string& a, const std::string& b,
         const std::string& perturbation) {
        return RenderSeq2Seq(Example{"x", a, b, std::nullopt},
                             Registry().Get(task),
                             ParsePerturbation(perturbation));
      },
      py::arg("task"), py::arg("sentence_a"), py::arg("sentence_b"),
      py::arg("perturbation") = "original");
  m.def(
      "parse_generated_label",
      [](const std::string& raw,
         const std::string& task) -> std::optional<std::string> {
        const PredictionOutcome o =
            ParseGeneratedLabel(raw, Registry().Get(task));
        if (!o.is_label()) return std::nullopt;
        return o.text();
      },
      py::arg("raw"), py::arg("task"));
  m.def(
      "consistency",
      [](const std::vector<std::optional<std::string>>& a,
         const std::vector<std::optional<std::string>>& b) {
        return Consistency(ToVector(a), ToVector(b));
      },
      "Fraction of positions where both predictions are the same label. "
      "None marks an unparseable prediction.");
  m.def(
      "welch_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const TTestResult r = WelchTTest(a, b);
        py::dict d;
        d["t"] = r.t;
        d["df"] = r.df;
        d["p_two_sided"] = r.p_two_sided;
        d["degenerate"] = r.degenerate;
        return d;
      },
      py::arg("a"), py::arg("b"));
  m.def("format_percent", &FormatPercent, py::arg("fraction"));
  m.def(
      "stub_label",
      [](const std::string& kind, const std::string& task,
         const std::string& a, const std::string& b, uint64_t seed) {
        const TaskSpec& spec = Registry().Get(task);
        const RenderedInput r =
            Render(Example{"x", a, b, std::nullopt}, spec,
                   Perturbation::kOriginal);
        const BackendDescriptor d = ParseBackendDescriptor("kind=" + kind);
        if (d.kind == BackendKind::kStubSymmetric) {
          return StubSymmetricLabel(spec, {a, b}, seed);
        }
        if (d.kind == BackendKind::kStubOrderSensitive) {
          return StubOrderSensitiveLabel(spec, r.joined, seed);
        }
        throw Error(ErrorCode::kInvalidArgument, "not a stub kind: " + kind);
      },
      py::arg("kind"), py::arg("task"), py::arg("sentence_a"),
      py::arg("sentence_b"), py::arg("seed") = 0);
  m.def("evaluate_stub", &EvaluateStub, py::arg("kind"), py::arg("task"),
        py::arg("test"), py::arg("val"), py::arg("runs") = 1,
        py::arg("seed") = 0,
        "Runs a stub backend over TSV/JSONL files and returns the metrics "
        "JSON document.");
}
