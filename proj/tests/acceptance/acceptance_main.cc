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


// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//
// Usage: calum_acceptance DATA_DIR

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "calum/backend.h"
#include "calum/humankit.h"
#include "calum/metrics.h"
#include "calum/perturb.h"
#include "calum/refmodel.h"
#include "calum/report.h"
#include "calum/synth.h"
#include "calum/text.h"
#include "quadrature_oracle.h"
#include "toy_models.h"

namespace calum {
namespace {

// Pinned thresholds.
constexpr double kPerturbSeconds = 1.0;
constexpr double kWelchTolerance = 1e-9;
constexpr double kBetaIdentityTolerance = 1e-12;
constexpr double kGradientTolerance = 1e-4;
constexpr double kMultitaskSeconds = 60.0;
constexpr int kMultitaskSeeds = 5;
// Order-sensitive stub at seed 0 on mnli_fixture_test.tsv, counted by
// tests/oracles/prng_oracle.py.
constexpr double kOrderSensitiveFixtureCReverse = 348.0 / 1000.0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string data_dir;

std::string Data(const std::string& rel) { return data_dir + "/" + rel; }

const TaskRegistry& Registry() {
  static const TaskRegistry r = TaskRegistry::Builtin();
  return r;
}

template <typename... Args>
std::string Str(const Args&... args) {
  std::ostringstream out;
  out.precision(6);
  (out << ... << args);
  return out.str();
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

Outcome PerturbationLaws() {
  const TaskSpec& task = Registry().Get("mnli");
  const Dataset ds =
      LoadTsv(Data("mnli_fixture_test.tsv"), task, Split::kTest);
  const auto start = std::chrono::steady_clock::now();
  size_t failures = 0;
  for (const Example& ex : ds.examples()) {
    const RenderedInput o = Render(ex, task, Perturbation::kOriginal);
    const RenderedInput r = Render(ex, task, Perturbation::kReverse);
    const RenderedInput s = Render(ex, task, Perturbation::kSignal);
    const std::pair content(ex.sentence_a, ex.sentence_b);
    const bool ok = SwapSegments(SwapSegments(o)) == o &&
                    SwapSegments(r).segment_a == o.segment_a &&
                    SwapSegments(r).segment_b == o.segment_b &&
                    SwapSegments(r).joined == o.joined &&
                    StripIndicators(o, task) == content &&
                    StripIndicators(s, task) == content &&
                    StripIndicators(r, task) ==
                        std::pair(ex.sentence_b, ex.sentence_a);
    if (!ok) ++failures;
  }
  const double secs = Seconds(start);
  return {ds.size() == 1000 && failures == 0 && secs < kPerturbSeconds,
          Str(ds.size(), " examples, ", failures, " violations, ", secs,
              " s")};
}

// Alphabet: two labels plus Unparseable.
PredictionOutcome Symbol(int s) {
  if (s == 0) return PredictionOutcome::Label("entailment");
  if (s == 1) return PredictionOutcome::Label("not_entailment");
  return PredictionOutcome::Unparseable("<junk>");
}

PredictionVector Vec(const std::vector<int>& v) {
  PredictionVector out{"rte", Perturbation::kOriginal, {}};
  for (size_t i = 0; i < v.size(); ++i) {
    out.entries.emplace_back("id" + std::to_string(i), Symbol(v[i]));
  }
  return out;
}

Dataset Gold(const std::vector<int>& g) {
  std::vector<Example> ex;
  for (size_t i = 0; i < g.size(); ++i) {
    ex.push_back({"id" + std::to_string(i), "a", "b", Symbol(g[i]).text()});
  }
  return Dataset(Registry().Get("rte"), Split::kValidation, ex);
}

double NaiveConsistency(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty()) return 1.0;
  int agree = 0;
  for (size_t i = 0; i < a.size(); ++i) agree += (a[i] == b[i] && a[i] != 2);
  return static_cast<double>(agree) / static_cast<double>(a.size());
}

double NaiveAccuracy(const std::vector<int>& p, const std::vector<int>& g) {
  int right = 0;
  for (size_t i = 0; i < p.size(); ++i) right += (p[i] == g[i]);
  return static_cast<double>(right) / static_cast<double>(p.size());
}

std::vector<std::vector<int>> AllVectors(size_t len, int alphabet) {
  std::vector<std::vector<int>> out = {{}};
  for (size_t k = 0; k < len; ++k) {
    std::vector<std::vector<int>> next;
    for (const auto& v : out) {
      for (int s = 0; s < alphabet; ++s) {
        next.push_back(v);
        next.back().push_back(s);
      }
    }
    out = std::move(next);
  }
  return out;
}

Outcome MetricOracles() {
  size_t checks = 0;
  size_t mismatches = 0;
  for (size_t len = 0; len <= 4; ++len) {
    const auto vecs = AllVectors(len, 3);
    for (const auto& a : vecs) {
      for (const auto& b : vecs) {
        ++checks;
        if (Consistency(Vec(a), Vec(b)) != NaiveConsistency(a, b)) ++mismatches;
      }
      if (len == 0) continue;
      for (const auto& g : AllVectors(len, 2)) {
        ++checks;
        if (Accuracy(Vec(a), Gold(g)) != NaiveAccuracy(a, g)) ++mismatches;
      }
    }
  }
  Rng gen(20);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> a(20), b(20), g(20);
    for (int i = 0; i < 20; ++i) {
      a[i] = static_cast<int>(gen.Below(3));
      b[i] = static_cast<int>(gen.Below(3));
      g[i] = static_cast<int>(gen.Below(2));
    }
    checks += 2;
    if (Consistency(Vec(a), Vec(b)) != NaiveConsistency(a, b)) ++mismatches;
    if (Accuracy(Vec(a), Gold(g)) != NaiveAccuracy(a, g)) ++mismatches;
  }
  return {mismatches == 0, Str(checks, " comparisons, ", mismatches,
                               " mismatches")};
}

std::vector<double> RandomGroup(Rng& gen) {
  const size_t n = 2 + gen.Below(9);
  const double center = gen.Uniform(-1, 1);
  const double spread = std::exp(gen.Uniform(-4, 2));
  std::vector<double> g(n);
  for (auto& x : g) x = center + spread * gen.Uniform(-1, 1);
  return g;
}

Outcome Statistics() {
  Rng gen(77);
  double worst_p = 0;
  bool antisymmetric = true;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = RandomGroup(gen);
    const auto b = RandomGroup(gen);
    const TTestResult ab = WelchTTest(a, b);
    const TTestResult ba = WelchTTest(b, a);
    const testing::WelchOracle o = testing::WelchByQuadrature(a, b);
    worst_p = std::max(worst_p, std::abs(ab.p_two_sided - o.p));
    antisymmetric = antisymmetric && ab.t == -ba.t;
  }
  Rng beta_gen(80);
  double worst_identity = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = beta_gen.Uniform();
    const double a = std::exp(beta_gen.Uniform(-2, 4));
    const double b = std::exp(beta_gen.Uniform(-2, 4));
    worst_identity = std::max(
        worst_identity, std::abs(RegularizedIncompleteBeta(x, a, b) +
                                 RegularizedIncompleteBeta(1 - x, b, a) - 1));
  }
  return {worst_p <= kWelchTolerance &&
              worst_identity <= kBetaIdentityTolerance && antisymmetric,
          Str("max |p - quadrature| ", worst_p, ", max identity error ",
              worst_identity, ", antisymmetry ",
              antisymmetric ? "exact" : "broken")};
}

Outcome StubSanity() {
  const TaskSpec& task = Registry().Get("mnli");
  const Dataset test =
      LoadTsv(Data("mnli_fixture_test.tsv"), task, Split::kTest);
  const Dataset val =
      LoadTsv(Data("mnli_fixture_val.tsv"), task, Split::kValidation);
  const std::vector<uint64_t> seeds = {0, 1, 2};
  const auto sym = EvaluateModel(
      [](int, uint64_t s) { return std::make_unique<SymmetricStub>(s); },
      "stub-symmetric", test, val, seeds);
  bool sym_ok = true;
  for (const auto& r : sym) {
    sym_ok = sym_ok && FormatPercent(*r.c_reverse) == "100.0" &&
             FormatPercent(*r.c_signal) == "100.0";
  }
  // A second dataset: the rte fixture.
  const Dataset rte = LoadTsv(Data("rte_fixture_val.tsv"), Registry().Get("rte"),
                              Split::kValidation);
  for (const auto& r : EvaluateModel(
           [](int, uint64_t s) { return std::make_unique<SymmetricStub>(s); },
           "stub-symmetric", rte, rte, seeds)) {
    sym_ok = sym_ok && *r.c_reverse == 1.0 && *r.c_signal == 1.0;
  }
  const std::vector<uint64_t> zero = {0};
  const auto ord = EvaluateModel(
      [](int, uint64_t s) { return std::make_unique<OrderSensitiveStub>(s); },
      "stub-order-sensitive", test, val, zero);
  const double cr = *ord[0].c_reverse;
  return {sym_ok && cr < 1.0 && cr == kOrderSensitiveFixtureCReverse,
          Str("symmetric C_R/C_S ", sym_ok ? "100.0" : "not 100.0",
              ", order-sensitive C_R ", FormatPercent(cr), " (frozen ",
              FormatPercent(kOrderSensitiveFixtureCReverse), ")")};
}

refmodel::TrainConfig SmallConfig(uint64_t seed) {
  refmodel::TrainConfig cfg;
  cfg.seed = seed;
  cfg.bucket_count = uint64_t{1} << 12;
  cfg.hidden_dim = 16;
  cfg.batch_size = 8;
  return cfg;
}

Outcome RefmodelNumerics() {
  Rng gen(42);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    testing::Instance inst = testing::RandomInstance(gen);
    worst = std::max(worst, testing::WorstGradientError(inst));
  }
  const TaskSpec& mnli = Registry().Get("mnli");
  const Dataset train = testing::ThreeClassToy(Split::kTrain, 90, 5);
  const Dataset val = testing::ThreeClassToy(Split::kValidation, 30, 6);
  const bool deterministic =
      refmodel::TrainSingle(mnli, train, val, SmallConfig(3)).Serialize() ==
      refmodel::TrainSingle(mnli, train, val, SmallConfig(3)).Serialize();

  refmodel::Model m(uint64_t{1} << 12, 8);
  m.AddHead("mnli", 3);
  m.AddHead("qqp", 2);
  m.InitEncoder(1);
  m.InitHead("mnli", 2);
  m.InitHead("qqp", 3);
  const auto batch = refmodel::PrepareExamples(train, m.featurizer());
  auto qqp_batch = batch;
  for (auto& lf : qqp_batch) lf.label %= 2;
  refmodel::OptimizerState state;
  const refmodel::TrainConfig cfg = SmallConfig(0);
  refmodel::ApplyStep(m, state, "qqp", qqp_batch, 0.01, cfg);
  const refmodel::TaskHead before = m.Head("qqp");
  const refmodel::AdamMoments moments = state.heads.at("qqp");
  for (int i = 0; i < 5; ++i) {
    refmodel::ApplyStep(m, state, "mnli", batch, 0.01, cfg);
  }
  const auto& after = state.heads.at("qqp");
  const bool isolated = m.Head("qqp").weight == before.weight &&
                        m.Head("qqp").bias == before.bias &&
                        after.m == moments.m && after.v == moments.v &&
                        after.step == moments.step;
  return {worst < kGradientTolerance && deterministic && isolated,
          Str("max gradient relative error ", worst, ", deterministic ",
              deterministic ? "yes" : "no", ", head isolation ",
              isolated ? "exact" : "broken")};
}

Outcome MultitaskDirection() {
  const auto start = std::chrono::steady_clock::now();
  const TaskRegistry& reg = Registry();
  const synth::Benchmark b = synth::MakeBenchmark(reg);
  const std::string& main = b.main_task;
  const Dataset& test = b.test.at(main);
  const Dataset& val = b.validation.at(main);
  std::map<std::string, refmodel::TaskData> data;
  for (const auto& [id, d] : b.train) data[id].train = &d;
  data[main].validation = &val;
  const auto aux =
      refmodel::AuxTasksFor(reg, main, refmodel::MultitaskMode::kPara);
  double single = 0;
  double para = 0;
  for (int s = 0; s < kMultitaskSeeds; ++s) {
    refmodel::TrainConfig cfg;
    cfg.seed = static_cast<uint64_t>(s);
    auto c_reverse = [&](refmodel::Model model) {
      const refmodel::RefModelBackend be(
          std::make_shared<const refmodel::Model>(std::move(model)));
      return Consistency(PredictDataset(be, test, Perturbation::kOriginal),
                         PredictDataset(be, test, Perturbation::kReverse));
    };
    single += c_reverse(
        refmodel::TrainSingle(reg.Get(main), b.train.at(main), val, cfg));
    para += c_reverse(refmodel::TrainMultitask(reg, main, aux, data, cfg,
                                               refmodel::MultitaskMode::kPara));
  }
  single /= kMultitaskSeeds;
  para /= kMultitaskSeeds;
  const double secs = Seconds(start);
  return {para >= single && secs < kMultitaskSeconds,
          Str("mean C_R single ", FormatPercent(single), ", para ",
              FormatPercent(para), ", ", secs, " s")};
}

Outcome ReportGolden() {
  std::vector<AggregateMetrics> cells;
  for (const char* model : {"RoBERTa_base", "RoBERTa_large"}) {
    for (const char* task : {"mnli", "qnli", "rte", "qqp", "mrpc"}) {
      cells.push_back(Aggregate(MetricsFromJson(ReadFile(
          Data(std::string("report/table2/") + model + "_" + task + ".json")))));
    }
  }
  const AggregateMetrics& cell = cells.front();
  const bool values = FormatPercent(cell.acc_val.mean) == "87.2" &&
                      FormatPercent(cell.c_reverse->mean) == "60.3" &&
                      FormatPercent(cell.c_signal->mean) == "98.6";
  const bool bytes = EmitResultsTable(cells, TableFormat::kMarkdown) ==
                     ReadFile(Data("report/table2_golden.md"));
  return {values && bytes,
          Str("RoBERTa_base mnli cells ", values ? "87.2/60.3/98.6" : "wrong",
              ", table ", bytes ? "byte-identical" : "differs")};
}

Outcome Humankit() {
  const Dataset val = LoadTsv(Data("rte_fixture_val.tsv"),
                              Registry().Get("rte"), Split::kValidation);
  const std::vector<Perturbation> both = {Perturbation::kReverse,
                                          Perturbation::kSignal};
  const Packet p = BuildPacket(val, both, "ann1", 5);
  std::set<std::string> sources;
  for (const auto& item : p.items) sources.insert(item.source_example_id);
  const std::string csv = PacketCsv(p);
  size_t gold_hits = 0;
  for (const auto& label : Registry().Get("rte").labels) {
    if (csv.find(label) != std::string::npos) ++gold_hits;
  }
  const bool deterministic =
      csv == PacketCsv(BuildPacket(val, both, "ann1", 5)) &&
      csv == ReadFile(Data("human/packet.csv"));
  return {sources.size() == 30 && gold_hits == 0 && deterministic,
          Str(sources.size(), " sources, ", gold_hits,
              " gold labels in packet, bytes ",
              deterministic ? "deterministic" : "differ")};
}

Outcome UnparseableHandling() {
  const TaskSpec& mrpc = Registry().Get("mrpc");
  const PredictionOutcome junk =
      ParseGeneratedLabel("<extra_id_0>.[sentence1] [sentence2] [sent", mrpc);
  const auto eq = PredictionOutcome::Label("equivalent");
  const PredictionVector orig{"mrpc", Perturbation::kOriginal,
                              {{"a", junk}, {"b", eq}}};
  const PredictionVector sig{"mrpc", Perturbation::kSignal,
                             {{"a", junk}, {"b", eq}}};
  // Both sides unparseable at "a": that position still counts as disagreement.
  const double c = Consistency(orig, sig);
  return {!junk.is_label() && c == 0.5,
          Str("junk parses as ", junk.is_label() ? "a label" : "Unparseable",
              ", consistency ", c, " with agreement only at the parsed "
              "position")};
}

}  // namespace
}  // namespace calum

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: calum_acceptance DATA_DIR\n";
    return 2;
  }
  calum::data_dir = argv[1];
  const std::vector<std::pair<std::string, std::function<calum::Outcome()>>>
      criteria = {
          {"perturbation-laws", calum::PerturbationLaws},
          {"metric-oracles", calum::MetricOracles},
          {"statistics", calum::Statistics},
          {"stub-consistency", calum::StubSanity},
          {"refmodel-numerics", calum::RefmodelNumerics},
          {"multitask-direction", calum::MultitaskDirection},
          {"report-golden", calum::ReportGolden},
          {"humankit", calum::Humankit},
          {"unparseable", calum::UnparseableHandling},
      };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    calum::Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail
              << " [" << calum::Seconds(start) << " s]" << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
