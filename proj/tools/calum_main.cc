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

// Command-line front end. Exit codes: 0 success, 1 validation error,
// 2 transport error.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "calum/backend.h"
#include "calum/corpus.h"
#include "calum/error.h"
#include "calum/http_backend.h"
#include "calum/humankit.h"
#include "calum/metrics.h"
#include "calum/perturb.h"
#include "calum/refmodel.h"
#include "calum/report.h"
#include "calum/synth.h"
#include "calum/text.h"
#include "json.hpp"

namespace calum {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitTransport = 2;

int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kTransport ? kExitTransport : kExitValidation;
}

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    WriteFile(out_path, text);
  }
}

std::vector<Perturbation> ParsePerturbationList(const std::string& list) {
  std::vector<Perturbation> out;
  for (std::string_view item : SplitOn(list, ',')) {
    if (!Trim(item).empty()) out.push_back(ParsePerturbation(Trim(item)));
  }
  return out;
}

std::vector<double> ReadNumbers(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument,
                  path + ": not a number: '" + token + "'");
    }
  }
  return values;
}

// ---- perturb ---------------------------------------------------------------

struct PerturbArgs {
  std::string task;
  std::string split = "validation";
  std::string perturbation;
  std::string in;
  std::string out;
  bool seq2seq = false;
};

int RunPerturb(const PerturbArgs& a) {
  const TaskRegistry registry = TaskRegistry::FromEnvironment();
  const TaskSpec& task = registry.Get(a.task);
  const Dataset data = LoadDataset(a.in, task, ParseSplit(a.split));
  const Perturbation p = ParsePerturbation(a.perturbation);
  std::string out;
  for (const Example& ex : data.examples()) {
    const RenderedInput r = Render(ex, task, p);
    json row = {{"example_id", r.example_id},
                {"segment_a", r.segment_a},
                {"segment_b", r.segment_b},
                {"joined", r.joined}};
    if (a.seq2seq) row["text"] = RenderSeq2Seq(ex, task, p);
    out += row.dump() + "\n";
  }
  Emit(out, a.out);
  return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string task;
  std::string backend;
  std::string test;
  std::string val;
  std::string consistency_split = "test";
  int runs = 5;
  int in_flight = 4;
  int batch_size = 32;
  std::string model_name;
  std::string out;
};

int RunEvaluate(const EvaluateArgs& a) {
  const TaskRegistry registry = TaskRegistry::FromEnvironment();
  const TaskSpec& task = registry.Get(a.task);
  const BackendDescriptor descriptor = ParseBackendDescriptor(a.backend);
  const Dataset val = LoadDataset(a.val, task, Split::kValidation);
  std::optional<Dataset> test;
  const std::string which = NormalizeLabel(a.consistency_split);
  if (which == "test") {
    test.emplace(LoadDataset(a.test, task, Split::kTest));
  } else if (which != "val" && which != "validation") {
    throw Error(ErrorCode::kInvalidArgument,
                "--consistency-split must be test or val");
  }
  if (a.in_flight < 1 || a.batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "--in-flight and --batch-size must be positive");
  }
  EvaluateOptions options;
  options.dispatch.in_flight = a.in_flight;
  options.dispatch.batch_size = static_cast<size_t>(a.batch_size);
  const std::string model =
      a.model_name.empty() ? DescriptorModelName(descriptor) : a.model_name;
  const std::vector<uint64_t> seeds = RunSeeds(descriptor, a.runs);
  BackendFactory factory = [&](int run_index, uint64_t seed) {
    return MakeBackend(descriptor, run_index, seed);
  };
  try {
    const auto runs = EvaluateModel(factory, model, test ? *test : val, val,
                                    seeds, options);
    Emit(MetricsToJson(runs), a.out);
  } catch (const EvaluationAborted& e) {
    if (!e.completed().empty()) {
      const std::string partial = MetricsToJson(e.completed());
      if (!a.out.empty() && a.out != "-") {
        WriteFile(a.out + ".partial", partial);
        std::cerr << "partial results (" << e.completed().size()
                  << " runs) written to " << a.out << ".partial\n";
      } else {
        std::cerr << partial;
      }
    }
    throw;
  }
  return kExitOk;
}

// ---- train-ref -------------------------------------------------------------

struct TrainArgs {
  std::string mode = "single";
  std::string main_task;
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
};

refmodel::TrainConfig ParseHyperparameters(const json& h) {
  refmodel::TrainConfig cfg;
  if (!h.is_object()) return cfg;
  cfg.epochs = h.value("epochs", cfg.epochs);
  cfg.batch_size = h.value("batch_size", cfg.batch_size);
  cfg.learning_rate = h.value("learning_rate", cfg.learning_rate);
  cfg.weight_decay = h.value("weight_decay", cfg.weight_decay);
  cfg.warmup_fraction = h.value("warmup_fraction", cfg.warmup_fraction);
  cfg.early_stop_patience =
      h.value("early_stop_patience", cfg.early_stop_patience);
  cfg.seed = h.value("seed", cfg.seed);
  cfg.encoder_lr_scale = h.value("encoder_lr_scale", cfg.encoder_lr_scale);
  cfg.bucket_count = h.value("bucket_count", cfg.bucket_count);
  cfg.hidden_dim = h.value("hidden_dim", cfg.hidden_dim);
  return cfg;
}

// Config: {"train": {task: path}, "validation": {task: path},
// "hyperparameters": {...}}. Relative paths resolve against the config's
// directory.
int RunTrain(const TrainArgs& a) {
  const TaskRegistry registry = TaskRegistry::FromEnvironment();
  const json config = json::parse(ReadFile(a.config), nullptr, false);
  if (!config.is_object() || !config.contains("train") ||
      !config["train"].is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                a.config + ": expected an object with a \"train\" map");
  }
  const fs::path base = fs::path(a.config).parent_path();
  auto resolve = [&](const json& p) {
    const fs::path path(p.get<std::string>());
    return (path.is_absolute() ? path : base / path).string();
  };
  refmodel::TrainConfig cfg =
      ParseHyperparameters(config.value("hyperparameters", json::object()));
  if (a.seed) cfg.seed = *a.seed;

  const std::string mode = NormalizeLabel(a.mode);
  std::vector<std::string> tasks = {a.main_task};
  std::optional<refmodel::MultitaskMode> mt;
  if (mode != "single") {
    mt = refmodel::ParseMultitaskMode(mode);
    const auto aux = refmodel::AuxTasksFor(registry, a.main_task, *mt);
    tasks.insert(tasks.end(), aux.begin(), aux.end());
  }
  std::map<std::string, Dataset> train;
  for (const auto& id : tasks) {
    if (!config["train"].contains(id)) {
      throw Error(ErrorCode::kEmptySplit, "config has no training file for '" +
                                              id + "'");
    }
    train.emplace(id, LoadDataset(resolve(config["train"][id]),
                                  registry.Get(id), Split::kTrain));
  }
  const json& vals = config.value("validation", json::object());
  if (!vals.contains(a.main_task)) {
    throw Error(ErrorCode::kEmptySplit,
                "config has no validation file for '" + a.main_task + "'");
  }
  const Dataset val = LoadDataset(resolve(vals[a.main_task]),
                                  registry.Get(a.main_task),
                                  Split::kValidation);
  refmodel::TrainReport report;
  std::optional<refmodel::Model> model;
  if (!mt) {
    model.emplace(refmodel::TrainSingle(registry.Get(a.main_task),
                                        train.at(a.main_task), val, cfg,
                                        &report));
  } else {
    std::map<std::string, refmodel::TaskData> data;
    for (const auto& [id, d] : train) data[id].train = &d;
    data[a.main_task].validation = &val;
    const std::vector<std::string> aux(tasks.begin() + 1, tasks.end());
    model.emplace(refmodel::TrainMultitask(registry, a.main_task, aux, data,
                                           cfg, *mt, &report));
  }
  model->Save(a.out);
  json summary = {{"model", a.out},
                  {"mode", mode},
                  {"main_task", a.main_task},
                  {"seed", cfg.seed},
                  {"best_epoch", report.best_epoch},
                  {"validation_accuracy", report.validation_accuracy}};
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// ---- make-benchmark --------------------------------------------------------

int RunMakeBenchmark(const std::string& out_dir, uint64_t seed) {
  const TaskRegistry registry = TaskRegistry::Builtin();
  synth::BenchmarkConfig bc;
  bc.seed = seed;
  const synth::Benchmark bench = synth::MakeBenchmark(registry, bc);
  fs::create_directories(out_dir);
  json config = {{"train", json::object()},
                 {"validation", json::object()},
                 {"hyperparameters", json::object()}};
  for (const auto& [id, d] : bench.train) {
    const std::string name = id + "_train.tsv";
    WriteTsv(d, (fs::path(out_dir) / name).string());
    config["train"][id] = name;
  }
  for (const auto& [id, d] : bench.validation) {
    const std::string name = id + "_validation.tsv";
    WriteTsv(d, (fs::path(out_dir) / name).string());
    config["validation"][id] = name;
  }
  for (const auto& [id, d] : bench.test) {
    WriteTsv(d, (fs::path(out_dir) / (id + "_test.tsv")).string());
  }
  WriteFile((fs::path(out_dir) / "train_config.json").string(),
            config.dump(2) + "\n");
  std::cout << "wrote benchmark for main task '" << bench.main_task
            << "' to " << out_dir << "\n";
  return kExitOk;
}

int RunMakeFixture(const std::string& task_id, const std::string& split,
                   size_t n, uint64_t seed, const std::string& out) {
  const TaskRegistry registry = TaskRegistry::FromEnvironment();
  Emit(FormatTsv(synth::MakeFixture(registry.Get(task_id), ParseSplit(split),
                                    n, seed)),
       out);
  return kExitOk;
}

// ---- serve-stub ------------------------------------------------------------

StubServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server) g_server->Stop();
}

int RunServeStub(const std::string& kind, const std::string& host, int port,
                 uint64_t seed, const std::string& model) {
  const std::string k = NormalizeLabel(kind);
  StubKind stub;
  if (k == "symmetric") {
    stub = StubKind::kSymmetric;
  } else if (k == "order-sensitive") {
    stub = StubKind::kOrderSensitive;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown stub kind '" + kind + "'");
  }
  StubServer server(stub, seed, TaskRegistry::FromEnvironment(), model);
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  std::cerr << "serving " << k << " stub on " << host << ":" << port << "\n";
  if (!server.Listen(host, port)) {
    throw Error(ErrorCode::kTransport,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
  g_server = nullptr;
  return kExitOk;
}

// ---- ttest -----------------------------------------------------------------

int RunTTest(const std::string& a_path, const std::string& b_path) {
  const std::vector<double> a = ReadNumbers(a_path);
  const std::vector<double> b = ReadNumbers(b_path);
  const TTestResult r = WelchTTest(a, b);
  json out = {{"t", std::isfinite(r.t) ? json(r.t) : json(r.t > 0 ? "inf"
                                                                  : "-inf")},
              {"df", r.df},
              {"p_two_sided", r.p_two_sided},
              {"n_a", r.n_a},
              {"n_b", r.n_b},
              {"degenerate", r.degenerate}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

// ---- human-packet / human-score --------------------------------------------

struct PacketArgs {
  std::string task;
  std::string val;
  std::string perturbations = "reverse,signal";
  std::string annotator;
  uint64_t seed = 0;
  std::string policy = "shared";
  std::string out_dir;
};

int RunHumanPacket(const PacketArgs& a) {
  const TaskRegistry registry = TaskRegistry::FromEnvironment();
  const Dataset val =
      LoadDataset(a.val, registry.Get(a.task), Split::kValidation);
  const std::string policy = NormalizeLabel(a.policy);
  SourcePolicy sp;
  if (policy == "shared") {
    sp = SourcePolicy::kShared;
  } else if (policy == "per-annotator") {
    sp = SourcePolicy::kPerAnnotator;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "--policy must be shared or per-annotator");
  }
  const auto perturbations = ParsePerturbationList(a.perturbations);
  const Packet packet = BuildPacket(val, perturbations, a.annotator, a.seed, sp);
  fs::create_directories(a.out_dir);
  WriteFile((fs::path(a.out_dir) / "packet.csv").string(), PacketCsv(packet));
  WriteFile((fs::path(a.out_dir) / "key.csv").string(), KeyCsv(packet));
  std::cout << "packet " << packet.packet_id << ": " << packet.items.size()
            << " items\n";
  return kExitOk;
}

int RunHumanScore(const std::string& task_id, const std::string& key_path,
                  const std::string& responses_path,
                  const std::string& annotator, const std::string& out) {
  const TaskRegistry registry = TaskRegistry::FromEnvironment();
  const auto key = ParseKeyCsv(ReadFile(key_path));
  const auto responses = ParseResponsesCsv(ReadFile(responses_path));
  const RunMetrics m =
      ScoreResponses(registry.Get(task_id), key, responses, annotator);
  Emit(MetricsToJson(std::span<const RunMetrics>(&m, 1)), out);
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

std::vector<AggregateMetrics> LoadAggregates(
    const std::vector<std::string>& paths) {
  std::vector<AggregateMetrics> cells;
  for (const auto& p : paths) {
    const auto runs = MetricsFromJson(ReadFile(p));
    cells.push_back(Aggregate(runs));
  }
  return cells;
}

int RunReport(const std::vector<std::string>& in,
              const std::vector<std::string>& para,
              const std::vector<std::string>& all, const std::string& format,
              const std::string& out) {
  const TableFormat f = ParseTableFormat(format);
  const auto single = LoadAggregates(in);
  if (para.empty() && all.empty()) {
    Emit(EmitResultsTable(single, f), out);
  } else {
    Emit(EmitComparisonTable(single, LoadAggregates(para),
                             LoadAggregates(all), f),
         out);
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Consistency evaluation harness for sentence-pair classifiers"};
  app.require_subcommand(1);

  PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "Render a dataset as JSONL");
  perturb->add_option("--task", pa.task)->required();
  perturb->add_option("--split", pa.split);
  perturb->add_option("--perturbation", pa.perturbation)->required();
  perturb->add_option("--in", pa.in)->required();
  perturb->add_option("--out", pa.out);
  perturb->add_flag("--seq2seq", pa.seq2seq, "Also emit the text-to-text form");

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Score a backend");
  evaluate->add_option("--task", ea.task)->required();
  evaluate->add_option("--backend", ea.backend,
                       "kind=...,endpoint=...,model=...,seed=...")
      ->required();
  evaluate->add_option("--test", ea.test);
  evaluate->add_option("--val", ea.val)->required();
  evaluate->add_option("--consistency-split", ea.consistency_split,
                       "test (default) or val");
  evaluate->add_option("--runs", ea.runs);
  evaluate->add_option("--in-flight", ea.in_flight);
  evaluate->add_option("--batch-size", ea.batch_size);
  evaluate->add_option("--model-name", ea.model_name);
  evaluate->add_option("--out", ea.out);

  TrainArgs ta;
  uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train-ref", "Train the reference model");
  train->add_option("--mode", ta.mode, "single | para | all");
  train->add_option("--main-task", ta.main_task)->required();
  train->add_option("--config", ta.config)->required();
  train->add_option("--out", ta.out)->required();
  auto* seed_opt = train->add_option("--seed", train_seed);

  std::string bench_dir;
  uint64_t bench_seed = synth::BenchmarkConfig{}.seed;
  auto* bench = app.add_subcommand("make-benchmark",
                                   "Write the synthetic multitask benchmark");
  bench->add_option("--out-dir", bench_dir)->required();
  bench->add_option("--seed", bench_seed);

  std::string fx_task;
  std::string fx_split = "test";
  size_t fx_n = 1000;
  uint64_t fx_seed = 0;
  std::string fx_out;
  auto* fixture = app.add_subcommand("make-fixture",
                                     "Write a mixed-script TSV fixture");
  fixture->add_option("--task", fx_task)->required();
  fixture->add_option("--split", fx_split);
  fixture->add_option("--n", fx_n);
  fixture->add_option("--seed", fx_seed);
  fixture->add_option("--out", fx_out);

  std::string stub_kind;
  std::string stub_host = "127.0.0.1";
  int stub_port = 8080;
  uint64_t stub_seed = 0;
  std::string stub_model = "stub";
  auto* serve = app.add_subcommand("serve-stub", "Serve a stub over HTTP");
  serve->add_option("--kind", stub_kind, "symmetric | order-sensitive")
      ->required();
  serve->add_option("--host", stub_host);
  serve->add_option("--port", stub_port);
  serve->add_option("--seed", stub_seed);
  serve->add_option("--model", stub_model);

  std::string group_a;
  std::string group_b;
  auto* ttest = app.add_subcommand("ttest", "Welch t-test of two groups");
  ttest->add_option("--group-a", group_a)->required();
  ttest->add_option("--group-b", group_b)->required();

  PacketArgs pk;
  auto* packet = app.add_subcommand("human-packet", "Build an annotator packet");
  packet->add_option("--task", pk.task)->required();
  packet->add_option("--val", pk.val)->required();
  packet->add_option("--perturbations", pk.perturbations);
  packet->add_option("--annotator", pk.annotator)->required();
  packet->add_option("--seed", pk.seed);
  packet->add_option("--policy", pk.policy, "shared | per-annotator");
  packet->add_option("--out-dir", pk.out_dir)->required();

  std::string hs_task;
  std::string hs_key;
  std::string hs_responses;
  std::string hs_annotator = "annotator";
  std::string hs_out;
  auto* score = app.add_subcommand("human-score", "Score annotator responses");
  score->add_option("--task", hs_task)->required();
  score->add_option("--key", hs_key)->required();
  score->add_option("--responses", hs_responses)->required();
  score->add_option("--annotator", hs_annotator);
  score->add_option("--out", hs_out);

  std::vector<std::string> report_in;
  std::vector<std::string> report_para;
  std::vector<std::string> report_all;
  std::string report_format = "md";
  std::string report_out;
  auto* report = app.add_subcommand("report", "Render metrics as a table");
  report->add_option("--in", report_in, "metrics.json files (Single rows)")
      ->required();
  report->add_option("--para", report_para, "Para metrics, one per --in");
  report->add_option("--all", report_all, "All metrics, one per --in");
  report->add_option("--format", report_format, "md | csv");
  report->add_option("--out", report_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*perturb) return RunPerturb(pa);
    if (*evaluate) return RunEvaluate(ea);
    if (*train) {
      if (*seed_opt) ta.seed = train_seed;
      return RunTrain(ta);
    }
    if (*bench) return RunMakeBenchmark(bench_dir, bench_seed);
    if (*fixture) {
      return RunMakeFixture(fx_task, fx_split, fx_n, fx_seed, fx_out);
    }
    if (*serve) {
      return RunServeStub(stub_kind, stub_host, stub_port, stub_seed,
                          stub_model);
    }
    if (*ttest) return RunTTest(group_a, group_b);
    if (*packet) return RunHumanPacket(pk);
    if (*score) {
      return RunHumanScore(hs_task, hs_key, hs_responses, hs_annotator,
                           hs_out);
    }
    if (*report) {
      return RunReport(report_in, report_para, report_all, report_format,
                       report_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: InvalidArgument: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: Io: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace
}  // namespace calum

int main(int argc, char** argv) { return calum::Main(argc, argv); }
