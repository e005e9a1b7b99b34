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


#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "calum/http_backend.h"
#include "calum/metrics.h"
#include "calum/perturb.h"
#include "calum/text.h"
#include "httplib.h"
#include "json.hpp"
#include "test_support.h"

namespace calum {
namespace {

using json = nlohmann::json;
using testing::DataPath;
using testing::Task;
using testing::ThrowsCode;

RetryPolicy FastRetry(int attempts = 3) {
  return {.max_attempts = attempts,
          .initial_backoff = std::chrono::milliseconds(1),
          .timeout = std::chrono::milliseconds(2000)};
}

// httplib server on a background thread, stopped on destruction.
class TestServer {
 public:
  httplib::Server& server() { return server_; }
  std::string Start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return "http://127.0.0.1:" + std::to_string(port_);
  }
  ~TestServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST(EndpointTest, Parsing) {
  const Endpoint a = ParseEndpoint("http://host:81");
  EXPECT_EQ(a.scheme_host_port, "http://host:81");
  EXPECT_EQ(a.base_path, "");
  const Endpoint b = ParseEndpoint(" http://host:81/api/ ");
  EXPECT_EQ(b.scheme_host_port, "http://host:81");
  EXPECT_EQ(b.base_path, "/api");
  EXPECT_TRUE(ThrowsCode([] { ParseEndpoint("host:81"); },
                         ErrorCode::kInvalidArgument));
  EXPECT_TRUE(ThrowsCode([] { ParseEndpoint("https://host"); },
                         ErrorCode::kInvalidArgument));
}

TEST(ProtocolTest, RequestBodies) {
  const RenderedInput in = Render({"1", "비가 온다", "b", {}}, Task("rte"),
                                  Perturbation::kOriginal);
  EXPECT_EQ(json::parse(ClassifyRequestBody(Task("rte"), "m", std::span(&in, 1))),
            json::parse(R"({"task":"rte","model":"m","inputs":[
              {"segment_a":"Sentence1: 비가 온다","segment_b":"Sentence2: b"}]})"));
  const std::vector<std::string> texts = {"mrpc sentence1: a sentence2: b"};
  EXPECT_EQ(json::parse(GenerateRequestBody(Task("mrpc"), "t5", texts)),
            json::parse(R"({"task":"mrpc","model":"t5","inputs":[
              {"text":"mrpc sentence1: a sentence2: b"}]})"));
}

TEST(ProtocolTest, DecodeClassify) {
  const TaskSpec& rte = Task("rte");
  EXPECT_EQ(DecodeClassifyResponse(R"({"predictions":["entailment"]})", rte, 1),
            std::vector{PredictionOutcome::Label("entailment")});
  EXPECT_TRUE(ThrowsCode(
      [&] { DecodeClassifyResponse(R"({"predictions":["maybe"]})", rte, 1); },
      ErrorCode::kLabelOutOfSet));
  for (const char* bad : {R"({"predictions":["entailment"]})", "[]", "{",
                          R"({"labels":[]})", R"({"predictions":[1,2]})"}) {
    EXPECT_TRUE(ThrowsCode([&] { DecodeClassifyResponse(bad, rte, 2); },
                           ErrorCode::kProtocol))
        << bad;
  }
}

TEST(ProtocolTest, DecodeGenerate) {
  const auto out = DecodeGenerateResponse(
      R"({"generations":["Equivalent.","<extra_id_0>.[sentence1] [sentence2] [sent"]})",
      Task("mrpc"), 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], PredictionOutcome::Label("equivalent"));
  EXPECT_FALSE(out[1].is_label());
  EXPECT_TRUE(ThrowsCode(
      [] { DecodeGenerateResponse(R"({"generations":[]})", Task("mrpc"), 1); },
      ErrorCode::kProtocol));
}

// Replays the recorded exchanges against the in-process stub server, which
// produced them (order-sensitive, seed 0, model "stub").
TEST(ProtocolFixtureTest, StubServerReproducesRecordedExchanges) {
  const json fixtures = json::parse(ReadFile(DataPath("protocol/fixtures.json")));
  ASSERT_GE(fixtures.size(), 8u);
  StubServer server(StubKind::kOrderSensitive, 0, TaskRegistry::Builtin(),
                    "stub");
  const int port = server.Start();
  httplib::Client client("127.0.0.1", port);
  for (const json& fx : fixtures) {
    SCOPED_TRACE(fx.at("name").get<std::string>());
    const std::string path = fx.at("path");
    httplib::Result res;
    if (fx.at("method") == "GET") {
      res = client.Get(path);
    } else {
      const json& req = fx.at("request");
      res = client.Post(path, req.is_string() ? req.get<std::string>() : req.dump(),
                        "application/json");
    }
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, fx.at("status").get<int>());
    EXPECT_EQ(json::parse(res->body), fx.at("response"));
  }
}

// The client side decodes every recorded success response.
TEST(ProtocolFixtureTest, ClientDecodesRecordedResponses) {
  const json fixtures = json::parse(ReadFile(DataPath("protocol/fixtures.json")));
  const TaskRegistry reg = TaskRegistry::Builtin();
  for (const json& fx : fixtures) {
    if (fx.at("status") != 200 || fx.at("method") != "POST") continue;
    const json& req = fx.at("request");
    const TaskSpec& task = reg.Get(req.at("task").get<std::string>());
    const size_t n = req.at("inputs").size();
    const std::string body = fx.at("response").dump();
    const auto out = fx.at("path") == "/v1/classify"
                         ? DecodeClassifyResponse(body, task, n)
                         : DecodeGenerateResponse(body, task, n);
    EXPECT_EQ(out.size(), n);
  }
}

TEST(HttpBackendTest, ClassifierAgainstStubServerMatchesInProcessStub) {
  StubServer server(StubKind::kOrderSensitive, 7, TaskRegistry::Builtin());
  const std::string url = "http://127.0.0.1:" + std::to_string(server.Start());
  EXPECT_EQ(CheckHealth(url), "stub");
  const Dataset data = LoadTsv(DataPath("rte_fixture_val.tsv"), Task("rte"),
                               Split::kValidation);
  const HttpClassifierBackend http(url, "stub", FastRetry());
  const OrderSensitiveStub local(7);
  for (const Perturbation p : kAllPerturbations) {
    EXPECT_EQ(PredictDataset(http, data, p, {.batch_size = 7, .in_flight = 3})
                  .entries,
              PredictDataset(local, data, p).entries);
  }
}

TEST(HttpBackendTest, GeneratorAgainstSymmetricStubIsConsistent) {
  StubServer server(StubKind::kSymmetric, 0, TaskRegistry::Builtin());
  const std::string url = "http://127.0.0.1:" + std::to_string(server.Start());
  const Dataset data = LoadTsv(DataPath("rte_fixture_val.tsv"), Task("rte"),
                               Split::kValidation);
  const HttpGeneratorBackend gen(url, "t5", FastRetry());
  const auto o = PredictDataset(gen, data, Perturbation::kOriginal);
  EXPECT_EQ(Consistency(o, PredictDataset(gen, data, Perturbation::kReverse)),
            1.0);
  EXPECT_EQ(Consistency(o, PredictDataset(gen, data, Perturbation::kSignal)),
            1.0);
}

TEST(HttpBackendTest, RetriesServerErrorsThenSucceeds) {
  TestServer ts;
  std::atomic<int> calls{0};
  ts.server().Post("/api/v1/classify", [&](const httplib::Request& req,
                                           httplib::Response& res) {
    if (++calls < 3) {
      res.status = 503;
      res.set_content(R"({"error":"warming up"})", "application/json");
      return;
    }
    const json doc = json::parse(req.body);
    json preds = json::array();
    for (size_t i = 0; i < doc.at("inputs").size(); ++i) {
      preds.push_back("entailment");
    }
    res.set_content(json{{"predictions", preds}}.dump(), "application/json");
  });
  const std::string url = ts.Start() + "/api";
  const HttpClassifierBackend backend(url, "m", FastRetry(3));
  const RenderedInput in = Render({"1", "a", "b", {}}, Task("rte"),
                                  Perturbation::kOriginal);
  const auto out = backend.ClassifyBatch(Task("rte"), std::span(&in, 1));
  EXPECT_EQ(out, std::vector{PredictionOutcome::Label("entailment")});
  EXPECT_EQ(calls, 3);
}

TEST(HttpBackendTest, GivesUpAfterMaxAttempts) {
  TestServer ts;
  std::atomic<int> calls{0};
  ts.server().Post("/v1/classify",
                   [&](const httplib::Request&, httplib::Response& res) {
                     ++calls;
                     res.status = 500;
                   });
  const HttpClassifierBackend backend(ts.Start(), "m", FastRetry(4));
  const RenderedInput in = Render({"1", "a", "b", {}}, Task("rte"),
                                  Perturbation::kOriginal);
  EXPECT_TRUE(ThrowsCode(
      [&] { backend.ClassifyBatch(Task("rte"), std::span(&in, 1)); },
      ErrorCode::kTransport));
  EXPECT_EQ(calls, 4);
}

TEST(HttpBackendTest, ClientErrorsAreNotRetried) {
  TestServer ts;
  std::atomic<int> calls{0};
  ts.server().Post("/v1/classify",
                   [&](const httplib::Request&, httplib::Response& res) {
                     ++calls;
                     res.status = 400;
                     res.set_content(R"({"error":"no head for task"})",
                                     "application/json");
                   });
  const HttpClassifierBackend backend(ts.Start(), "m", FastRetry(3));
  const RenderedInput in = Render({"1", "a", "b", {}}, Task("rte"),
                                  Perturbation::kOriginal);
  try {
    backend.ClassifyBatch(Task("rte"), std::span(&in, 1));
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol);
    EXPECT_NE(e.message().find("no head for task"), std::string::npos);
  }
  EXPECT_EQ(calls, 1);
}

TEST(HttpBackendTest, UnreachableServerIsTransportError) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  const std::string url = "http://127.0.0.1:" + std::to_string(port);
  const HttpClassifierBackend backend(url, "m", FastRetry(2));
  const RenderedInput in = Render({"1", "a", "b", {}}, Task("rte"),
                                  Perturbation::kOriginal);
  EXPECT_TRUE(ThrowsCode(
      [&] { backend.ClassifyBatch(Task("rte"), std::span(&in, 1)); },
      ErrorCode::kTransport));
  EXPECT_TRUE(ThrowsCode([&] { CheckHealth(url); }, ErrorCode::kTransport));
}

TEST(HttpBackendTest, OutOfSetLabelFromServer) {
  TestServer ts;
  ts.server().Post("/v1/classify",
                   [](const httplib::Request&, httplib::Response& res) {
                     res.set_content(R"({"predictions":["maybe"]})",
                                     "application/json");
                   });
  const HttpClassifierBackend backend(ts.Start(), "m", FastRetry());
  const RenderedInput in = Render({"1", "a", "b", {}}, Task("rte"),
                                  Perturbation::kOriginal);
  EXPECT_TRUE(ThrowsCode(
      [&] { backend.ClassifyBatch(Task("rte"), std::span(&in, 1)); },
      ErrorCode::kLabelOutOfSet));
}

}  // namespace
}  // namespace calum
