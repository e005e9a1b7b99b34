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

#include "calum/http_backend.h"

#include <thread>

#include "calum/error.h"
#include "calum/text.h"
#include "httplib.h"
#include "json.hpp"

namespace calum {
namespace {

using json = nlohmann::json;

constexpr char kJsonType[] = "application/json";

json ParseObject(std::string_view body) {
  json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) {
    throw Error(ErrorCode::kProtocol, "response is not a JSON object");
  }
  return doc;
}

std::vector<std::string> StringArray(const json& doc, const char* key,
                                     size_t expected) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw Error(ErrorCode::kProtocol,
                std::string("response lacks array '") + key + "'");
  }
  const json& arr = doc.at(key);
  if (arr.size() != expected) {
    throw Error(ErrorCode::kProtocol,
                std::string("'") + key + "' has " + std::to_string(arr.size()) +
                    " entries, expected " + std::to_string(expected));
  }
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_string()) {
      throw Error(ErrorCode::kProtocol,
                  std::string("non-string entry in '") + key + "'");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string ErrorMessage(const httplib::Response& res) {
  json doc = json::parse(res.body, nullptr, false);
  if (doc.is_object() && doc.contains("error") && doc["error"].is_string()) {
    return doc["error"].get<std::string>();
  }
  return res.body;
}

// POSTs with retries. Returns the body of a 2xx response.
std::string PostWithRetry(const Endpoint& endpoint, const std::string& path,
                          const std::string& body, const RetryPolicy& retry) {
  auto backoff = retry.initial_backoff;
  std::string last_problem;
  for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
    httplib::Client client(endpoint.scheme_host_port);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        retry.timeout);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(endpoint.base_path + path, body, kJsonType);
    if (res) {
      if (res->status >= 200 && res->status < 300) return res->body;
      if (res->status < 500) {
        throw Error(ErrorCode::kProtocol, "HTTP " + std::to_string(res->status) +
                                              " from " + path + ": " +
                                              ErrorMessage(*res));
      }
      last_problem = "HTTP " + std::to_string(res->status) + ": " +
                     ErrorMessage(*res);
    } else {
      last_problem = httplib::to_string(res.error());
    }
    if (attempt < retry.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::kTransport,
              endpoint.scheme_host_port + endpoint.base_path + path +
                  " failed after " + std::to_string(retry.max_attempts) +
                  " attempts: " + last_problem);
}

}  // namespace

Endpoint ParseEndpoint(std::string_view url) {
  url = Trim(url);
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint '" + std::string(url) + "' needs a scheme");
  }
  if (url.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::kInvalidArgument,
                "only http:// endpoints are supported");
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  Endpoint out;
  if (path_start == std::string_view::npos) {
    out.scheme_host_port = std::string(url);
  } else {
    out.scheme_host_port = std::string(url.substr(0, path_start));
    out.base_path = std::string(url.substr(path_start));
    while (!out.base_path.empty() && out.base_path.back() == '/') {
      out.base_path.pop_back();
    }
  }
  return out;
}

std::string ClassifyRequestBody(const TaskSpec& task, std::string_view model,
                                std::span<const RenderedInput> inputs) {
  json items = json::array();
  for (const auto& input : inputs) {
    items.push_back({{"segment_a", input.segment_a},
                     {"segment_b", input.segment_b}});
  }
  json doc = {{"task", task.task_id}, {"model", model}, {"inputs", items}};
  return doc.dump();
}

std::string GenerateRequestBody(const TaskSpec& task, std::string_view model,
                                std::span<const std::string> texts) {
  json items = json::array();
  for (const auto& text : texts) items.push_back({{"text", text}});
  json doc = {{"task", task.task_id}, {"model", model}, {"inputs", items}};
  return doc.dump();
}

std::vector<PredictionOutcome> DecodeClassifyResponse(std::string_view body,
                                                      const TaskSpec& task,
                                                      size_t expected) {
  const json doc = ParseObject(body);
  std::vector<PredictionOutcome> out;
  for (auto& label : StringArray(doc, "predictions", expected)) {
    if (!task.HasLabel(label)) {
      throw Error(ErrorCode::kLabelOutOfSet,
                  "'" + label + "' is not a label of " + task.task_id);
    }
    out.push_back(PredictionOutcome::Label(std::move(label)));
  }
  return out;
}

std::vector<PredictionOutcome> DecodeGenerateResponse(std::string_view body,
                                                      const TaskSpec& task,
                                                      size_t expected) {
  const json doc = ParseObject(body);
  std::vector<PredictionOutcome> out;
  for (const auto& text : StringArray(doc, "generations", expected)) {
    out.push_back(ParseGeneratedLabel(text, task));
  }
  return out;
}

HttpClassifierBackend::HttpClassifierBackend(std::string endpoint,
                                             std::string model,
                                             RetryPolicy retry)
    : endpoint_(ParseEndpoint(endpoint)),
      model_(std::move(model)),
      retry_(retry) {}

std::vector<PredictionOutcome> HttpClassifierBackend::ClassifyBatch(
    const TaskSpec& task, std::span<const RenderedInput> inputs) const {
  if (inputs.empty()) return {};
  const std::string body =
      PostWithRetry(endpoint_, "/v1/classify",
                    ClassifyRequestBody(task, model_, inputs), retry_);
  return DecodeClassifyResponse(body, task, inputs.size());
}

HttpGeneratorBackend::HttpGeneratorBackend(std::string endpoint,
                                           std::string model,
                                           RetryPolicy retry)
    : endpoint_(ParseEndpoint(endpoint)),
      model_(std::move(model)),
      retry_(retry) {}

std::vector<PredictionOutcome> HttpGeneratorBackend::ClassifyBatch(
    const TaskSpec& task, std::span<const RenderedInput> inputs) const {
  if (inputs.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(inputs.size());
  for (const auto& input : inputs) texts.push_back(ToSeq2Seq(input, task));
  const std::string body =
      PostWithRetry(endpoint_, "/v1/generate",
                    GenerateRequestBody(task, model_, texts), retry_);
  return DecodeGenerateResponse(body, task, inputs.size());
}

std::string CheckHealth(const std::string& endpoint) {
  const Endpoint ep = ParseEndpoint(endpoint);
  httplib::Client client(ep.scheme_host_port);
  auto res = client.Get(ep.base_path + "/v1/health");
  if (!res) {
    throw Error(ErrorCode::kTransport, httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProtocol,
                "health returned HTTP " + std::to_string(res->status));
  }
  const json doc = ParseObject(res->body);
  if (doc.value("status", "") != "ok") {
    throw Error(ErrorCode::kProtocol, "health status is not ok");
  }
  return doc.value("model", "");
}

struct StubServer::Impl {
  StubKind kind;
  uint64_t seed;
  TaskRegistry registry;
  std::string model_name;
  httplib::Server server;
  std::thread thread;

  static void Reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJsonType);
  }

  static void Fail(httplib::Response& res, int status,
                   const std::string& message) {
    Reply(res, status, json{{"error", message}});
  }

  // Parses the common request envelope; on failure writes the 400 reply
  // and returns nullptr.
  const TaskSpec* Envelope(const httplib::Request& req, httplib::Response& res,
                           json& doc) const {
    doc = json::parse(req.body, nullptr, false);
    if (!doc.is_object()) {
      Fail(res, 400, "malformed JSON request");
      return nullptr;
    }
    if (!doc.contains("task") || !doc["task"].is_string()) {
      Fail(res, 400, "missing task");
      return nullptr;
    }
    const std::string task_id = doc["task"].get<std::string>();
    if (!registry.Contains(task_id)) {
      Fail(res, 400, "no head for task");
      return nullptr;
    }
    if (!doc.contains("inputs") || !doc["inputs"].is_array()) {
      Fail(res, 400, "missing inputs");
      return nullptr;
    }
    return &registry.Get(task_id);
  }

  void Classify(const httplib::Request& req, httplib::Response& res) const {
    json doc;
    const TaskSpec* task = Envelope(req, res, doc);
    if (!task) return;
    json predictions = json::array();
    for (const json& item : doc["inputs"]) {
      if (!item.is_object() || !item.contains("segment_a") ||
          !item.contains("segment_b") || !item["segment_a"].is_string() ||
          !item["segment_b"].is_string()) {
        return Fail(res, 400, "each input needs segment_a and segment_b");
      }
      RenderedInput input;
      input.segment_a = item["segment_a"].get<std::string>();
      input.segment_b = item["segment_b"].get<std::string>();
      input.joined = input.segment_a + " " + input.segment_b;
      try {
        predictions.push_back(
            kind == StubKind::kSymmetric
                ? StubSymmetricLabel(*task, StripIndicators(input, *task), seed)
                : StubOrderSensitiveLabel(*task, input.joined, seed));
      } catch (const Error& e) {
        return Fail(res, 400, e.what());
      }
    }
    Reply(res, 200, json{{"predictions", predictions}});
  }

  void Generate(const httplib::Request& req, httplib::Response& res) const {
    json doc;
    const TaskSpec* task = Envelope(req, res, doc);
    if (!task) return;
    json generations = json::array();
    for (const json& item : doc["inputs"]) {
      if (!item.is_object() || !item.contains("text") ||
          !item["text"].is_string()) {
        return Fail(res, 400, "each input needs text");
      }
      const std::string text = item["text"].get<std::string>();
      try {
        generations.push_back(
            kind == StubKind::kSymmetric
                ? StubSymmetricLabel(*task, StripSeq2Seq(text, *task), seed)
                : StubOrderSensitiveLabel(*task, text, seed));
      } catch (const Error& e) {
        return Fail(res, 400, e.what());
      }
    }
    Reply(res, 200, json{{"generations", generations}});
  }

  void Install() {
    server.Post("/v1/classify",
                [this](const httplib::Request& req, httplib::Response& res) {
                  Classify(req, res);
                });
    server.Post("/v1/generate",
                [this](const httplib::Request& req, httplib::Response& res) {
                  Generate(req, res);
                });
    server.Get("/v1/health",
               [this](const httplib::Request&, httplib::Response& res) {
                 Reply(res, 200, json{{"status", "ok"}, {"model", model_name}});
               });
  }
};

StubServer::StubServer(StubKind kind, uint64_t seed, TaskRegistry registry,
                       std::string model_name)
    : impl_(new Impl{kind, seed, std::move(registry), std::move(model_name),
                     {}, {}}) {
  impl_->Install();
}

StubServer::~StubServer() { Stop(); }

int StubServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kTransport,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool StubServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

void StubServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace calum
