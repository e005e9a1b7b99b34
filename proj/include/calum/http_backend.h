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

// JSON-over-HTTP model protocol.
//
//   POST /v1/classify  {"task", "model", "inputs": [{"segment_a", "segment_b"}]}
//                      -> {"predictions": [label, ...]}
//   POST /v1/generate  {"task", "model", "inputs": [{"text"}]}
//                      -> {"generations": [text, ...]}
//   GET  /v1/health    -> {"status": "ok", "model": name}
//
// Errors are {"error": message} with a 4xx/5xx status.

#ifndef CALUM_HTTP_BACKEND_H_
#define CALUM_HTTP_BACKEND_H_

#include <memory>
#include <string>

#include "calum/backend.h"
#include "calum/corpus.h"

namespace calum {

struct Endpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string base_path;         // "" or "/prefix"
};

Endpoint ParseEndpoint(std::string_view url);

// Request bodies, exposed for protocol fixtures.
std::string ClassifyRequestBody(const TaskSpec& task, std::string_view model,
                                std::span<const RenderedInput> inputs);
std::string GenerateRequestBody(const TaskSpec& task, std::string_view model,
                                std::span<const std::string> texts);

// Response decoding. Throw Error(kProtocol) on a bad shape or length and
// Error(kLabelOutOfSet) for a classifier label outside the task's set.
std::vector<PredictionOutcome> DecodeClassifyResponse(std::string_view body,
                                                      const TaskSpec& task,
                                                      size_t expected);
std::vector<PredictionOutcome> DecodeGenerateResponse(std::string_view body,
                                                      const TaskSpec& task,
                                                      size_t expected);

// Client for /v1/classify. Transport failures and 5xx responses are
// retried with exponential backoff; 4xx responses fail immediately.
class HttpClassifierBackend final : public Backend {
 public:
  HttpClassifierBackend(std::string endpoint, std::string model,
                        RetryPolicy retry = {});
  std::vector<PredictionOutcome> ClassifyBatch(
      const TaskSpec& task,
      std::span<const RenderedInput> inputs) const override;

 private:
  Endpoint endpoint_;
  std::string model_;
  RetryPolicy retry_;
};

// Client for /v1/generate. Inputs are sent in seq2seq form and the
// generations go through ParseGeneratedLabel.
class HttpGeneratorBackend final : public Backend {
 public:
  HttpGeneratorBackend(std::string endpoint, std::string model,
                       RetryPolicy retry = {});
  std::vector<PredictionOutcome> ClassifyBatch(
      const TaskSpec& task,
      std::span<const RenderedInput> inputs) const override;

 private:
  Endpoint endpoint_;
  std::string model_;
  RetryPolicy retry_;
};

// GET /v1/health; returns the served model name. Throws kTransport or
// kProtocol.
std::string CheckHealth(const std::string& endpoint);

enum class StubKind { kSymmetric, kOrderSensitive };

// Serves the protocol over one of the stub predictors. /v1/generate answers
// with the stub's label as text.
class StubServer {
 public:
  StubServer(StubKind kind, uint64_t seed, TaskRegistry registry,
             std::string model_name = "stub");
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port.
  int Start(const std::string& host = "127.0.0.1", int port = 0);

  // Binds and serves on the calling thread until Stop().
  bool Listen(const std::string& host, int port);

  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace calum

#endif  // CALUM_HTTP_BACKEND_H_
