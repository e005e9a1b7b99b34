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

#include <memory>
#include <string>

#include "calum/backend.h"
#include "calum/error.h"
#include "calum/http_backend.h"
#include "calum/refmodel.h"

namespace calum {
namespace {

std::string SubstituteRun(std::string text, int run_index) {
  static constexpr std::string_view kToken = "{run}";
  const std::string value = std::to_string(run_index);
  for (size_t pos = text.find(kToken); pos != std::string::npos;
       pos = text.find(kToken, pos + value.size())) {
    text.replace(pos, kToken.size(), value);
  }
  return text;
}

const std::string& RequireEndpoint(const BackendDescriptor& d) {
  if (!d.endpoint || d.endpoint->empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(BackendKindName(d.kind)) + " needs an endpoint");
  }
  return *d.endpoint;
}

}  // namespace

std::unique_ptr<Backend> MakeBackend(const BackendDescriptor& descriptor,
                                     int run_index, uint64_t seed) {
  const std::string model = SubstituteRun(descriptor.model_name, run_index);
  switch (descriptor.kind) {
    case BackendKind::kStubSymmetric:
      return std::make_unique<SymmetricStub>(seed);
    case BackendKind::kStubOrderSensitive:
      return std::make_unique<OrderSensitiveStub>(seed);
    case BackendKind::kHttpClassifier:
      return std::make_unique<HttpClassifierBackend>(
          RequireEndpoint(descriptor), model, descriptor.retry);
    case BackendKind::kHttpGenerator:
      return std::make_unique<HttpGeneratorBackend>(
          RequireEndpoint(descriptor), model, descriptor.retry);
    case BackendKind::kRefModel: {
      if (model.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "refmodel backend needs model=<path>");
      }
      auto loaded =
          std::make_shared<const refmodel::Model>(refmodel::Model::Load(model));
      return std::make_unique<refmodel::RefModelBackend>(std::move(loaded));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend kind");
}

std::vector<uint64_t> RunSeeds(const BackendDescriptor& descriptor, int runs) {
  if (runs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "runs must be at least 1");
  }
  std::vector<uint64_t> seeds;
  const uint64_t base = descriptor.run_seed.value_or(0);
  for (int i = 0; i < runs; ++i) seeds.push_back(base + static_cast<uint64_t>(i));
  return seeds;
}

}  // namespace calum
