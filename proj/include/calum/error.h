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

#ifndef CALUM_ERROR_H_
#define CALUM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace calum {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  // corpus
  kMissingColumn,
  kBadLabel,
  kMalformedRow,
  kEncoding,
  kDuplicateId,
  kNTooLarge,
  kUnknownTask,
  // perturb
  kNoSeq2SeqPrefix,
  kUnrecognizedDecoration,
  // backend
  kTransport,
  kProtocol,
  kLabelOutOfSet,
  // refmodel
  kEmptySplit,
  kNoHeadForTask,
  kBadModelFile,
  // metrics
  kIdMismatch,
  kMixedKeys,
  kDegenerateGroup,
  kNumerical,
  // humankit
  kDatasetTooSmall,
  kMissingResponse,
  // report
  kRaggedCells,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is a calum::Error carrying a code
// that callers (the CLI, the Python module) can dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const { return code_; }
  // The message without the code prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace calum

#endif  // CALUM_ERROR_H_
