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

#include "calum/error.h"

namespace calum {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kEncoding: return "EncodingError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kNTooLarge: return "NTooLarge";
    case ErrorCode::kUnknownTask: return "UnknownTask";
    case ErrorCode::kNoSeq2SeqPrefix: return "NoSeq2SeqPrefix";
    case ErrorCode::kUnrecognizedDecoration: return "UnrecognizedDecoration";
    case ErrorCode::kTransport: return "TransportError";
    case ErrorCode::kProtocol: return "ProtocolError";
    case ErrorCode::kLabelOutOfSet: return "LabelOutOfSet";
    case ErrorCode::kEmptySplit: return "EmptySplit";
    case ErrorCode::kNoHeadForTask: return "NoHeadForTask";
    case ErrorCode::kBadModelFile: return "BadModelFile";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kMixedKeys: return "MixedKeys";
    case ErrorCode::kDegenerateGroup: return "DegenerateGroup";
    case ErrorCode::kNumerical: return "NumericalError";
    case ErrorCode::kDatasetTooSmall: return "DatasetTooSmall";
    case ErrorCode::kMissingResponse: return "MissingResponse";
    case ErrorCode::kRaggedCells: return "RaggedCells";
  }
  return "Unknown";
}

}  // namespace calum
