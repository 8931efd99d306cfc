// Copyright 2026 The vlafreeze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vlafreeze/error.h"

namespace vlafreeze {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kTokenizer: return "tokenizer";
    case ErrorCode::kAdapter: return "adapter";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kGeneration: return "generation";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kMissingArtifact: return "missing-artifact";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace vlafreeze
