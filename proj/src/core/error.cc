// Copyright (c) 2026 The accentbn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/error.h"

namespace accentbn {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kConfigMismatch: return "config-mismatch";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kVocabulary: return "vocabulary";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kCorpusEmpty: return "corpus-empty";
    case ErrorCode::kNumericFailure: return "numeric-failure";
  }
  return "unknown";
}

void Throw(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(ErrorCodeName(code)) + ": " + message);
}

}  // namespace accentbn
