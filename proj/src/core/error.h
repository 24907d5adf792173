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

#ifndef ACCENTBN_CORE_ERROR_H_
#define ACCENTBN_CORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace accentbn {

enum class ErrorCode {
  kInvalidInput = 1,
  kConfigMismatch = 2,
  kValidation = 3,
  kParse = 4,
  kVocabulary = 5,
  kIo = 6,
  kCorpusEmpty = 7,
  kNumericFailure = 8,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// C layer can map it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Throw(ErrorCode code, const std::string& message);

#define ACCENTBN_CHECK(cond, code, msg)      \
  do {                                       \
    if (!(cond)) ::accentbn::Throw(code, msg); \
  } while (0)

}  // namespace accentbn

#endif  // ACCENTBN_CORE_ERROR_H_
