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

#include "core/vocabulary.h"

#include "core/error.h"

namespace accentbn {

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    ACCENTBN_CHECK(!Contains(t), ErrorCode::kValidation,
                   "duplicate vocabulary entry: " + t);
    Add(t);
  }
}

int Vocabulary::Add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const int id = size();
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

bool Vocabulary::Contains(std::string_view token) const {
  return index_.find(token) != index_.end();
}

int Vocabulary::Index(std::string_view token, std::string_view what) const {
  auto it = index_.find(token);
  if (it == index_.end()) {
    Throw(ErrorCode::kVocabulary,
          "unknown " + std::string(what) + " '" + std::string(token) + "'");
  }
  return it->second;
}

const std::string& Vocabulary::Token(int index, std::string_view what) const {
  if (index < 0 || index >= size()) {
    Throw(ErrorCode::kVocabulary, std::string(what) + " " +
                                      std::to_string(index) +
                                      " is out of range");
  }
  return tokens_[index];
}

}  // namespace accentbn
