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

#ifndef ACCENTBN_CORE_VOCABULARY_H_
#define ACCENTBN_CORE_VOCABULARY_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace accentbn {

// Bijection token <-> dense index in insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& tokens);

  int Add(const std::string& token);
  bool Contains(std::string_view token) const;
  // Throws kVocabulary for unknown tokens / out-of-range indices. `what`
  // names the table in the error message.
  int Index(std::string_view token, std::string_view what = "token") const;
  const std::string& Token(int index, std::string_view what = "index") const;

  int size() const { return static_cast<int>(tokens_.size()); }
  bool empty() const { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int, std::less<>> index_;
};

}  // namespace accentbn

#endif  // ACCENTBN_CORE_VOCABULARY_H_
