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

#ifndef ACCENTBN_NN_CHECKPOINT_H_
#define ACCENTBN_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "core/types.h"
#include "json.hpp"
#include "nn/tape.h"

namespace accentbn::nn {

// Binary container shared by all models:
//   "ABNC" | u16 version | u32 len + kind | i64 step | u64 seed
//   | u32 len + config JSON | u32 count | count x (u32 len + name + array)
// Arrays use the feature-file encoding with dtype float64.
struct CheckpointData {
  std::string kind;
  int64_t step = 0;
  uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::pair<std::string, Matrix>> arrays;

  const Matrix* Find(const std::string& name) const;
  const Matrix& Get(const std::string& name) const;
  void Put(const std::string& name, Matrix value);
};

// Writes to a sibling temporary file and renames it into place.
void SaveCheckpoint(const CheckpointData& data,
                    const std::filesystem::path& path);
CheckpointData LoadCheckpoint(const std::filesystem::path& path);

// "param/<name>" entries.
void PutParameters(CheckpointData& data, const ParameterStore& params);
void LoadParameters(const CheckpointData& data, ParameterStore& params);

void PutStats(CheckpointData& data, const std::string& prefix,
              const NormStats& stats);
NormStats GetStats(const CheckpointData& data, const std::string& prefix);

}  // namespace accentbn::nn

#endif  // ACCENTBN_NN_CHECKPOINT_H_
