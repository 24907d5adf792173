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

#ifndef ACCENTBN_TRAIN_CONFIG_H_
#define ACCENTBN_TRAIN_CONFIG_H_

#include <cstdint>
#include <vector>

#include "core/types.h"
#include "json.hpp"
#include "nn/adam.h"

namespace accentbn::train {

struct TrainConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  int batch_size = 16;
  int64_t max_steps = 2000;
  uint64_t seed = 1;
  int64_t checkpoint_interval = 500;  // 0 disables intermediate checkpoints
  double clip_norm = 1.0;             // <= 0 disables clipping
  // Reuse the first batch at every step.
  bool single_batch = false;

  void Validate() const;
  nn::AdamConfig adam() const { return {lr, beta1, beta2, eps}; }
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

// Mean squared error over rows whose mask entry is non-zero. An empty mask
// selects every row.
double MseLoss(const Matrix& pred, const Matrix& target,
               const std::vector<char>& mask = {});

// Derives an independent stream seed for (seed, index).
uint64_t MixSeed(uint64_t seed, uint64_t index);

}  // namespace accentbn::train

#endif  // ACCENTBN_TRAIN_CONFIG_H_
