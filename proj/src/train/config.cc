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

#include "train/config.h"

#include "core/error.h"

namespace accentbn::train {

using nlohmann::json;

void TrainConfig::Validate() const {
  ACCENTBN_CHECK(lr > 0, ErrorCode::kConfigMismatch, "lr must be > 0");
  ACCENTBN_CHECK(batch_size >= 1, ErrorCode::kConfigMismatch,
                 "batch_size must be >= 1");
  ACCENTBN_CHECK(beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1,
                 ErrorCode::kConfigMismatch, "Adam betas must lie in (0, 1)");
  ACCENTBN_CHECK(eps > 0, ErrorCode::kConfigMismatch, "eps must be > 0");
  ACCENTBN_CHECK(max_steps >= 1, ErrorCode::kConfigMismatch,
                 "max_steps must be >= 1");
  ACCENTBN_CHECK(checkpoint_interval >= 0, ErrorCode::kConfigMismatch,
                 "checkpoint_interval must be >= 0");
}

json TrainConfig::ToJson() const {
  return json{{"lr", lr},
              {"beta1", beta1},
              {"beta2", beta2},
              {"eps", eps},
              {"batch_size", batch_size},
              {"max_steps", max_steps},
              {"seed", seed},
              {"checkpoint_interval", checkpoint_interval},
              {"clip_norm", clip_norm},
              {"single_batch", single_batch}};
}

TrainConfig TrainConfig::FromJson(const json& j) {
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.seed = j.value("seed", c.seed);
  c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.single_batch = j.value("single_batch", c.single_batch);
  return c;
}

double MseLoss(const Matrix& pred, const Matrix& target,
               const std::vector<char>& mask) {
  ACCENTBN_CHECK(pred.rows() == target.rows() && pred.cols() == target.cols(),
                 ErrorCode::kInvalidInput, "mse_loss: shape mismatch");
  ACCENTBN_CHECK(mask.empty() ||
                     static_cast<Eigen::Index>(mask.size()) == pred.rows(),
                 ErrorCode::kInvalidInput, "mse_loss: mask length mismatch");
  double sum = 0.0;
  Eigen::Index rows = 0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    if (!mask.empty() && !mask[r]) continue;
    sum += (pred.row(r) - target.row(r)).squaredNorm();
    ++rows;
  }
  ACCENTBN_CHECK(rows > 0 && pred.cols() > 0, ErrorCode::kInvalidInput,
                 "mse_loss: every frame is masked");
  return sum / static_cast<double>(rows * pred.cols());
}

uint64_t MixSeed(uint64_t seed, uint64_t index) {
  // splitmix64 finalizer over the combined words.
  uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace accentbn::train
