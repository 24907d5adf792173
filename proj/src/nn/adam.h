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

#ifndef ACCENTBN_NN_ADAM_H_
#define ACCENTBN_NN_ADAM_H_

#include <cstdint>
#include <vector>

#include "nn/tape.h"

namespace accentbn::nn {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
};

// Adam with bias correction and a constant learning rate.
class Adam {
 public:
  Adam(ParameterStore& params, const AdamConfig& config);

  void Step();

  int64_t steps() const { return steps_; }
  const std::vector<Matrix>& first_moment() const { return m_; }
  const std::vector<Matrix>& second_moment() const { return v_; }
  void RestoreState(int64_t steps, std::vector<Matrix> m,
                    std::vector<Matrix> v);

 private:
  ParameterStore& params_;
  AdamConfig config_;
  int64_t steps_ = 0;
  std::vector<Matrix> m_, v_;
};

// Rescales all gradients so their global L2 norm is at most max_norm;
// returns the norm before clipping.
double ClipGradNorm(ParameterStore& params, double max_norm);

}  // namespace accentbn::nn

#endif  // ACCENTBN_NN_ADAM_H_
