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

#include "nn/adam.h"

#include <cmath>

#include "core/error.h"

namespace accentbn::nn {

Adam::Adam(ParameterStore& params, const AdamConfig& config)
    : params_(params), config_(config) {
  ACCENTBN_CHECK(config.lr > 0.0, ErrorCode::kConfigMismatch, "lr must be > 0");
  ACCENTBN_CHECK(config.beta1 > 0.0 && config.beta1 < 1.0 &&
                     config.beta2 > 0.0 && config.beta2 < 1.0,
                 ErrorCode::kConfigMismatch, "Adam betas must lie in (0, 1)");
  for (size_t i = 0; i < params.size(); ++i) {
    m_.push_back(Matrix::Zero(params[i].value.rows(), params[i].value.cols()));
    v_.push_back(Matrix::Zero(params[i].value.rows(), params[i].value.cols()));
  }
}

void Adam::Step() {
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = params_[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] +
            (1.0 - config_.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= config_.lr * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + config_.eps);
  }
}

void Adam::RestoreState(int64_t steps, std::vector<Matrix> m,
                        std::vector<Matrix> v) {
  ACCENTBN_CHECK(m.size() == params_.size() && v.size() == params_.size(),
                 ErrorCode::kConfigMismatch,
                 "optimizer state does not match the parameter set");
  for (size_t i = 0; i < params_.size(); ++i) {
    ACCENTBN_CHECK(m[i].rows() == params_[i].value.rows() &&
                       m[i].cols() == params_[i].value.cols() &&
                       v[i].rows() == m[i].rows() && v[i].cols() == m[i].cols(),
                   ErrorCode::kConfigMismatch,
                   "optimizer state shape mismatch for " + params_[i].name);
  }
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

double ClipGradNorm(ParameterStore& params, double max_norm) {
  double sq = 0.0;
  for (size_t i = 0; i < params.size(); ++i) sq += params[i].grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / (norm + 1e-12);
    for (size_t i = 0; i < params.size(); ++i) params[i].grad *= scale;
  }
  return norm;
}

}  // namespace accentbn::nn
