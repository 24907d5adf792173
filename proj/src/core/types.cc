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

#include "core/types.h"

#include <cmath>

#include "core/error.h"

namespace accentbn {

void FeatureConfig::Validate() const {
  ACCENTBN_CHECK(n_mels == kNumMels, ErrorCode::kConfigMismatch,
                 "mel band count must be 80, got " + std::to_string(n_mels));
  ACCENTBN_CHECK(sample_rate == kSampleRate, ErrorCode::kConfigMismatch,
                 "sample rate must be 16000, got " +
                     std::to_string(sample_rate));
  ACCENTBN_CHECK(hop_length > 0 && win_length > 0 && n_fft >= win_length,
                 ErrorCode::kConfigMismatch, "invalid STFT framing");
  ACCENTBN_CHECK(bn_dim >= 1, ErrorCode::kConfigMismatch,
                 "bn_dim must be positive");
  ACCENTBN_CHECK(log_floor > 0.0, ErrorCode::kConfigMismatch,
                 "log floor must be positive");
}

const char* ProvenanceName(Provenance p) {
  return p == Provenance::kExtracted ? "extracted" : "predicted";
}

const char* AccentTagName(AccentTag a) {
  return a == AccentTag::kUnaccented ? "ua" : "ac";
}

MelMatrix MakeMel(Matrix values, const FeatureConfig& config) {
  ACCENTBN_CHECK(values.cols() == config.n_mels, ErrorCode::kConfigMismatch,
                 "mel width must be " + std::to_string(config.n_mels) +
                     ", got " + std::to_string(values.cols()));
  ACCENTBN_CHECK(values.rows() >= 1, ErrorCode::kInvalidInput,
                 "mel must have at least one frame");
  return MelMatrix{std::move(values)};
}

BNMatrix MakeBN(Matrix values, Provenance provenance, AccentTag accent,
                int bn_dim) {
  ACCENTBN_CHECK(values.cols() == bn_dim, ErrorCode::kConfigMismatch,
                 "BN width must be " + std::to_string(bn_dim) + ", got " +
                     std::to_string(values.cols()));
  ACCENTBN_CHECK(values.rows() >= 1, ErrorCode::kInvalidInput,
                 "BN must have at least one frame");
  return BNMatrix{std::move(values), provenance, accent};
}

Matrix NormStats::Normalize(const Matrix& x) const {
  ACCENTBN_CHECK(x.cols() == mean.size(), ErrorCode::kConfigMismatch,
                 "normalization width mismatch");
  return ((x.rowwise() - mean).array().rowwise() / std.array()).matrix();
}

Matrix NormStats::Denormalize(const Matrix& x) const {
  ACCENTBN_CHECK(x.cols() == mean.size(), ErrorCode::kConfigMismatch,
                 "normalization width mismatch");
  return ((x.array().rowwise() * std.array()).matrix().rowwise() + mean);
}

NormStats NormStats::Compute(const std::vector<const Matrix*>& data) {
  ACCENTBN_CHECK(!data.empty(), ErrorCode::kInvalidInput,
                 "cannot compute statistics over no data");
  const Eigen::Index dim = data.front()->cols();
  RowVector sum = RowVector::Zero(dim);
  RowVector sq = RowVector::Zero(dim);
  double n = 0;
  for (const Matrix* m : data) {
    ACCENTBN_CHECK(m->cols() == dim, ErrorCode::kConfigMismatch,
                   "inconsistent feature width in statistics");
    sum += m->colwise().sum();
    sq += m->array().square().matrix().colwise().sum();
    n += static_cast<double>(m->rows());
  }
  ACCENTBN_CHECK(n > 0, ErrorCode::kInvalidInput, "no frames for statistics");
  NormStats stats;
  stats.mean = sum / n;
  RowVector var = sq / n - stats.mean.array().square().matrix();
  stats.std = var.array().max(0.0).sqrt().max(1e-3).matrix();
  return stats;
}

}  // namespace accentbn
