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

#include "core/bn_extractor.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/error.h"
#include "core/interpolate.h"

namespace accentbn {

ToyBNExtractor::ToyBNExtractor(uint64_t seed, int dim, int subsample,
                               int smoothing)
    : seed_(seed), subsample_(subsample), smoothing_(smoothing) {
  ACCENTBN_CHECK(dim >= 1 && subsample >= 1 && smoothing >= 1,
                 ErrorCode::kConfigMismatch, "invalid toy extractor settings");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(kNumMels));
  projection_.resize(kNumMels, dim);
  for (Eigen::Index i = 0; i < projection_.size(); ++i) {
    projection_.data()[i] = normal(rng);
  }
}

std::string ToyBNExtractor::id() const {
  return "toy-projection/seed=" + std::to_string(seed_) +
         "/dim=" + std::to_string(dim()) +
         "/sub=" + std::to_string(subsample_);
}

Matrix ToyBNExtractor::ExtractRaw(const MelMatrix& mel) const {
  ACCENTBN_CHECK(mel.values.cols() == projection_.rows(),
                 ErrorCode::kConfigMismatch,
                 "extractor expects 80-band mel input");
  const Eigen::Index frames = mel.frames();
  const Eigen::Index out_frames = (frames + subsample_ - 1) / subsample_;
  Matrix pooled(out_frames, mel.values.cols());
  for (Eigen::Index i = 0; i < out_frames; ++i) {
    const Eigen::Index begin = i * subsample_;
    const Eigen::Index count = std::min<Eigen::Index>(subsample_, frames - begin);
    pooled.row(i) = mel.values.middleRows(begin, count).colwise().mean();
  }
  const Matrix projected = pooled * projection_;
  Matrix smoothed(out_frames, projected.cols());
  const int half = smoothing_ / 2;
  for (Eigen::Index i = 0; i < out_frames; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(out_frames - 1, i + half);
    smoothed.row(i) = projected.middleRows(lo, hi - lo + 1).colwise().mean();
  }
  return smoothed;
}

BNMatrix ExtractBN(const MelMatrix& mel, const BNExtractor& extractor,
                   int expected_dim, AccentTag accent) {
  ACCENTBN_CHECK(extractor.dim() == expected_dim, ErrorCode::kConfigMismatch,
                 "extractor dimension " + std::to_string(extractor.dim()) +
                     " does not match configured bn_dim " +
                     std::to_string(expected_dim));
  Matrix raw = extractor.ExtractRaw(mel);
  ACCENTBN_CHECK(raw.cols() == expected_dim, ErrorCode::kConfigMismatch,
                 "extractor produced wrong width");
  return BNMatrix{InterpolateFrames(raw, mel.frames()), Provenance::kExtracted,
                  accent};
}

}  // namespace accentbn
