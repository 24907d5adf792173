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

#include "eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "core/error.h"

namespace accentbn::eval {

double DurationMae(const DurationSequence& pred, const DurationSequence& gt) {
  ACCENTBN_CHECK(pred.frames.size() == gt.frames.size(),
                 ErrorCode::kInvalidInput,
                 "duration MAE: " + std::to_string(pred.frames.size()) +
                     " predicted vs " + std::to_string(gt.frames.size()) +
                     " reference durations");
  ACCENTBN_CHECK(!gt.frames.empty(), ErrorCode::kInvalidInput,
                 "duration MAE: empty sequences");
  long sum = 0;
  for (size_t i = 0; i < gt.frames.size(); ++i) {
    sum += std::labs(static_cast<long>(pred.frames[i]) - gt.frames[i]);
  }
  return static_cast<double>(sum) / static_cast<double>(gt.frames.size());
}

double PooledDurationMae(const std::vector<DurationSequence>& pred,
                         const std::vector<DurationSequence>& gt) {
  ACCENTBN_CHECK(pred.size() == gt.size() && !gt.empty(),
                 ErrorCode::kInvalidInput,
                 "duration MAE: utterance lists differ or are empty");
  long sum = 0;
  long count = 0;
  for (size_t u = 0; u < gt.size(); ++u) {
    ACCENTBN_CHECK(pred[u].frames.size() == gt[u].frames.size(),
                   ErrorCode::kInvalidInput,
                   "duration MAE: length mismatch in utterance " +
                       std::to_string(u));
    for (size_t i = 0; i < gt[u].frames.size(); ++i) {
      sum += std::labs(static_cast<long>(pred[u].frames[i]) - gt[u].frames[i]);
    }
    count += static_cast<long>(gt[u].frames.size());
  }
  ACCENTBN_CHECK(count > 0, ErrorCode::kInvalidInput,
                 "duration MAE: no phonemes");
  return static_cast<double>(sum) / static_cast<double>(count);
}

double CosineSimilarity(const Vector& a, const Vector& b) {
  ACCENTBN_CHECK(a.size() == b.size(), ErrorCode::kInvalidInput,
                 "cosine similarity: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  ACCENTBN_CHECK(na > 0 && nb > 0, ErrorCode::kInvalidInput,
                 "cosine similarity: zero-norm embedding");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

Histogram DeviationHistogram(const std::vector<int>& pred,
                             const std::vector<int>& gt, double bin_width) {
  ACCENTBN_CHECK(pred.size() == gt.size(), ErrorCode::kInvalidInput,
                 "deviation histogram: length mismatch");
  ACCENTBN_CHECK(!gt.empty(), ErrorCode::kInvalidInput,
                 "deviation histogram: no durations");
  ACCENTBN_CHECK(bin_width > 0, ErrorCode::kInvalidInput,
                 "deviation histogram: bin width must be > 0");
  // Rounding half away from zero keeps +d and -d in mirrored bins.
  std::vector<long> bins(gt.size());
  long k_max = 0;
  for (size_t i = 0; i < gt.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - gt[i];
    const long k = static_cast<long>(std::floor(std::abs(d) / bin_width + 0.5));
    bins[i] = d < 0 ? -k : k;
    k_max = std::max(k_max, k);
  }
  Histogram h;
  h.bin_width = bin_width;
  for (long k = -k_max; k <= k_max; ++k) {
    h.centers.push_back(static_cast<double>(k) * bin_width);
    h.edges.push_back((static_cast<double>(k) - 0.5) * bin_width);
  }
  h.edges.push_back((static_cast<double>(k_max) + 0.5) * bin_width);
  h.counts.assign(h.centers.size(), 0);
  for (long k : bins) ++h.counts[k + k_max];
  const double n = static_cast<double>(gt.size());
  for (long c : h.counts) h.densities.push_back(static_cast<double>(c) / n);
  return h;
}

Vector ToyEmbeddingExtractor::Extract(const MelMatrix& mel) const {
  const Matrix& m = mel.values;
  ACCENTBN_CHECK(m.cols() == n_mels_ && m.rows() >= 1,
                 ErrorCode::kInvalidInput,
                 "embedding: expected frames x " + std::to_string(n_mels_));
  Vector out(2 * n_mels_);
  const RowVector mean = m.colwise().mean();
  const RowVector var =
      (m.rowwise() - mean).array().square().colwise().mean().matrix();
  out.head(n_mels_) = mean.transpose();
  out.tail(n_mels_) = var.cwiseSqrt().transpose();
  return out;
}

}  // namespace accentbn::eval
