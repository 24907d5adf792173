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

#ifndef ACCENTBN_EVAL_METRICS_H_
#define ACCENTBN_EVAL_METRICS_H_

#include <string>
#include <vector>

#include "core/manifest.h"
#include "core/types.h"

namespace accentbn::eval {

// Mean |pred_i - gt_i| in frames.
double DurationMae(const DurationSequence& pred, const DurationSequence& gt);
// Pools every phoneme of every utterance into one mean.
double PooledDurationMae(const std::vector<DurationSequence>& pred,
                         const std::vector<DurationSequence>& gt);

double CosineSimilarity(const Vector& a, const Vector& b);

// Bins of width w centred on k * w, k = -K..K, covering every pred - gt.
struct Histogram {
  double bin_width = 1.0;
  std::vector<double> edges;    // 2K + 2 values
  std::vector<double> centers;  // 2K + 1 values
  std::vector<long> counts;
  std::vector<double> densities;  // probability mass, sums to 1
};

Histogram DeviationHistogram(const std::vector<int>& pred,
                             const std::vector<int>& gt,
                             double bin_width = 1.0);

// Per-utterance speaker embedding computed from a mel spectrogram.
class EmbeddingExtractor {
 public:
  virtual ~EmbeddingExtractor() = default;
  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  virtual Vector Extract(const MelMatrix& mel) const = 0;
};

// Concatenated per-band mean and standard deviation of the log-mel.
class ToyEmbeddingExtractor : public EmbeddingExtractor {
 public:
  explicit ToyEmbeddingExtractor(int n_mels = kNumMels) : n_mels_(n_mels) {}
  std::string id() const override { return "toy-mel-stats"; }
  int dim() const override { return 2 * n_mels_; }
  Vector Extract(const MelMatrix& mel) const override;

 private:
  int n_mels_;
};

}  // namespace accentbn::eval

#endif  // ACCENTBN_EVAL_METRICS_H_
