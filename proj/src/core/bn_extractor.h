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

#ifndef ACCENTBN_CORE_BN_EXTRACTOR_H_
#define ACCENTBN_CORE_BN_EXTRACTOR_H_

#include <cstdint>
#include <string>

#include "core/types.h"

namespace accentbn {

// Maps a mel spectrogram to encoder-rate bottleneck features. Implementations
// may run at a lower frame rate than the mel; ExtractBN restores mel length.
class BNExtractor {
 public:
  virtual ~BNExtractor() = default;

  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  virtual Matrix ExtractRaw(const MelMatrix& mel) const = 0;
};

// Stand-in for an ASR encoder: fixed-seed random projection 80 -> dim,
// x4 temporal subsampling (frame averaging) and a centred moving average.
class ToyBNExtractor : public BNExtractor {
 public:
  explicit ToyBNExtractor(uint64_t seed = 0, int dim = kDefaultBnDim,
                          int subsample = 4, int smoothing = 3);

  std::string id() const override;
  int dim() const override { return static_cast<int>(projection_.cols()); }
  Matrix ExtractRaw(const MelMatrix& mel) const override;

  int subsample() const { return subsample_; }

 private:
  uint64_t seed_;
  int subsample_;
  int smoothing_;
  Matrix projection_;  // n_mels x dim
};

// Runs the extractor and interpolates its output to the mel frame count.
BNMatrix ExtractBN(const MelMatrix& mel, const BNExtractor& extractor,
                   int expected_dim = kDefaultBnDim,
                   AccentTag accent = AccentTag::kUnaccented);

}  // namespace accentbn

#endif  // ACCENTBN_CORE_BN_EXTRACTOR_H_
