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

#ifndef ACCENTBN_CORE_MEL_H_
#define ACCENTBN_CORE_MEL_H_

#include <span>

#include "core/stft.h"
#include "core/types.h"

namespace accentbn {

// Slaney-style mel filterbank, n_mels x (n_fft / 2 + 1).
Matrix MelFilterbank(const FeatureConfig& config);

class MelAnalyzer {
 public:
  explicit MelAnalyzer(const FeatureConfig& config = {});

  // Log-magnitude mel spectrogram with ceil(N / hop) frames.
  MelMatrix Compute(std::span<const double> waveform, int sample_rate) const;

  const Matrix& filterbank() const { return filterbank_; }
  const Stft& stft() const { return stft_; }
  const FeatureConfig& config() const { return config_; }

 private:
  FeatureConfig config_;
  Stft stft_;
  Matrix filterbank_;
};

MelMatrix ComputeMel(std::span<const double> waveform, int sample_rate,
                     const FeatureConfig& config = {});

}  // namespace accentbn

#endif  // ACCENTBN_CORE_MEL_H_
