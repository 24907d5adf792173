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

#ifndef ACCENTBN_CORE_STFT_H_
#define ACCENTBN_CORE_STFT_H_

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "core/types.h"

namespace accentbn {

using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                    Eigen::Dynamic, Eigen::RowMajor>;

// Center-padded STFT: frame t is centred on sample t * hop, the signal is
// zero-extended on both sides, and a signal of N samples yields ceil(N / hop)
// frames. The Hann window of win_length sits in the middle of n_fft.
class Stft {
 public:
  Stft(int n_fft, int win_length, int hop_length);

  int bins() const { return n_fft_ / 2 + 1; }
  int hop() const { return hop_; }
  static Eigen::Index NumFrames(Eigen::Index samples, int hop) {
    return (samples + hop - 1) / hop;
  }

  // frames x bins
  ComplexMatrix Forward(const std::vector<double>& signal) const;

  // Weighted overlap-add inverse; returns frames * hop samples.
  std::vector<double> Inverse(const ComplexMatrix& spectrum) const;

 private:
  int n_fft_;
  int hop_;
  std::vector<double> window_;  // length n_fft, zero outside the Hann span
};

}  // namespace accentbn

#endif  // ACCENTBN_CORE_STFT_H_
