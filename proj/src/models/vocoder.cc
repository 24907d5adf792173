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

#include "models/vocoder.h"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/QR>

#include "core/error.h"
#include "core/feature_io.h"
#include "core/mel.h"
#include "core/stft.h"

namespace accentbn::models {

std::vector<double> GriffinLim(const MelMatrix& mel, int iterations,
                               uint64_t seed, const FeatureConfig& config) {
  config.Validate();
  ACCENTBN_CHECK(iterations >= 1, ErrorCode::kInvalidInput,
                 "Griffin-Lim needs at least one iteration");
  ACCENTBN_CHECK(mel.values.rows() >= 1 && mel.values.cols() == config.n_mels,
                 ErrorCode::kInvalidInput,
                 "Griffin-Lim expects frames x " + std::to_string(config.n_mels));
  ACCENTBN_CHECK(mel.values.allFinite(), ErrorCode::kInvalidInput,
                 "mel contains non-finite values");

  const Matrix fb = MelFilterbank(config);
  const Matrix fb_pinv = fb.completeOrthogonalDecomposition().pseudoInverse();
  const Matrix magnitude =
      (mel.values.array().exp().matrix() * fb_pinv.transpose()).cwiseMax(0.0);

  Stft stft(config.n_fft, config.win_length, config.hop_length);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  ComplexMatrix spec(magnitude.rows(), magnitude.cols());
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    spec.data()[i] = std::polar(magnitude.data()[i], angle(rng));
  }
  std::vector<double> signal = stft.Inverse(spec);
  for (int it = 0; it < iterations; ++it) {
    const ComplexMatrix rebuilt = stft.Forward(signal);
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
      const double phase = std::arg(rebuilt.data()[i]);
      spec.data()[i] = std::polar(magnitude.data()[i], phase);
    }
    signal = stft.Inverse(spec);
  }
  return signal;
}

void ExportForVocoder(const MelMatrix& mel, const std::filesystem::path& path) {
  SaveMel(mel, path);
}

}  // namespace accentbn::models
