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

#include "core/mel.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/error.h"

namespace accentbn {
namespace {

constexpr double kLinearSpacing = 200.0 / 3.0;
constexpr double kMinLogHz = 1000.0;
constexpr double kMinLogMel = kMinLogHz / kLinearSpacing;

double LogStep() { return std::log(6.4) / 27.0; }

double HzToMel(double hz) {
  if (hz < kMinLogHz) return hz / kLinearSpacing;
  return kMinLogMel + std::log(hz / kMinLogHz) / LogStep();
}

double MelToHz(double mel) {
  if (mel < kMinLogMel) return mel * kLinearSpacing;
  return kMinLogHz * std::exp(LogStep() * (mel - kMinLogMel));
}

}  // namespace

Matrix MelFilterbank(const FeatureConfig& config) {
  const int bins = config.n_fft / 2 + 1;
  const int n_mels = config.n_mels;
  std::vector<double> hz(n_mels + 2);
  const double lo = HzToMel(config.fmin), hi = HzToMel(config.fmax);
  for (int i = 0; i < n_mels + 2; ++i) {
    hz[i] = MelToHz(lo + (hi - lo) * i / (n_mels + 1));
  }
  Matrix fb = Matrix::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double enorm = 2.0 / (hz[m + 2] - hz[m]);
    for (int k = 0; k < bins; ++k) {
      const double f =
          static_cast<double>(k) * config.sample_rate / config.n_fft;
      const double lower = (f - hz[m]) / (hz[m + 1] - hz[m]);
      const double upper = (hz[m + 2] - f) / (hz[m + 2] - hz[m + 1]);
      fb(m, k) = std::max(0.0, std::min(lower, upper)) * enorm;
    }
  }
  return fb;
}

MelAnalyzer::MelAnalyzer(const FeatureConfig& config)
    : config_(config),
      stft_(config.n_fft, config.win_length, config.hop_length),
      filterbank_(MelFilterbank(config)) {
  config_.Validate();
}

MelMatrix MelAnalyzer::Compute(std::span<const double> waveform,
                               int sample_rate) const {
  ACCENTBN_CHECK(!waveform.empty(), ErrorCode::kInvalidInput,
                 "empty waveform");
  ACCENTBN_CHECK(sample_rate == config_.sample_rate,
                 ErrorCode::kConfigMismatch,
                 "expected " + std::to_string(config_.sample_rate) +
                     " Hz audio, got " + std::to_string(sample_rate));
  const ComplexMatrix spec =
      stft_.Forward(std::vector<double>(waveform.begin(), waveform.end()));
  const Matrix magnitude = spec.cwiseAbs();
  Matrix mel = magnitude * filterbank_.transpose();
  mel = mel.array().max(config_.log_floor).log().matrix();
  return MelMatrix{std::move(mel)};
}

MelMatrix ComputeMel(std::span<const double> waveform, int sample_rate,
                     const FeatureConfig& config) {
  return MelAnalyzer(config).Compute(waveform, sample_rate);
}

}  // namespace accentbn
