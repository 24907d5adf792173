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

#include "core/stft.h"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "core/error.h"

namespace accentbn {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    forward_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(n, out_, in_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* in() { return in_; }
  fftw_complex* out() { return out_; }
  void Forward() { fftw_execute(forward_); }
  // Unnormalized: result is n times the true inverse.
  void Inverse() { fftw_execute(inverse_); }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

}  // namespace

Stft::Stft(int n_fft, int win_length, int hop_length)
    : n_fft_(n_fft), hop_(hop_length), window_(n_fft, 0.0) {
  ACCENTBN_CHECK(n_fft >= win_length && win_length > 0 && hop_length > 0,
                 ErrorCode::kConfigMismatch, "invalid STFT parameters");
  const int offset = (n_fft - win_length) / 2;
  for (int i = 0; i < win_length; ++i) {
    window_[offset + i] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / win_length);
  }
}

ComplexMatrix Stft::Forward(const std::vector<double>& signal) const {
  const auto n = static_cast<Eigen::Index>(signal.size());
  const Eigen::Index frames = NumFrames(n, hop_);
  ComplexMatrix spec(frames, bins());
  RealFft fft(n_fft_);
  const int half = n_fft_ / 2;
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index start = t * hop_ - half;
    for (int i = 0; i < n_fft_; ++i) {
      const Eigen::Index s = start + i;
      fft.in()[i] = (s >= 0 && s < n) ? signal[s] * window_[i] : 0.0;
    }
    fft.Forward();
    for (int k = 0; k < bins(); ++k) {
      spec(t, k) = {fft.out()[k][0], fft.out()[k][1]};
    }
  }
  return spec;
}

std::vector<double> Stft::Inverse(const ComplexMatrix& spectrum) const {
  ACCENTBN_CHECK(spectrum.cols() == bins(), ErrorCode::kConfigMismatch,
                 "spectrum bin count mismatch");
  const Eigen::Index frames = spectrum.rows();
  const Eigen::Index length = frames * hop_;
  const int half = n_fft_ / 2;
  std::vector<double> acc(length, 0.0), norm(length, 0.0);
  RealFft fft(n_fft_);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int k = 0; k < bins(); ++k) {
      fft.out()[k][0] = spectrum(t, k).real();
      fft.out()[k][1] = spectrum(t, k).imag();
    }
    fft.Inverse();
    const Eigen::Index start = t * hop_ - half;
    for (int i = 0; i < n_fft_; ++i) {
      const Eigen::Index s = start + i;
      if (s < 0 || s >= length) continue;
      acc[s] += fft.in()[i] / n_fft_ * window_[i];
      norm[s] += window_[i] * window_[i];
    }
  }
  for (Eigen::Index s = 0; s < length; ++s) {
    if (norm[s] > 1e-8) acc[s] /= norm[s];
  }
  return acc;
}

}  // namespace accentbn
