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

#ifndef ACCENTBN_CORE_TYPES_H_
#define ACCENTBN_CORE_TYPES_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace accentbn {

// All numerics run in double precision; feature files store float32.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

inline constexpr int kSampleRate = 16000;
inline constexpr int kHopLength = 200;    // 12.5 ms
inline constexpr int kWindowLength = 800; // 50 ms
inline constexpr int kFftSize = 1024;
inline constexpr int kNumMels = 80;
inline constexpr int kDefaultBnDim = 512;
inline constexpr double kLogFloor = 1e-5;
inline constexpr int kDurationMismatchTolerance = 3;

struct FeatureConfig {
  int sample_rate = kSampleRate;
  int hop_length = kHopLength;
  int win_length = kWindowLength;
  int n_fft = kFftSize;
  int n_mels = kNumMels;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = kLogFloor;
  int bn_dim = kDefaultBnDim;

  bool operator==(const FeatureConfig&) const = default;

  // Throws kConfigMismatch when the mel layout is not the 80-band one.
  void Validate() const;
};

enum class Provenance { kExtracted, kPredicted };
enum class AccentTag { kUnaccented, kAccented };

const char* ProvenanceName(Provenance p);
const char* AccentTagName(AccentTag a);

// frames x 80 log-mel energies.
struct MelMatrix {
  Matrix values;

  Eigen::Index frames() const { return values.rows(); }
  bool operator==(const MelMatrix& o) const { return values == o.values; }
};

// frames x bn_dim bottleneck features.
struct BNMatrix {
  Matrix values;
  Provenance provenance = Provenance::kExtracted;
  AccentTag accent = AccentTag::kUnaccented;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

MelMatrix MakeMel(Matrix values, const FeatureConfig& config = {});
BNMatrix MakeBN(Matrix values, Provenance provenance, AccentTag accent,
                int bn_dim = kDefaultBnDim);

// Per-dimension normalization statistics.
struct NormStats {
  RowVector mean;
  RowVector std;

  bool empty() const { return mean.size() == 0; }
  Matrix Normalize(const Matrix& x) const;
  Matrix Denormalize(const Matrix& x) const;

  // Accumulates over the rows of every matrix; std is floored at 1e-3.
  static NormStats Compute(const std::vector<const Matrix*>& data);
};

}  // namespace accentbn

#endif  // ACCENTBN_CORE_TYPES_H_
