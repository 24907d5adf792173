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

#include "core/interpolate.h"

#include <cmath>

#include "core/error.h"

namespace accentbn {

Matrix InterpolateFrames(const Matrix& input, Eigen::Index target_frames) {
  const Eigen::Index source_frames = input.rows();
  ACCENTBN_CHECK(source_frames >= 1, ErrorCode::kInvalidInput,
                 "interpolation source has no frames");
  ACCENTBN_CHECK(target_frames >= 1, ErrorCode::kInvalidInput,
                 "interpolation target must have at least one frame");
  if (source_frames == target_frames) return input;
  Matrix out(target_frames, input.cols());
  if (target_frames == 1 || source_frames == 1) {
    out.rowwise() = input.row(0);
    return out;
  }
  const double scale = static_cast<double>(source_frames - 1) /
                       static_cast<double>(target_frames - 1);
  for (Eigen::Index t = 0; t < target_frames; ++t) {
    const double pos = t * scale;
    auto lo = static_cast<Eigen::Index>(std::floor(pos));
    if (lo >= source_frames - 1) {
      out.row(t) = input.row(source_frames - 1);
      continue;
    }
    const double frac = pos - static_cast<double>(lo);
    out.row(t) = (1.0 - frac) * input.row(lo) + frac * input.row(lo + 1);
  }
  return out;
}

BNMatrix InterpolateBN(const BNMatrix& bn, Eigen::Index target_frames) {
  return BNMatrix{InterpolateFrames(bn.values, target_frames), bn.provenance,
                  bn.accent};
}

}  // namespace accentbn
