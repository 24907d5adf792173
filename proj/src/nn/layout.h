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

#ifndef ACCENTBN_NN_LAYOUT_H_
#define ACCENTBN_NN_LAYOUT_H_

#include <vector>

#include "core/types.h"

namespace accentbn::nn {

struct Segment {
  Eigen::Index offset = 0;
  Eigen::Index length = 0;
};

// Describes how a batch of variable-length sequences sits in the rows of a
// matrix. Rows outside every segment are padding: sequence ops neither read
// nor write them, and losses mask them out.
struct SequenceLayout {
  std::vector<Segment> segments;
  Eigen::Index rows = 0;

  // Back-to-back, no padding.
  static SequenceLayout Packed(const std::vector<Eigen::Index>& lengths);
  // Every sequence padded to the longest one.
  static SequenceLayout Padded(const std::vector<Eigen::Index>& lengths);

  std::vector<char> RowMask() const;
  Eigen::Index MaxLength() const;
  Eigen::Index ValidRows() const;
  size_t size() const { return segments.size(); }
};

// Sinusoidal position table; positions restart at 0 in each segment and
// padding rows are zero.
Matrix SinusoidalPositions(const SequenceLayout& layout, Eigen::Index dim);

}  // namespace accentbn::nn

#endif  // ACCENTBN_NN_LAYOUT_H_
