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

#ifndef ACCENTBN_CORE_INTERPOLATE_H_
#define ACCENTBN_CORE_INTERPOLATE_H_

#include "core/types.h"

namespace accentbn {

// Linear resampling along time with both endpoints pinned: output row t reads
// source position t * (L - 1) / (T - 1). A single output row reads row 0.
Matrix InterpolateFrames(const Matrix& input, Eigen::Index target_frames);

BNMatrix InterpolateBN(const BNMatrix& bn, Eigen::Index target_frames);

}  // namespace accentbn

#endif  // ACCENTBN_CORE_INTERPOLATE_H_
