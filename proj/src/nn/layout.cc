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

#include "nn/layout.h"

#include <algorithm>
#include <cmath>

namespace accentbn::nn {

SequenceLayout SequenceLayout::Packed(
    const std::vector<Eigen::Index>& lengths) {
  SequenceLayout l;
  for (Eigen::Index len : lengths) {
    l.segments.push_back({l.rows, len});
    l.rows += len;
  }
  return l;
}

SequenceLayout SequenceLayout::Padded(
    const std::vector<Eigen::Index>& lengths) {
  SequenceLayout l;
  Eigen::Index max_len = 0;
  for (Eigen::Index len : lengths) max_len = std::max(max_len, len);
  for (size_t i = 0; i < lengths.size(); ++i) {
    l.segments.push_back({static_cast<Eigen::Index>(i) * max_len, lengths[i]});
  }
  l.rows = max_len * static_cast<Eigen::Index>(lengths.size());
  return l;
}

std::vector<char> SequenceLayout::RowMask() const {
  std::vector<char> mask(rows, 0);
  for (const auto& s : segments) {
    std::fill(mask.begin() + s.offset, mask.begin() + s.offset + s.length, 1);
  }
  return mask;
}

Eigen::Index SequenceLayout::MaxLength() const {
  Eigen::Index m = 0;
  for (const auto& s : segments) m = std::max(m, s.length);
  return m;
}

Eigen::Index SequenceLayout::ValidRows() const {
  Eigen::Index n = 0;
  for (const auto& s : segments) n += s.length;
  return n;
}

Matrix SinusoidalPositions(const SequenceLayout& layout, Eigen::Index dim) {
  Matrix pe = Matrix::Zero(layout.rows, dim);
  for (const auto& s : layout.segments) {
    for (Eigen::Index t = 0; t < s.length; ++t) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double rate =
            std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
        pe(s.offset + t, i) =
            (i % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
      }
    }
  }
  return pe;
}

}  // namespace accentbn::nn
