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

#ifndef ACCENTBN_NN_OPS_H_
#define ACCENTBN_NN_OPS_H_

#include <vector>

#include "nn/layout.h"
#include "nn/tape.h"

namespace accentbn::nn {

// Dense algebra.
Var MatMul(Var a, Var b);
// x * w + b; `b` may be an invalid Var for no bias.
Var Linear(Var x, Var w, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var AddRowBroadcast(Var x, Var row);
Var Mul(Var a, Var b);
Var Scale(Var x, double s);

// Elementwise nonlinearities.
Var Relu(Var x);
Var Tanh(Var x);
Var Sigmoid(Var x);

// Row-wise layer normalization with per-column gain and bias.
Var LayerNorm(Var x, Var gamma, Var beta, double eps = 1e-5);

// Inverted dropout. Active when the tape is in training mode or when
// `always` is set; the mask comes from the tape RNG.
Var Dropout(Var x, double p, bool always = false);

Var ConcatCols(const std::vector<Var>& parts);
Var SliceCols(Var x, Eigen::Index start, Eigen::Index count);

// out.row(i) = table.row(index[i]); index -1 yields a zero row.
Var GatherRows(Var table, const std::vector<int>& index);

// Zeroes every row whose mask entry is 0.
Var MaskRows(Var x, const std::vector<char>& mask);

// 'Same'-padded 1-D convolution over time within each segment. `w` is
// (kernel * in) x out with tap j in rows [j*in, (j+1)*in); tap j reads frame
// t + j - (kernel - 1) / 2. Padding rows come out as zero.
Var Conv1d(Var x, const SequenceLayout& layout, Var w, Var b, int kernel);

// Stride-1 max pooling over frames [t - width + 1, t] within each segment.
Var MaxPool1d(Var x, const SequenceLayout& layout, int width);

// Scaled dot-product attention per segment and head; q, k, v are rows x d.
Var MultiHeadAttention(Var q, Var k, Var v, const SequenceLayout& layout,
                       int heads);

// GRU recurrence over each segment. `xproj` is the input projection
// (rows x 3H, gate order r, z, n), `wh` is H x 3H, `bh` is 1 x 3H. `h0`
// (segments x H) is optional. Padding rows of the output are zero.
Var Gru(Var xproj, const SequenceLayout& layout, Var wh, Var bh, bool reverse,
        Var h0 = Var());

// Mean squared error over rows whose mask entry is non-zero; 1 x 1 output.
Var MseLoss(Var pred, const Matrix& target, const std::vector<char>& mask);

// Sum of every entry; 1 x 1 output.
Var SumAll(Var x);

// Sum of 1 x 1 vars.
Var SumScalars(const std::vector<Var>& terms);

}  // namespace accentbn::nn

#endif  // ACCENTBN_NN_OPS_H_
