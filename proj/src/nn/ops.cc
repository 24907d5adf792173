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

#include "nn/ops.h"

#include <cmath>
#include <limits>
#include <memory>

#include "core/error.h"

namespace accentbn::nn {
namespace {

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  ACCENTBN_CHECK(a.rows() == b.rows() && a.cols() == b.cols(),
                 ErrorCode::kInvalidInput,
                 std::string(op) + ": shape mismatch " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
}

void ZeroPaddingRows(Matrix& m, const std::vector<char>& mask) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!mask[r]) m.row(r).setZero();
  }
}

bool HasPadding(const SequenceLayout& layout) {
  return layout.ValidRows() != layout.rows;
}

}  // namespace

Var MatMul(Var a, Var b) {
  ACCENTBN_CHECK(a.cols() == b.rows(), ErrorCode::kInvalidInput,
                 "MatMul: inner dimension mismatch");
  Tape& t = *a.tape();
  Matrix y = a.value() * b.value();
  return t.Record(std::move(y), AnyRequiresGrad({a, b}),
                  [a, b](Tape& t, int self) {
                    const Matrix& g = t.grad(self);
                    if (t.requires_grad(a.id()))
                      t.Accumulate(a.id(), g * b.value().transpose());
                    if (t.requires_grad(b.id()))
                      t.Accumulate(b.id(), a.value().transpose() * g);
                  });
}

Var Linear(Var x, Var w, Var b) {
  ACCENTBN_CHECK(x.cols() == w.rows(), ErrorCode::kInvalidInput,
                 "Linear: input width " + std::to_string(x.cols()) +
                     " vs weight rows " + std::to_string(w.rows()));
  Tape& t = *x.tape();
  Matrix y = x.value() * w.value();
  if (b.valid()) {
    ACCENTBN_CHECK(b.rows() == 1 && b.cols() == w.cols(),
                   ErrorCode::kInvalidInput, "Linear: bias shape");
    y.rowwise() += b.value().row(0);
  }
  return t.Record(std::move(y), AnyRequiresGrad({x, w, b}),
                  [x, w, b](Tape& t, int self) {
                    const Matrix& g = t.grad(self);
                    if (t.requires_grad(x.id()))
                      t.Accumulate(x.id(), g * w.value().transpose());
                    if (t.requires_grad(w.id()))
                      t.Accumulate(w.id(), x.value().transpose() * g);
                    if (b.valid() && t.requires_grad(b.id()))
                      t.Accumulate(b.id(), g.colwise().sum());
                  });
}

Var Add(Var a, Var b) {
  CheckSameShape(a, b, "Add");
  Tape& t = *a.tape();
  return t.Record(a.value() + b.value(), AnyRequiresGrad({a, b}),
                  [a, b](Tape& t, int self) {
                    t.Accumulate(a.id(), t.grad(self));
                    t.Accumulate(b.id(), t.grad(self));
                  });
}

Var Sub(Var a, Var b) {
  CheckSameShape(a, b, "Sub");
  Tape& t = *a.tape();
  return t.Record(a.value() - b.value(), AnyRequiresGrad({a, b}),
                  [a, b](Tape& t, int self) {
                    t.Accumulate(a.id(), t.grad(self));
                    t.Accumulate(b.id(), -t.grad(self));
                  });
}

Var AddRowBroadcast(Var x, Var row) {
  ACCENTBN_CHECK(row.rows() == 1 && row.cols() == x.cols(),
                 ErrorCode::kInvalidInput, "AddRowBroadcast: shape mismatch");
  Tape& t = *x.tape();
  Matrix y = x.value();
  y.rowwise() += row.value().row(0);
  return t.Record(std::move(y), AnyRequiresGrad({x, row}),
                  [x, row](Tape& t, int self) {
                    t.Accumulate(x.id(), t.grad(self));
                    if (t.requires_grad(row.id()))
                      t.Accumulate(row.id(), t.grad(self).colwise().sum());
                  });
}

Var Mul(Var a, Var b) {
  CheckSameShape(a, b, "Mul");
  Tape& t = *a.tape();
  return t.Record(a.value().cwiseProduct(b.value()), AnyRequiresGrad({a, b}),
                  [a, b](Tape& t, int self) {
                    const Matrix& g = t.grad(self);
                    if (t.requires_grad(a.id()))
                      t.Accumulate(a.id(), g.cwiseProduct(b.value()));
                    if (t.requires_grad(b.id()))
                      t.Accumulate(b.id(), g.cwiseProduct(a.value()));
                  });
}

Var Scale(Var x, double s) {
  Tape& t = *x.tape();
  return t.Record(x.value() * s, AnyRequiresGrad({x}),
                  [x, s](Tape& t, int self) {
                    t.Accumulate(x.id(), t.grad(self) * s);
                  });
}

Var Relu(Var x) {
  Tape& t = *x.tape();
  return t.Record(x.value().cwiseMax(0.0), AnyRequiresGrad({x}),
                  [x](Tape& t, int self) {
                    const Matrix& y = t.value(self);
                    t.Accumulate(x.id(),
                                 (y.array() > 0.0)
                                     .select(t.grad(self).array(), 0.0)
                                     .matrix());
                  });
}

Var Tanh(Var x) {
  Tape& t = *x.tape();
  return t.Record(x.value().array().tanh().matrix(), AnyRequiresGrad({x}),
                  [x](Tape& t, int self) {
                    const Matrix& y = t.value(self);
                    t.Accumulate(x.id(), (t.grad(self).array() *
                                          (1.0 - y.array().square()))
                                             .matrix());
                  });
}

Var Sigmoid(Var x) {
  Tape& t = *x.tape();
  Matrix y = (1.0 / (1.0 + (-x.value().array()).exp())).matrix();
  return t.Record(std::move(y), AnyRequiresGrad({x}),
                  [x](Tape& t, int self) {
                    const Matrix& y = t.value(self);
                    t.Accumulate(x.id(), (t.grad(self).array() * y.array() *
                                          (1.0 - y.array()))
                                             .matrix());
                  });
}

Var LayerNorm(Var x, Var gamma, Var beta, double eps) {
  ACCENTBN_CHECK(gamma.rows() == 1 && gamma.cols() == x.cols() &&
                     beta.rows() == 1 && beta.cols() == x.cols(),
                 ErrorCode::kInvalidInput, "LayerNorm: parameter shape");
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  const Eigen::Index n = xv.cols();
  auto xhat = std::make_shared<Matrix>(xv.rows(), n);
  auto inv_std = std::make_shared<Vector>(xv.rows());
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const double mu = xv.row(r).mean();
    const double var = (xv.row(r).array() - mu).square().mean();
    (*inv_std)(r) = 1.0 / std::sqrt(var + eps);
    xhat->row(r) = (xv.row(r).array() - mu) * (*inv_std)(r);
  }
  Matrix y = (xhat->array().rowwise() * gamma.value().row(0).array())
                 .matrix();
  y.rowwise() += beta.value().row(0);
  return t.Record(
      std::move(y), AnyRequiresGrad({x, gamma, beta}),
      [x, gamma, beta, xhat, inv_std, n](Tape& t, int self) {
        const Matrix& g = t.grad(self);
        if (t.requires_grad(gamma.id()))
          t.Accumulate(gamma.id(), g.cwiseProduct(*xhat).colwise().sum());
        if (t.requires_grad(beta.id()))
          t.Accumulate(beta.id(), g.colwise().sum());
        if (!t.requires_grad(x.id())) return;
        const Matrix dxhat =
            (g.array().rowwise() * gamma.value().row(0).array()).matrix();
        Matrix dx(g.rows(), n);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
          const double s1 = dxhat.row(r).sum();
          const double s2 = dxhat.row(r).dot(xhat->row(r));
          dx.row(r) = ((*inv_std)(r) / n) *
                      (n * dxhat.row(r).array() - s1 -
                       xhat->row(r).array() * s2)
                          .matrix();
        }
        t.Accumulate(x.id(), dx);
      });
}

Var Dropout(Var x, double p, bool always) {
  Tape& t = *x.tape();
  if (p <= 0.0 || (!t.training() && !always)) return x;
  ACCENTBN_CHECK(p < 1.0, ErrorCode::kInvalidInput, "dropout p must be < 1");
  std::bernoulli_distribution keep(1.0 - p);
  auto mask = std::make_shared<Matrix>(x.rows(), x.cols());
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask->size(); ++i) {
    mask->data()[i] = keep(t.rng()) ? scale : 0.0;
  }
  return t.Record(x.value().cwiseProduct(*mask), AnyRequiresGrad({x}),
                  [x, mask](Tape& t, int self) {
                    t.Accumulate(x.id(), t.grad(self).cwiseProduct(*mask));
                  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  ACCENTBN_CHECK(!parts.empty(), ErrorCode::kInvalidInput,
                 "ConcatCols: no inputs");
  Tape& t = *parts.front().tape();
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  bool grad = false;
  for (const Var& v : parts) {
    ACCENTBN_CHECK(v.rows() == rows, ErrorCode::kInvalidInput,
                   "ConcatCols: row mismatch");
    cols += v.cols();
    grad = grad || t.requires_grad(v.id());
  }
  Matrix y(rows, cols);
  Eigen::Index c = 0;
  for (const Var& v : parts) {
    y.middleCols(c, v.cols()) = v.value();
    c += v.cols();
  }
  return t.Record(std::move(y), grad, [parts](Tape& t, int self) {
    const Matrix& g = t.grad(self);
    Eigen::Index c = 0;
    for (const Var& v : parts) {
      if (t.requires_grad(v.id()))
        t.Accumulate(v.id(), g.middleCols(c, v.cols()));
      c += v.cols();
    }
  });
}

Var SliceCols(Var x, Eigen::Index start, Eigen::Index count) {
  ACCENTBN_CHECK(start >= 0 && count >= 0 && start + count <= x.cols(),
                 ErrorCode::kInvalidInput, "SliceCols: out of range");
  Tape& t = *x.tape();
  return t.Record(x.value().middleCols(start, count), AnyRequiresGrad({x}),
                  [x, start, count](Tape& t, int self) {
                    Matrix g = Matrix::Zero(x.rows(), x.cols());
                    g.middleCols(start, count) = t.grad(self);
                    t.Accumulate(x.id(), g);
                  });
}

Var GatherRows(Var table, const std::vector<int>& index) {
  Tape& t = *table.tape();
  const Matrix& tv = table.value();
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(index.size()), tv.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0) continue;
    ACCENTBN_CHECK(index[i] < tv.rows(), ErrorCode::kInvalidInput,
                   "GatherRows: index out of range");
    y.row(static_cast<Eigen::Index>(i)) = tv.row(index[i]);
  }
  return t.Record(std::move(y), AnyRequiresGrad({table}),
                  [table, index](Tape& t, int self) {
                    const Matrix& g = t.grad(self);
                    Matrix d = Matrix::Zero(table.rows(), table.cols());
                    for (size_t i = 0; i < index.size(); ++i) {
                      if (index[i] >= 0)
                        d.row(index[i]) += g.row(static_cast<Eigen::Index>(i));
                    }
                    t.Accumulate(table.id(), d);
                  });
}

Var MaskRows(Var x, const std::vector<char>& mask) {
  ACCENTBN_CHECK(static_cast<Eigen::Index>(mask.size()) == x.rows(),
                 ErrorCode::kInvalidInput, "MaskRows: mask length");
  Tape& t = *x.tape();
  Matrix y = x.value();
  ZeroPaddingRows(y, mask);
  return t.Record(std::move(y), AnyRequiresGrad({x}),
                  [x, mask](Tape& t, int self) {
                    Matrix g = t.grad(self);
                    ZeroPaddingRows(g, mask);
                    t.Accumulate(x.id(), g);
                  });
}

Var Conv1d(Var x, const SequenceLayout& layout, Var w, Var b, int kernel) {
  const Eigen::Index in = x.cols();
  ACCENTBN_CHECK(kernel >= 1 && w.rows() == kernel * in,
                 ErrorCode::kInvalidInput,
                 "Conv1d: weight rows must be kernel * in_channels");
  ACCENTBN_CHECK(x.rows() == layout.rows, ErrorCode::kInvalidInput,
                 "Conv1d: layout/rows mismatch");
  Tape& t = *x.tape();
  const int pad_left = (kernel - 1) / 2;
  const Matrix& xv = x.value();
  auto col = std::make_shared<Matrix>(Matrix::Zero(xv.rows(), kernel * in));
  for (const auto& s : layout.segments) {
    for (Eigen::Index r = 0; r < s.length; ++r) {
      for (int j = 0; j < kernel; ++j) {
        const Eigen::Index src = r + j - pad_left;
        if (src < 0 || src >= s.length) continue;
        col->block(s.offset + r, j * in, 1, in) = xv.row(s.offset + src);
      }
    }
  }
  Matrix y = (*col) * w.value();
  if (b.valid()) y.rowwise() += b.value().row(0);
  const bool padded = HasPadding(layout);
  auto mask = std::make_shared<std::vector<char>>(layout.RowMask());
  if (padded) ZeroPaddingRows(y, *mask);
  return t.Record(
      std::move(y), AnyRequiresGrad({x, w, b}),
      [x, w, b, col, mask, padded, layout, kernel, in, pad_left](Tape& t,
                                                                 int self) {
        Matrix g = t.grad(self);
        if (padded) ZeroPaddingRows(g, *mask);
        if (t.requires_grad(w.id()))
          t.Accumulate(w.id(), col->transpose() * g);
        if (b.valid() && t.requires_grad(b.id()))
          t.Accumulate(b.id(), g.colwise().sum());
        if (!t.requires_grad(x.id())) return;
        const Matrix dcol = g * w.value().transpose();
        Matrix dx = Matrix::Zero(x.rows(), in);
        for (const auto& s : layout.segments) {
          for (Eigen::Index r = 0; r < s.length; ++r) {
            for (int j = 0; j < kernel; ++j) {
              const Eigen::Index src = r + j - pad_left;
              if (src < 0 || src >= s.length) continue;
              dx.row(s.offset + src) += dcol.block(s.offset + r, j * in, 1, in);
            }
          }
        }
        t.Accumulate(x.id(), dx);
      });
}

Var MaxPool1d(Var x, const SequenceLayout& layout, int width) {
  ACCENTBN_CHECK(width >= 1, ErrorCode::kInvalidInput, "MaxPool1d: width");
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  Matrix y = Matrix::Zero(xv.rows(), xv.cols());
  auto arg = std::make_shared<Eigen::Matrix<Eigen::Index, Eigen::Dynamic,
                                            Eigen::Dynamic, Eigen::RowMajor>>(
      Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic,
                    Eigen::RowMajor>::Constant(xv.rows(), xv.cols(), -1));
  for (const auto& s : layout.segments) {
    for (Eigen::Index r = 0; r < s.length; ++r) {
      const Eigen::Index row = s.offset + r;
      for (Eigen::Index c = 0; c < xv.cols(); ++c) {
        Eigen::Index best = row;
        for (Eigen::Index k = std::max<Eigen::Index>(0, r - width + 1); k < r;
             ++k) {
          if (xv(s.offset + k, c) > xv(best, c)) best = s.offset + k;
        }
        y(row, c) = xv(best, c);
        (*arg)(row, c) = best;
      }
    }
  }
  return t.Record(std::move(y), AnyRequiresGrad({x}),
                  [x, arg](Tape& t, int self) {
                    const Matrix& g = t.grad(self);
                    Matrix d = Matrix::Zero(x.rows(), x.cols());
                    for (Eigen::Index r = 0; r < g.rows(); ++r) {
                      for (Eigen::Index c = 0; c < g.cols(); ++c) {
                        if ((*arg)(r, c) >= 0) d((*arg)(r, c), c) += g(r, c);
                      }
                    }
                    t.Accumulate(x.id(), d);
                  });
}

Var MultiHeadAttention(Var q, Var k, Var v, const SequenceLayout& layout,
                       int heads) {
  CheckSameShape(q, k, "MultiHeadAttention");
  CheckSameShape(q, v, "MultiHeadAttention");
  const Eigen::Index d = q.cols();
  ACCENTBN_CHECK(heads >= 1 && d % heads == 0, ErrorCode::kInvalidInput,
                 "MultiHeadAttention: width not divisible by heads");
  Tape& t = *q.tape();
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Matrix& qv = q.value();
  const Matrix& kv = k.value();
  const Matrix& vv = v.value();
  Matrix y = Matrix::Zero(qv.rows(), d);
  // probs[segment * heads + head]
  auto probs = std::make_shared<std::vector<Matrix>>();
  probs->reserve(layout.size() * heads);
  for (const auto& s : layout.segments) {
    for (int h = 0; h < heads; ++h) {
      const auto qs = qv.block(s.offset, h * dh, s.length, dh);
      const auto ks = kv.block(s.offset, h * dh, s.length, dh);
      const auto vs = vv.block(s.offset, h * dh, s.length, dh);
      Matrix p = (qs * ks.transpose()) * scale;
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const double m = p.row(r).maxCoeff();
        p.row(r) = (p.row(r).array() - m).exp();
        p.row(r) /= p.row(r).sum();
      }
      y.block(s.offset, h * dh, s.length, dh) = p * vs;
      probs->push_back(std::move(p));
    }
  }
  return t.Record(
      std::move(y), AnyRequiresGrad({q, k, v}),
      [q, k, v, layout, heads, dh, scale, probs](Tape& t, int self) {
        const Matrix& g = t.grad(self);
        Matrix dq = Matrix::Zero(q.rows(), q.cols());
        Matrix dk = Matrix::Zero(k.rows(), k.cols());
        Matrix dv = Matrix::Zero(v.rows(), v.cols());
        size_t idx = 0;
        for (const auto& s : layout.segments) {
          for (int h = 0; h < heads; ++h, ++idx) {
            const Matrix& p = (*probs)[idx];
            const auto gs = g.block(s.offset, h * dh, s.length, dh);
            const auto qs = q.value().block(s.offset, h * dh, s.length, dh);
            const auto ks = k.value().block(s.offset, h * dh, s.length, dh);
            const auto vs = v.value().block(s.offset, h * dh, s.length, dh);
            dv.block(s.offset, h * dh, s.length, dh) = p.transpose() * gs;
            const Matrix dp = gs * vs.transpose();
            Matrix ds = p.cwiseProduct(dp);
            const Vector row_dot = ds.rowwise().sum();
            ds -= (p.array().colwise() * row_dot.array()).matrix();
            dq.block(s.offset, h * dh, s.length, dh) = (ds * ks) * scale;
            dk.block(s.offset, h * dh, s.length, dh) =
                (ds.transpose() * qs) * scale;
          }
        }
        t.Accumulate(q.id(), dq);
        t.Accumulate(k.id(), dk);
        t.Accumulate(v.id(), dv);
      });
}

namespace {

struct GruCache {
  // Per row of the output: gate activations and the recurrent terms.
  Matrix r, z, n, hn, hprev;
};

}  // namespace

Var Gru(Var xproj, const SequenceLayout& layout, Var wh, Var bh, bool reverse,
        Var h0) {
  const Eigen::Index hidden = wh.rows();
  ACCENTBN_CHECK(wh.cols() == 3 * hidden && xproj.cols() == 3 * hidden &&
                     bh.rows() == 1 && bh.cols() == 3 * hidden,
                 ErrorCode::kInvalidInput, "Gru: parameter shapes");
  ACCENTBN_CHECK(xproj.rows() == layout.rows, ErrorCode::kInvalidInput,
                 "Gru: layout/rows mismatch");
  if (h0.valid()) {
    ACCENTBN_CHECK(h0.rows() == static_cast<Eigen::Index>(layout.size()) &&
                       h0.cols() == hidden,
                   ErrorCode::kInvalidInput, "Gru: h0 shape");
  }
  Tape& t = *xproj.tape();
  const Matrix& xp = xproj.value();
  const Matrix& whv = wh.value();
  const RowVector bhv = bh.value().row(0);
  const Eigen::Index H = hidden;
  auto cache = std::make_shared<GruCache>();
  cache->r = Matrix::Zero(xp.rows(), H);
  cache->z = Matrix::Zero(xp.rows(), H);
  cache->n = Matrix::Zero(xp.rows(), H);
  cache->hn = Matrix::Zero(xp.rows(), H);
  cache->hprev = Matrix::Zero(xp.rows(), H);
  Matrix y = Matrix::Zero(xp.rows(), H);
  for (size_t si = 0; si < layout.size(); ++si) {
    const Segment& s = layout.segments[si];
    RowVector h = h0.valid() ? RowVector(h0.value().row(si))
                             : RowVector(RowVector::Zero(H));
    for (Eigen::Index step = 0; step < s.length; ++step) {
      const Eigen::Index row =
          s.offset + (reverse ? s.length - 1 - step : step);
      const RowVector hh = h * whv + bhv;
      const auto x = xp.row(row);
      const RowVector r =
          (1.0 / (1.0 + (-(x.head(H) + hh.head(H))).array().exp())).matrix();
      const RowVector z =
          (1.0 / (1.0 + (-(x.segment(H, H) + hh.segment(H, H))).array().exp()))
              .matrix();
      const RowVector n =
          (x.tail(H).array() + r.array() * hh.tail(H).array()).tanh().matrix();
      cache->r.row(row) = r;
      cache->z.row(row) = z;
      cache->n.row(row) = n;
      cache->hn.row(row) = hh.tail(H);
      cache->hprev.row(row) = h;
      h = ((1.0 - z.array()) * n.array() + z.array() * h.array()).matrix();
      y.row(row) = h;
    }
  }
  return t.Record(
      std::move(y), AnyRequiresGrad({xproj, wh, bh, h0}),
      [xproj, wh, bh, h0, layout, reverse, cache, H](Tape& t, int self) {
        const Matrix& g = t.grad(self);
        Matrix dxp = Matrix::Zero(xproj.rows(), 3 * H);
        Matrix dwh = Matrix::Zero(H, 3 * H);
        RowVector dbh = RowVector::Zero(3 * H);
        Matrix dh0 = h0.valid() ? Matrix::Zero(h0.rows(), H) : Matrix();
        const Matrix& whv = wh.value();
        for (size_t si = 0; si < layout.size(); ++si) {
          const Segment& s = layout.segments[si];
          RowVector carry = RowVector::Zero(H);
          for (Eigen::Index step = s.length - 1; step >= 0; --step) {
            const Eigen::Index row =
                s.offset + (reverse ? s.length - 1 - step : step);
            const auto r = cache->r.row(row).array();
            const auto z = cache->z.row(row).array();
            const auto n = cache->n.row(row).array();
            const auto hprev = cache->hprev.row(row).array();
            const RowVector dh = g.row(row) + carry;
            const auto dha = dh.array();
            const RowVector dan = (dha * (1.0 - z) * (1.0 - n.square())).matrix();
            const RowVector daz = (dha * (hprev - n) * z * (1.0 - z)).matrix();
            const RowVector dar =
                (dan.array() * cache->hn.row(row).array() * r * (1.0 - r))
                    .matrix();
            RowVector dhh(3 * H);
            dhh << dar, daz, (dan.array() * r).matrix();
            dxp.row(row) << dar, daz, dan;
            dwh.noalias() += cache->hprev.row(row).transpose() * dhh;
            dbh += dhh;
            carry = (dha * z).matrix() + dhh * whv.transpose();
          }
          if (h0.valid()) dh0.row(si) = carry;
        }
        t.Accumulate(xproj.id(), dxp);
        if (t.requires_grad(wh.id())) t.Accumulate(wh.id(), dwh);
        if (t.requires_grad(bh.id())) t.Accumulate(bh.id(), dbh);
        if (h0.valid() && t.requires_grad(h0.id())) t.Accumulate(h0.id(), dh0);
      });
}

Var MseLoss(Var pred, const Matrix& target, const std::vector<char>& mask) {
  ACCENTBN_CHECK(pred.rows() == target.rows() && pred.cols() == target.cols(),
                 ErrorCode::kInvalidInput, "MseLoss: shape mismatch");
  ACCENTBN_CHECK(static_cast<Eigen::Index>(mask.size()) == pred.rows(),
                 ErrorCode::kInvalidInput, "MseLoss: mask length mismatch");
  Tape& t = *pred.tape();
  Eigen::Index valid = 0;
  for (char m : mask) valid += m ? 1 : 0;
  ACCENTBN_CHECK(valid > 0, ErrorCode::kInvalidInput,
                 "MseLoss: every frame is masked");
  const double denom = static_cast<double>(valid * pred.cols());
  auto diff = std::make_shared<Matrix>(pred.value() - target);
  ZeroPaddingRows(*diff, mask);
  Matrix y(1, 1);
  y(0, 0) = diff->squaredNorm() / denom;
  return t.Record(std::move(y), AnyRequiresGrad({pred}),
                  [pred, diff, denom](Tape& t, int self) {
                    t.Accumulate(pred.id(),
                                 *diff * (2.0 * t.grad(self)(0, 0) / denom));
                  });
}

Var SumAll(Var x) {
  Tape& t = *x.tape();
  Matrix y(1, 1);
  y(0, 0) = x.value().sum();
  return t.Record(std::move(y), AnyRequiresGrad({x}), [x](Tape& t, int self) {
    t.Accumulate(x.id(),
                 Matrix::Constant(x.rows(), x.cols(), t.grad(self)(0, 0)));
  });
}

Var SumScalars(const std::vector<Var>& terms) {
  ACCENTBN_CHECK(!terms.empty(), ErrorCode::kInvalidInput,
                 "SumScalars: no terms");
  Var acc = terms.front();
  for (size_t i = 1; i < terms.size(); ++i) acc = Add(acc, terms[i]);
  return acc;
}

}  // namespace accentbn::nn
