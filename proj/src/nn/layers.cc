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

#include "nn/layers.h"

#include <cmath>

namespace accentbn::nn {

Matrix Initializer::XavierUniform(Eigen::Index rows, Eigen::Index cols,
                                  Eigen::Index fan_in, Eigen::Index fan_out) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-a, a);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng_);
  return m;
}

Matrix Initializer::Normal(Eigen::Index rows, Eigen::Index cols,
                           double stddev) {
  std::normal_distribution<double> n(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng_);
  return m;
}

LinearLayer::LinearLayer(ParameterStore& store, Initializer& init,
                         const std::string& name, Eigen::Index in,
                         Eigen::Index out, bool with_bias) {
  weight = &store.Create(name + ".w", init.XavierUniform(in, out, in, out));
  if (with_bias) bias = &store.Create(name + ".b", Matrix::Zero(1, out));
}

Var LinearLayer::Forward(Tape& t, Var x) const {
  return Linear(x, t.Param(*weight), bias ? t.Param(*bias) : Var());
}

LayerNormLayer::LayerNormLayer(ParameterStore& store, const std::string& name,
                               Eigen::Index dim) {
  gamma = &store.Create(name + ".gamma", Matrix::Ones(1, dim));
  beta = &store.Create(name + ".beta", Matrix::Zero(1, dim));
}

Var LayerNormLayer::Forward(Tape& t, Var x) const {
  return LayerNorm(x, t.Param(*gamma), t.Param(*beta));
}

Conv1dLayer::Conv1dLayer(ParameterStore& store, Initializer& init,
                         const std::string& name, Eigen::Index in,
                         Eigen::Index out, int kernel_size)
    : kernel(kernel_size) {
  weight = &store.Create(
      name + ".w",
      init.XavierUniform(kernel * in, out, kernel * in, kernel * out));
  bias = &store.Create(name + ".b", Matrix::Zero(1, out));
}

Var Conv1dLayer::Forward(Tape& t, Var x, const SequenceLayout& layout) const {
  return Conv1d(x, layout, t.Param(*weight), t.Param(*bias), kernel);
}

EmbeddingLayer::EmbeddingLayer(ParameterStore& store, Initializer& init,
                               const std::string& name, Eigen::Index count,
                               Eigen::Index dim) {
  table = &store.Create(name + ".table", init.Normal(count, dim, 0.3));
}

Var EmbeddingLayer::Forward(Tape& t, const std::vector<int>& ids) const {
  return GatherRows(t.Param(*table), ids);
}

SelfAttentionLayer::SelfAttentionLayer(ParameterStore& store,
                                       Initializer& init,
                                       const std::string& name,
                                       Eigen::Index dim, int num_heads)
    : q(store, init, name + ".q", dim, dim),
      k(store, init, name + ".k", dim, dim),
      v(store, init, name + ".v", dim, dim),
      o(store, init, name + ".o", dim, dim),
      heads(num_heads) {}

Var SelfAttentionLayer::Forward(Tape& t, Var x,
                                const SequenceLayout& layout) const {
  Var ctx = MultiHeadAttention(q.Forward(t, x), k.Forward(t, x),
                               v.Forward(t, x), layout, heads);
  return o.Forward(t, ctx);
}

FFTBlock::FFTBlock(ParameterStore& store, Initializer& init,
                   const std::string& name, const FFTBlockConfig& config)
    : config_(config) {
  if (config.attention) {
    attention_ = SelfAttentionLayer(store, init, name + ".attn", config.hidden,
                                    config.heads);
    norm1_ = LayerNormLayer(store, name + ".norm1", config.hidden);
  }
  conv1_ = Conv1dLayer(store, init, name + ".ffn1", config.hidden,
                       config.filter, config.kernel1);
  conv2_ = Conv1dLayer(store, init, name + ".ffn2", config.filter,
                       config.hidden, config.kernel2);
  norm2_ = LayerNormLayer(store, name + ".norm2", config.hidden);
}

Var FFTBlock::Forward(Tape& t, Var x, const SequenceLayout& layout) const {
  if (config_.attention) {
    Var a = Dropout(attention_.Forward(t, x, layout), config_.dropout);
    x = norm1_.Forward(t, Add(x, a));
  }
  Var f = conv2_.Forward(t, Relu(conv1_.Forward(t, x, layout)), layout);
  f = Dropout(f, config_.dropout);
  return norm2_.Forward(t, Add(x, f));
}

GruLayer::GruLayer(ParameterStore& store, Initializer& init,
                   const std::string& name, Eigen::Index in,
                   Eigen::Index hidden)
    : input(store, init, name + ".in", in, 3 * hidden) {
  recurrent = &store.Create(
      name + ".wh", init.XavierUniform(hidden, 3 * hidden, hidden, hidden));
  recurrent_bias = &store.Create(name + ".bh", Matrix::Zero(1, 3 * hidden));
}

Var GruLayer::Forward(Tape& t, Var x, const SequenceLayout& layout,
                      bool reverse, Var h0) const {
  return Gru(input.Forward(t, x), layout, t.Param(*recurrent),
             t.Param(*recurrent_bias), reverse, h0);
}

HighwayLayer::HighwayLayer(ParameterStore& store, Initializer& init,
                           const std::string& name, Eigen::Index dim)
    : transform(store, init, name + ".h", dim, dim),
      gate(store, init, name + ".t", dim, dim) {
  // Bias the gate towards carrying the input through at initialization.
  gate.bias->value.setConstant(-1.0);
}

Var HighwayLayer::Forward(Tape& t, Var x) const {
  Var h = Relu(transform.Forward(t, x));
  Var s = Sigmoid(gate.Forward(t, x));
  Var one_minus_s = Scale(Sub(s, t.Constant(Matrix::Ones(s.rows(), s.cols()))),
                          -1.0);
  return Add(Mul(h, s), Mul(x, one_minus_s));
}

}  // namespace accentbn::nn
