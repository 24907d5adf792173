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

#ifndef ACCENTBN_NN_LAYERS_H_
#define ACCENTBN_NN_LAYERS_H_

#include <random>
#include <string>
#include <vector>

#include "nn/ops.h"

namespace accentbn::nn {

// Deterministic initializers driven by the model seed.
class Initializer {
 public:
  explicit Initializer(uint64_t seed) : rng_(seed) {}

  Matrix XavierUniform(Eigen::Index rows, Eigen::Index cols,
                       Eigen::Index fan_in, Eigen::Index fan_out);
  Matrix Normal(Eigen::Index rows, Eigen::Index cols, double stddev);

 private:
  std::mt19937_64 rng_;
};

class LinearLayer {
 public:
  LinearLayer() = default;
  LinearLayer(ParameterStore& store, Initializer& init, const std::string& name,
              Eigen::Index in, Eigen::Index out, bool bias = true);
  Var Forward(Tape& t, Var x) const;

  Parameter* weight = nullptr;
  Parameter* bias = nullptr;
};

class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  LayerNormLayer(ParameterStore& store, const std::string& name,
                 Eigen::Index dim);
  Var Forward(Tape& t, Var x) const;

  Parameter* gamma = nullptr;
  Parameter* beta = nullptr;
};

class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(ParameterStore& store, Initializer& init, const std::string& name,
              Eigen::Index in, Eigen::Index out, int kernel);
  Var Forward(Tape& t, Var x, const SequenceLayout& layout) const;

  Parameter* weight = nullptr;
  Parameter* bias = nullptr;
  int kernel = 1;
};

class EmbeddingLayer {
 public:
  EmbeddingLayer() = default;
  EmbeddingLayer(ParameterStore& store, Initializer& init,
                 const std::string& name, Eigen::Index count, Eigen::Index dim);
  Var Forward(Tape& t, const std::vector<int>& ids) const;

  Parameter* table = nullptr;
};

// Self-attention sublayer with output projection.
class SelfAttentionLayer {
 public:
  SelfAttentionLayer() = default;
  SelfAttentionLayer(ParameterStore& store, Initializer& init,
                     const std::string& name, Eigen::Index dim, int heads);
  Var Forward(Tape& t, Var x, const SequenceLayout& layout) const;

  LinearLayer q, k, v, o;
  int heads = 1;
};

struct FFTBlockConfig {
  Eigen::Index hidden = 192;
  Eigen::Index filter = 768;
  int heads = 2;
  int kernel1 = 3;
  int kernel2 = 1;
  double dropout = 0.1;
  // Drops the attention sublayer; with kernel sizes of 1 the block is then
  // strictly frame-local.
  bool attention = true;
};

// Feed-forward transformer block: post-norm self-attention followed by a
// two-layer convolutional feed-forward network.
class FFTBlock {
 public:
  FFTBlock() = default;
  FFTBlock(ParameterStore& store, Initializer& init, const std::string& name,
           const FFTBlockConfig& config);
  Var Forward(Tape& t, Var x, const SequenceLayout& layout) const;

 private:
  FFTBlockConfig config_;
  SelfAttentionLayer attention_;
  LayerNormLayer norm1_, norm2_;
  Conv1dLayer conv1_, conv2_;
};

// Single-direction GRU with its own input projection.
class GruLayer {
 public:
  GruLayer() = default;
  GruLayer(ParameterStore& store, Initializer& init, const std::string& name,
           Eigen::Index in, Eigen::Index hidden);
  Var Forward(Tape& t, Var x, const SequenceLayout& layout, bool reverse,
              Var h0 = Var()) const;
  Eigen::Index hidden() const { return recurrent->value.rows(); }

  LinearLayer input;
  Parameter* recurrent = nullptr;
  Parameter* recurrent_bias = nullptr;
};

// y = relu(x W1 + b1) * s + x * (1 - s), s = sigmoid(x W2 + b2).
class HighwayLayer {
 public:
  HighwayLayer() = default;
  HighwayLayer(ParameterStore& store, Initializer& init,
               const std::string& name, Eigen::Index dim);
  Var Forward(Tape& t, Var x) const;

  LinearLayer transform, gate;
};

}  // namespace accentbn::nn

#endif  // ACCENTBN_NN_LAYERS_H_
