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

#ifndef ACCENTBN_MODELS_BN2BN_H_
#define ACCENTBN_MODELS_BN2BN_H_

#include <memory>
#include <string>
#include <vector>

#include "core/types.h"
#include "core/vocabulary.h"
#include "json.hpp"
#include "nn/checkpoint.h"
#include "nn/layers.h"

namespace accentbn::models {

struct BN2BNConfig {
  int fft_layers = 4;
  int hidden = 192;
  int filter = 768;
  int heads = 2;
  int ffn_kernel1 = 3;
  int ffn_kernel2 = 1;
  int conv_layers = 2;
  int conv_kernel = 3;
  int speaker_dim = 64;
  int bn_dim = kDefaultBnDim;
  double dropout = 0.1;
  // false: no attention, no positions and kernel size 1 everywhere, which
  // makes the network a per-frame function.
  bool context = true;
  std::string accent;
  uint64_t seed = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
  static BN2BNConfig FromJson(const nlohmann::json& j);
};

struct BN2BNBatch {
  std::vector<const Matrix*> inputs;   // normalized BN_ua
  std::vector<const Matrix*> targets;  // normalized BN_ac
  std::vector<int> speakers;
  bool pad = true;
};

// Accent transfer network BN_ua -> BN_ac for one accent, conditioned on the
// accent speaker. Predicts a residual on top of its input.
class BN2BNModel {
 public:
  BN2BNModel(const BN2BNConfig& config, Vocabulary speakers);
  BN2BNModel(const BN2BNModel&) = delete;
  BN2BNModel& operator=(const BN2BNModel&) = delete;

  const BN2BNConfig& config() const { return config_; }
  const Vocabulary& speakers() const { return speakers_; }
  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }
  // Shared by input and output sides.
  const NormStats& bn_stats() const { return bn_stats_; }
  void set_bn_stats(NormStats stats) { bn_stats_ = std::move(stats); }

  // x: normalized rows; speakers: one index per segment.
  nn::Var Apply(nn::Tape& t, nn::Var x, const nn::SequenceLayout& layout,
                const std::vector<int>& speakers) const;
  nn::Var Loss(nn::Tape& t, const BN2BNBatch& batch) const;

  BNMatrix Forward(const BNMatrix& bn_ua, int speaker) const;

  nn::CheckpointData ToCheckpoint() const;
  static std::unique_ptr<BN2BNModel> FromCheckpoint(
      const nn::CheckpointData& data);

 private:
  void CheckSpeaker(int speaker) const;

  BN2BNConfig config_;
  Vocabulary speakers_;
  nn::ParameterStore params_;
  NormStats bn_stats_;

  nn::LinearLayer input_;
  nn::EmbeddingLayer speaker_embedding_;
  nn::LinearLayer speaker_projection_;
  std::vector<nn::FFTBlock> blocks_;
  std::vector<nn::Conv1dLayer> convs_;
  nn::LinearLayer output_;
};

// Packs variable-length matrices into one (optionally padded) matrix.
Matrix StackRows(const std::vector<const Matrix*>& parts,
                 const nn::SequenceLayout& layout, Eigen::Index cols);
nn::SequenceLayout LayoutFor(const std::vector<const Matrix*>& parts,
                             bool pad);

}  // namespace accentbn::models

#endif  // ACCENTBN_MODELS_BN2BN_H_
