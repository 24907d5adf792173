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

#ifndef ACCENTBN_MODELS_BN2MEL_H_
#define ACCENTBN_MODELS_BN2MEL_H_

#include <memory>
#include <optional>
#include <vector>

#include "core/types.h"
#include "core/vocabulary.h"
#include "json.hpp"
#include "nn/checkpoint.h"
#include "nn/layers.h"

namespace accentbn::models {

struct BN2MelConfig {
  int bn_dim = kDefaultBnDim;
  int mel_dim = kNumMels;
  int cbhg_dim = 128;         // input projection, bank channels, highway width
  int bank_size = 8;          // kernels 1..K
  int projection_dim = 256;   // first projection conv
  int highway_layers = 4;
  int gru_dim = 128;          // per direction
  int decoder_dim = 256;
  std::vector<int> prenet_dims = {256, 128};
  double prenet_dropout = 0.5;
  int postnet_layers = 5;
  int postnet_channels = 256;
  int postnet_kernel = 5;
  int speaker_dim = 64;
  uint64_t seed = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
  static BN2MelConfig FromJson(const nlohmann::json& j);
};

struct BN2MelBatch {
  std::vector<const Matrix*> inputs;   // normalized BN
  std::vector<const Matrix*> targets;  // normalized mel
  std::vector<int> speakers;
  bool pad = true;
};

struct BN2MelLosses {
  nn::Var total;
  nn::Var pre;
  nn::Var post;
};

struct BN2MelOutput {
  MelMatrix pre_mel;
  MelMatrix post_mel;
  // Previous-frame input the decoder saw at every step (normalized domain).
  Matrix decoder_input;
};

// Row t of the result is the source row for decoder step t: t - 1 within
// each segment and -1 (the zero go-frame) at segment starts and padding.
std::vector<int> PreviousFrameIndex(const nn::SequenceLayout& layout);

// CBHG encoder, frame-synchronous autoregressive GRU decoder with prenet,
// convolutional postnet added as a residual.
class BN2MelModel {
 public:
  BN2MelModel(const BN2MelConfig& config, Vocabulary speakers);
  BN2MelModel(const BN2MelModel&) = delete;
  BN2MelModel& operator=(const BN2MelModel&) = delete;

  const BN2MelConfig& config() const { return config_; }
  const Vocabulary& speakers() const { return speakers_; }
  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }
  const NormStats& bn_stats() const { return bn_stats_; }
  const NormStats& mel_stats() const { return mel_stats_; }
  void set_stats(NormStats bn, NormStats mel) {
    bn_stats_ = std::move(bn);
    mel_stats_ = std::move(mel);
  }

  nn::Var Encode(nn::Tape& t, nn::Var x, const nn::SequenceLayout& layout,
                 const std::vector<int>& speakers) const;
  // Teacher-forced decoding; returns {pre, post}.
  std::pair<nn::Var, nn::Var> DecodeTeacherForced(
      nn::Tape& t, nn::Var encoded, nn::Var teacher,
      const nn::SequenceLayout& layout) const;
  nn::Var Postnet(nn::Tape& t, nn::Var pre,
                  const nn::SequenceLayout& layout) const;
  BN2MelLosses Loss(nn::Tape& t, const BN2MelBatch& batch) const;

  // Teacher forcing when `teacher_mel` is given, free-running otherwise.
  // `seed` drives the prenet dropout, which stays active at inference.
  BN2MelOutput Forward(const BNMatrix& bn, int speaker,
                       const std::optional<MelMatrix>& teacher_mel,
                       uint64_t seed = 0) const;

  nn::CheckpointData ToCheckpoint() const;
  static std::unique_ptr<BN2MelModel> FromCheckpoint(
      const nn::CheckpointData& data);

 private:
  nn::Var Prenet(nn::Tape& t, nn::Var prev) const;
  nn::Var Project(nn::Tape& t, nn::Var h, nn::Var encoded) const;
  void CheckSpeaker(int speaker) const;

  BN2MelConfig config_;
  Vocabulary speakers_;
  nn::ParameterStore params_;
  NormStats bn_stats_;
  NormStats mel_stats_;

  nn::LinearLayer input_;
  std::vector<nn::Conv1dLayer> bank_;
  nn::Conv1dLayer projection1_, projection2_;
  std::vector<nn::HighwayLayer> highways_;
  nn::GruLayer gru_forward_, gru_backward_;
  nn::EmbeddingLayer speaker_embedding_;
  nn::LinearLayer speaker_projection_;
  std::vector<nn::LinearLayer> prenet_;
  nn::GruLayer decoder_;
  nn::LinearLayer mel_out_;
  std::vector<nn::Conv1dLayer> postnet_;
};

}  // namespace accentbn::models

#endif  // ACCENTBN_MODELS_BN2MEL_H_
