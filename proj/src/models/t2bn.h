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

#ifndef ACCENTBN_MODELS_T2BN_H_
#define ACCENTBN_MODELS_T2BN_H_

#include <atomic>
#include <memory>
#include <optional>
#include <vector>

#include "core/manifest.h"
#include "core/types.h"
#include "core/vocabulary.h"
#include "json.hpp"
#include "nn/checkpoint.h"
#include "nn/layers.h"

namespace accentbn::models {

struct T2BNConfig {
  int encoder_layers = 6;
  int decoder_layers = 6;
  int hidden = 192;
  int filter = 768;
  int heads = 2;
  int ffn_kernel1 = 3;
  int ffn_kernel2 = 1;
  double dropout = 0.1;
  int duration_channels = 0;  // 0: same as hidden
  int duration_kernel = 3;
  int bn_dim = kDefaultBnDim;
  uint64_t seed = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
  static T2BNConfig FromJson(const nlohmann::json& j);
};

// Log-domain duration transform used for training targets.
double DurationTarget(int frames);
// Inverse used at inference: max(1, round(exp(p) - 1)).
int DurationFromLog(double log_duration);

// Repeats row i of `hidden` durations[i] times, in order.
Matrix LengthRegulate(const Matrix& hidden, const DurationSequence& durations);

// Source row for every output frame of a batch after length regulation;
// -1 for padding frames. Fills `frame_layout` as a padded layout.
std::vector<int> LengthRegulatorIndex(
    const nn::SequenceLayout& phoneme_layout,
    const std::vector<std::vector<int>>& durations,
    nn::SequenceLayout* frame_layout, bool pad = true);

struct T2BNBatch {
  std::vector<std::vector<int>> phonemes;
  std::vector<std::vector<int>> durations;
  std::vector<const Matrix*> targets;  // normalized BN, frames x bn_dim
  bool pad = true;
};

struct T2BNLosses {
  nn::Var total;
  nn::Var bn;
  nn::Var duration;
};

struct T2BNOutput {
  BNMatrix bn;                       // denormalized
  DurationSequence durations;        // durations actually used
  std::vector<double> log_durations; // empty when durations were supplied
};

// Text-to-BN acoustic model: phoneme embedding, FFT encoder, duration
// predictor, length regulator, FFT decoder and a projection to bn_dim.
class T2BNModel {
 public:
  T2BNModel(const T2BNConfig& config, Vocabulary phonemes);
  T2BNModel(const T2BNModel&) = delete;
  T2BNModel& operator=(const T2BNModel&) = delete;

  const T2BNConfig& config() const { return config_; }
  const Vocabulary& phonemes() const { return phonemes_; }
  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }
  const NormStats& bn_stats() const { return bn_stats_; }
  void set_bn_stats(NormStats stats) { bn_stats_ = std::move(stats); }

  nn::Var Encode(nn::Tape& t, const std::vector<std::vector<int>>& phonemes,
                 const nn::SequenceLayout& layout) const;
  // rows x 1, log(d + 1) domain.
  nn::Var PredictLogDurations(nn::Tape& t, nn::Var encoded,
                              const nn::SequenceLayout& layout) const;
  nn::Var Decode(nn::Tape& t, nn::Var frames,
                 const nn::SequenceLayout& frame_layout) const;

  T2BNLosses Loss(nn::Tape& t, const T2BNBatch& batch) const;

  // Inference. With durations the predictor is bypassed entirely.
  T2BNOutput Forward(const std::vector<std::string>& phonemes,
                     const std::optional<DurationSequence>& durations) const;
  T2BNOutput ForwardIds(const std::vector<int>& ids,
                        const std::optional<DurationSequence>& durations) const;

  // Log-domain predictions for an utterance, one per phoneme.
  std::vector<double> PredictDurations(const std::vector<int>& ids) const;

  // Instrumentation: number of duration-predictor evaluations so far.
  size_t duration_predictor_calls() const { return predictor_calls_.load(); }

  nn::CheckpointData ToCheckpoint() const;
  static std::unique_ptr<T2BNModel> FromCheckpoint(const nn::CheckpointData& data);

 private:
  T2BNConfig config_;
  Vocabulary phonemes_;
  nn::ParameterStore params_;
  NormStats bn_stats_;

  nn::EmbeddingLayer embedding_;
  std::vector<nn::FFTBlock> encoder_;
  nn::Conv1dLayer dp_conv1_, dp_conv2_;
  nn::LayerNormLayer dp_norm1_, dp_norm2_;
  nn::LinearLayer dp_out_;
  std::vector<nn::FFTBlock> decoder_;
  nn::LinearLayer projection_;

  mutable std::atomic<size_t> predictor_calls_{0};
};

}  // namespace accentbn::models

#endif  // ACCENTBN_MODELS_T2BN_H_
