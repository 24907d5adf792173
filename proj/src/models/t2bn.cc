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

#include "models/t2bn.h"

#include <cmath>

#include "core/error.h"

namespace accentbn::models {

using nlohmann::json;

void T2BNConfig::Validate() const {
  ACCENTBN_CHECK(encoder_layers >= 1 && decoder_layers >= 1 && hidden >= 1 &&
                     filter >= 1 && heads >= 1 && bn_dim >= 1 &&
                     duration_kernel >= 1 && ffn_kernel1 >= 1 &&
                     ffn_kernel2 >= 1 && duration_channels >= 0,
                 ErrorCode::kConfigMismatch, "T2BN dimensions must be >= 1");
  ACCENTBN_CHECK(hidden % heads == 0, ErrorCode::kConfigMismatch,
                 "T2BN hidden size must be divisible by the head count");
  ACCENTBN_CHECK(dropout >= 0.0 && dropout < 1.0, ErrorCode::kConfigMismatch,
                 "dropout must be in [0, 1)");
}

json T2BNConfig::ToJson() const {
  return json{{"encoder_layers", encoder_layers},
              {"decoder_layers", decoder_layers},
              {"hidden", hidden},
              {"filter", filter},
              {"heads", heads},
              {"ffn_kernel1", ffn_kernel1},
              {"ffn_kernel2", ffn_kernel2},
              {"dropout", dropout},
              {"duration_channels", duration_channels},
              {"duration_kernel", duration_kernel},
              {"bn_dim", bn_dim},
              {"seed", seed}};
}

T2BNConfig T2BNConfig::FromJson(const json& j) {
  T2BNConfig c;
  c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
  c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
  c.hidden = j.value("hidden", c.hidden);
  c.filter = j.value("filter", c.filter);
  c.heads = j.value("heads", c.heads);
  c.ffn_kernel1 = j.value("ffn_kernel1", c.ffn_kernel1);
  c.ffn_kernel2 = j.value("ffn_kernel2", c.ffn_kernel2);
  c.dropout = j.value("dropout", c.dropout);
  c.duration_channels = j.value("duration_channels", c.duration_channels);
  c.duration_kernel = j.value("duration_kernel", c.duration_kernel);
  c.bn_dim = j.value("bn_dim", c.bn_dim);
  c.seed = j.value("seed", c.seed);
  return c;
}

double DurationTarget(int frames) { return std::log(frames + 1.0); }

int DurationFromLog(double log_duration) {
  const long d = std::lround(std::exp(log_duration) - 1.0);
  return static_cast<int>(std::max(1L, d));
}

Matrix LengthRegulate(const Matrix& hidden, const DurationSequence& durations) {
  ACCENTBN_CHECK(
      static_cast<Eigen::Index>(durations.frames.size()) == hidden.rows(),
      ErrorCode::kInvalidInput,
      "length regulator: " + std::to_string(durations.frames.size()) +
          " durations for " + std::to_string(hidden.rows()) + " rows");
  for (int d : durations.frames) {
    ACCENTBN_CHECK(d >= 0, ErrorCode::kInvalidInput,
                   "length regulator: negative duration");
  }
  const int total = durations.Total();
  ACCENTBN_CHECK(total >= 1, ErrorCode::kInvalidInput,
                 "length regulator: durations sum to zero");
  Matrix out(total, hidden.cols());
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < hidden.rows(); ++i) {
    for (int k = 0; k < durations.frames[i]; ++k) out.row(row++) = hidden.row(i);
  }
  return out;
}

std::vector<int> LengthRegulatorIndex(
    const nn::SequenceLayout& phoneme_layout,
    const std::vector<std::vector<int>>& durations,
    nn::SequenceLayout* frame_layout, bool pad) {
  ACCENTBN_CHECK(durations.size() == phoneme_layout.size(),
                 ErrorCode::kInvalidInput,
                 "length regulator: batch size mismatch");
  std::vector<Eigen::Index> totals;
  for (size_t b = 0; b < durations.size(); ++b) {
    ACCENTBN_CHECK(static_cast<Eigen::Index>(durations[b].size()) ==
                       phoneme_layout.segments[b].length,
                   ErrorCode::kInvalidInput,
                   "length regulator: durations/phonemes length mismatch");
    Eigen::Index total = 0;
    for (int d : durations[b]) {
      ACCENTBN_CHECK(d >= 0, ErrorCode::kInvalidInput,
                     "length regulator: negative duration");
      total += d;
    }
    ACCENTBN_CHECK(total >= 1, ErrorCode::kInvalidInput,
                   "length regulator: durations sum to zero");
    totals.push_back(total);
  }
  *frame_layout = pad ? nn::SequenceLayout::Padded(totals)
                      : nn::SequenceLayout::Packed(totals);
  std::vector<int> index(frame_layout->rows, -1);
  for (size_t b = 0; b < durations.size(); ++b) {
    Eigen::Index row = frame_layout->segments[b].offset;
    const Eigen::Index src0 = phoneme_layout.segments[b].offset;
    for (size_t i = 0; i < durations[b].size(); ++i) {
      for (int k = 0; k < durations[b][i]; ++k) {
        index[row++] = static_cast<int>(src0 + static_cast<Eigen::Index>(i));
      }
    }
  }
  return index;
}

T2BNModel::T2BNModel(const T2BNConfig& config, Vocabulary phonemes)
    : config_(config), phonemes_(std::move(phonemes)) {
  config_.Validate();
  ACCENTBN_CHECK(!phonemes_.empty(), ErrorCode::kConfigMismatch,
                 "T2BN needs a non-empty phoneme vocabulary");
  nn::Initializer init(config_.seed);
  nn::FFTBlockConfig block;
  block.hidden = config_.hidden;
  block.filter = config_.filter;
  block.heads = config_.heads;
  block.kernel1 = config_.ffn_kernel1;
  block.kernel2 = config_.ffn_kernel2;
  block.dropout = config_.dropout;
  embedding_ = nn::EmbeddingLayer(params_, init, "embed", phonemes_.size(),
                                  config_.hidden);
  for (int i = 0; i < config_.encoder_layers; ++i) {
    encoder_.emplace_back(params_, init, "enc." + std::to_string(i), block);
  }
  const int dp = config_.duration_channels > 0 ? config_.duration_channels
                                               : config_.hidden;
  dp_conv1_ = nn::Conv1dLayer(params_, init, "dur.conv1", config_.hidden, dp,
                              config_.duration_kernel);
  dp_norm1_ = nn::LayerNormLayer(params_, "dur.norm1", dp);
  dp_conv2_ = nn::Conv1dLayer(params_, init, "dur.conv2", dp, dp,
                              config_.duration_kernel);
  dp_norm2_ = nn::LayerNormLayer(params_, "dur.norm2", dp);
  dp_out_ = nn::LinearLayer(params_, init, "dur.out", dp, 1);
  for (int i = 0; i < config_.decoder_layers; ++i) {
    decoder_.emplace_back(params_, init, "dec." + std::to_string(i), block);
  }
  projection_ =
      nn::LinearLayer(params_, init, "proj", config_.hidden, config_.bn_dim);
}

nn::Var T2BNModel::Encode(nn::Tape& t,
                          const std::vector<std::vector<int>>& phonemes,
                          const nn::SequenceLayout& layout) const {
  std::vector<int> ids(layout.rows, -1);
  for (size_t b = 0; b < phonemes.size(); ++b) {
    for (size_t i = 0; i < phonemes[b].size(); ++i) {
      const int id = phonemes[b][i];
      ACCENTBN_CHECK(id >= 0 && id < phonemes_.size(), ErrorCode::kVocabulary,
                     "phoneme id " + std::to_string(id) + " out of range");
      ids[layout.segments[b].offset + static_cast<Eigen::Index>(i)] = id;
    }
  }
  nn::Var x = embedding_.Forward(t, ids);
  x = nn::Add(x, t.Constant(nn::SinusoidalPositions(layout, config_.hidden)));
  for (const auto& block : encoder_) x = block.Forward(t, x, layout);
  return x;
}

nn::Var T2BNModel::PredictLogDurations(nn::Tape& t, nn::Var encoded,
                                       const nn::SequenceLayout& layout) const {
  ++predictor_calls_;
  nn::Var h = nn::Relu(dp_conv1_.Forward(t, encoded, layout));
  h = nn::Dropout(dp_norm1_.Forward(t, h), config_.dropout);
  h = nn::Relu(dp_conv2_.Forward(t, h, layout));
  h = nn::Dropout(dp_norm2_.Forward(t, h), config_.dropout);
  return dp_out_.Forward(t, h);
}

nn::Var T2BNModel::Decode(nn::Tape& t, nn::Var frames,
                          const nn::SequenceLayout& frame_layout) const {
  nn::Var x = nn::Add(
      frames, t.Constant(nn::SinusoidalPositions(frame_layout, config_.hidden)));
  for (const auto& block : decoder_) x = block.Forward(t, x, frame_layout);
  return projection_.Forward(t, x);
}

T2BNLosses T2BNModel::Loss(nn::Tape& t, const T2BNBatch& batch) const {
  const size_t n = batch.phonemes.size();
  ACCENTBN_CHECK(n > 0 && batch.durations.size() == n &&
                     batch.targets.size() == n,
                 ErrorCode::kInvalidInput, "T2BN batch is inconsistent");
  std::vector<Eigen::Index> lengths;
  for (const auto& p : batch.phonemes) {
    lengths.push_back(static_cast<Eigen::Index>(p.size()));
  }
  const nn::SequenceLayout ph_layout =
      batch.pad ? nn::SequenceLayout::Padded(lengths)
                : nn::SequenceLayout::Packed(lengths);
  nn::Var enc = Encode(t, batch.phonemes, ph_layout);

  nn::Var log_dur = PredictLogDurations(t, enc, ph_layout);
  Matrix dur_target = Matrix::Zero(ph_layout.rows, 1);
  for (size_t b = 0; b < n; ++b) {
    for (size_t i = 0; i < batch.durations[b].size(); ++i) {
      dur_target(ph_layout.segments[b].offset + static_cast<Eigen::Index>(i),
                 0) = DurationTarget(batch.durations[b][i]);
    }
  }
  nn::Var dur_loss = nn::MseLoss(log_dur, dur_target, ph_layout.RowMask());

  nn::SequenceLayout fr_layout;
  const auto index =
      LengthRegulatorIndex(ph_layout, batch.durations, &fr_layout, batch.pad);
  nn::Var out = Decode(t, nn::GatherRows(enc, index), fr_layout);
  Matrix target = Matrix::Zero(fr_layout.rows, config_.bn_dim);
  for (size_t b = 0; b < n; ++b) {
    const Matrix& tb = *batch.targets[b];
    ACCENTBN_CHECK(tb.rows() == fr_layout.segments[b].length &&
                       tb.cols() == config_.bn_dim,
                   ErrorCode::kInvalidInput,
                   "T2BN target frames must equal sum(durations)");
    target.middleRows(fr_layout.segments[b].offset, tb.rows()) = tb;
  }
  nn::Var bn_loss = nn::MseLoss(out, target, fr_layout.RowMask());
  return {nn::Add(bn_loss, dur_loss), bn_loss, dur_loss};
}

T2BNOutput T2BNModel::Forward(
    const std::vector<std::string>& phonemes,
    const std::optional<DurationSequence>& durations) const {
  std::vector<int> ids;
  for (const auto& p : phonemes) ids.push_back(phonemes_.Index(p, "phoneme"));
  return ForwardIds(ids, durations);
}

T2BNOutput T2BNModel::ForwardIds(
    const std::vector<int>& ids,
    const std::optional<DurationSequence>& durations) const {
  ACCENTBN_CHECK(!ids.empty(), ErrorCode::kInvalidInput,
                 "empty phoneme sequence");
  nn::Tape t(false);
  const auto layout =
      nn::SequenceLayout::Packed({static_cast<Eigen::Index>(ids.size())});
  nn::Var enc = Encode(t, {ids}, layout);
  T2BNOutput out;
  if (durations) {
    ACCENTBN_CHECK(durations->frames.size() == ids.size(),
                   ErrorCode::kInvalidInput,
                   "durations length does not match phonemes");
    out.durations = *durations;
  } else {
    nn::Var log_dur = PredictLogDurations(t, enc, layout);
    for (Eigen::Index i = 0; i < log_dur.rows(); ++i) {
      out.log_durations.push_back(log_dur.value()(i, 0));
      out.durations.frames.push_back(DurationFromLog(log_dur.value()(i, 0)));
    }
  }
  nn::SequenceLayout fr_layout;
  const auto index =
      LengthRegulatorIndex(layout, {out.durations.frames}, &fr_layout, false);
  nn::Var bn = Decode(t, nn::GatherRows(enc, index), fr_layout);
  Matrix values = bn_stats_.empty() ? bn.value() : bn_stats_.Denormalize(bn.value());
  out.bn = BNMatrix{std::move(values), Provenance::kPredicted,
                    AccentTag::kUnaccented};
  return out;
}

std::vector<double> T2BNModel::PredictDurations(
    const std::vector<int>& ids) const {
  ACCENTBN_CHECK(!ids.empty(), ErrorCode::kInvalidInput,
                 "duration predictor: empty input");
  nn::Tape t(false);
  const auto layout =
      nn::SequenceLayout::Packed({static_cast<Eigen::Index>(ids.size())});
  nn::Var log_dur = PredictLogDurations(t, Encode(t, {ids}, layout), layout);
  std::vector<double> out(log_dur.rows());
  for (Eigen::Index i = 0; i < log_dur.rows(); ++i) out[i] = log_dur.value()(i, 0);
  return out;
}

nn::CheckpointData T2BNModel::ToCheckpoint() const {
  nn::CheckpointData data;
  data.kind = "t2bn";
  data.seed = config_.seed;
  data.config = json{{"model", config_.ToJson()},
                     {"phoneme_table", phonemes_.tokens()}};
  nn::PutParameters(data, params_);
  if (!bn_stats_.empty()) nn::PutStats(data, "stats/bn", bn_stats_);
  return data;
}

std::unique_ptr<T2BNModel> T2BNModel::FromCheckpoint(
    const nn::CheckpointData& data) {
  ACCENTBN_CHECK(data.kind == "t2bn", ErrorCode::kConfigMismatch,
                 "checkpoint holds a '" + data.kind + "' model, not t2bn");
  auto model = std::make_unique<T2BNModel>(
      T2BNConfig::FromJson(data.config.at("model")),
      Vocabulary(data.config.at("phoneme_table").get<std::vector<std::string>>()));
  nn::LoadParameters(data, model->params_);
  if (data.Find("stats/bn/mean")) model->bn_stats_ = nn::GetStats(data, "stats/bn");
  return model;
}

}  // namespace accentbn::models
