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

#include "models/bn2bn.h"

#include "core/error.h"

namespace accentbn::models {

using nlohmann::json;

void BN2BNConfig::Validate() const {
  ACCENTBN_CHECK(fft_layers >= 0 && hidden >= 1 && filter >= 1 && heads >= 1 &&
                     conv_layers >= 0 && conv_kernel >= 1 &&
                     speaker_dim >= 1 && bn_dim >= 1 && ffn_kernel1 >= 1 &&
                     ffn_kernel2 >= 1,
                 ErrorCode::kConfigMismatch, "BN2BN dimensions must be >= 1");
  ACCENTBN_CHECK(hidden % heads == 0, ErrorCode::kConfigMismatch,
                 "BN2BN hidden size must be divisible by the head count");
  ACCENTBN_CHECK(dropout >= 0.0 && dropout < 1.0, ErrorCode::kConfigMismatch,
                 "dropout must be in [0, 1)");
}

json BN2BNConfig::ToJson() const {
  return json{{"fft_layers", fft_layers},   {"hidden", hidden},
              {"filter", filter},           {"heads", heads},
              {"ffn_kernel1", ffn_kernel1}, {"ffn_kernel2", ffn_kernel2},
              {"conv_layers", conv_layers}, {"conv_kernel", conv_kernel},
              {"speaker_dim", speaker_dim}, {"bn_dim", bn_dim},
              {"dropout", dropout},         {"context", context},
              {"accent", accent},           {"seed", seed}};
}

BN2BNConfig BN2BNConfig::FromJson(const json& j) {
  BN2BNConfig c;
  c.fft_layers = j.value("fft_layers", c.fft_layers);
  c.hidden = j.value("hidden", c.hidden);
  c.filter = j.value("filter", c.filter);
  c.heads = j.value("heads", c.heads);
  c.ffn_kernel1 = j.value("ffn_kernel1", c.ffn_kernel1);
  c.ffn_kernel2 = j.value("ffn_kernel2", c.ffn_kernel2);
  c.conv_layers = j.value("conv_layers", c.conv_layers);
  c.conv_kernel = j.value("conv_kernel", c.conv_kernel);
  c.speaker_dim = j.value("speaker_dim", c.speaker_dim);
  c.bn_dim = j.value("bn_dim", c.bn_dim);
  c.dropout = j.value("dropout", c.dropout);
  c.context = j.value("context", c.context);
  c.accent = j.value("accent", c.accent);
  c.seed = j.value("seed", c.seed);
  return c;
}

nn::SequenceLayout LayoutFor(const std::vector<const Matrix*>& parts,
                             bool pad) {
  std::vector<Eigen::Index> lengths;
  for (const Matrix* m : parts) lengths.push_back(m->rows());
  return pad ? nn::SequenceLayout::Padded(lengths)
             : nn::SequenceLayout::Packed(lengths);
}

Matrix StackRows(const std::vector<const Matrix*>& parts,
                 const nn::SequenceLayout& layout, Eigen::Index cols) {
  Matrix out = Matrix::Zero(layout.rows, cols);
  for (size_t b = 0; b < parts.size(); ++b) {
    ACCENTBN_CHECK(parts[b]->cols() == cols, ErrorCode::kConfigMismatch,
                   "expected width " + std::to_string(cols) + ", got " +
                       std::to_string(parts[b]->cols()));
    ACCENTBN_CHECK(parts[b]->rows() == layout.segments[b].length,
                   ErrorCode::kInvalidInput, "sequence length mismatch");
    out.middleRows(layout.segments[b].offset, parts[b]->rows()) = *parts[b];
  }
  return out;
}

BN2BNModel::BN2BNModel(const BN2BNConfig& config, Vocabulary speakers)
    : config_(config), speakers_(std::move(speakers)) {
  config_.Validate();
  ACCENTBN_CHECK(!speakers_.empty(), ErrorCode::kConfigMismatch,
                 "BN2BN needs a non-empty speaker table");
  nn::Initializer init(config_.seed);
  nn::FFTBlockConfig block;
  block.hidden = config_.hidden;
  block.filter = config_.filter;
  block.heads = config_.heads;
  block.kernel1 = config_.context ? config_.ffn_kernel1 : 1;
  block.kernel2 = config_.context ? config_.ffn_kernel2 : 1;
  block.dropout = config_.dropout;
  block.attention = config_.context;
  input_ = nn::LinearLayer(params_, init, "in", config_.bn_dim, config_.hidden);
  speaker_embedding_ = nn::EmbeddingLayer(params_, init, "spk", speakers_.size(),
                                          config_.speaker_dim);
  speaker_projection_ = nn::LinearLayer(params_, init, "spk.proj",
                                        config_.speaker_dim, config_.hidden);
  for (int i = 0; i < config_.fft_layers; ++i) {
    blocks_.emplace_back(params_, init, "fft." + std::to_string(i), block);
  }
  const int k = config_.context ? config_.conv_kernel : 1;
  for (int i = 0; i < config_.conv_layers; ++i) {
    convs_.emplace_back(params_, init, "conv." + std::to_string(i),
                        config_.hidden, config_.hidden, k);
  }
  output_ = nn::LinearLayer(params_, init, "out", config_.hidden, config_.bn_dim);
  // Start at the identity map.
  output_.weight->value.setZero();
}

void BN2BNModel::CheckSpeaker(int speaker) const {
  ACCENTBN_CHECK(speaker >= 0 && speaker < speakers_.size(),
                 ErrorCode::kVocabulary,
                 "speaker index " + std::to_string(speaker) +
                     " not in BN2BN speaker table (size " +
                     std::to_string(speakers_.size()) + ")");
}

nn::Var BN2BNModel::Apply(nn::Tape& t, nn::Var x,
                          const nn::SequenceLayout& layout,
                          const std::vector<int>& speakers) const {
  ACCENTBN_CHECK(x.cols() == config_.bn_dim, ErrorCode::kConfigMismatch,
                 "BN2BN expects width " + std::to_string(config_.bn_dim) +
                     ", got " + std::to_string(x.cols()));
  ACCENTBN_CHECK(speakers.size() == layout.size(), ErrorCode::kInvalidInput,
                 "one speaker per sequence required");
  std::vector<int> frame_speaker(layout.rows, -1);
  for (size_t b = 0; b < speakers.size(); ++b) {
    CheckSpeaker(speakers[b]);
    const auto& s = layout.segments[b];
    std::fill_n(frame_speaker.begin() + s.offset, s.length, speakers[b]);
  }
  nn::Var h = input_.Forward(t, x);
  h = nn::Add(h, speaker_projection_.Forward(
                     t, speaker_embedding_.Forward(t, frame_speaker)));
  if (config_.context) {
    h = nn::Add(h, t.Constant(nn::SinusoidalPositions(layout, config_.hidden)));
  }
  for (const auto& block : blocks_) h = block.Forward(t, h, layout);
  for (const auto& conv : convs_) {
    h = nn::Add(h, nn::Relu(conv.Forward(t, h, layout)));
  }
  return nn::Add(x, output_.Forward(t, h));
}

nn::Var BN2BNModel::Loss(nn::Tape& t, const BN2BNBatch& batch) const {
  ACCENTBN_CHECK(!batch.inputs.empty() &&
                     batch.inputs.size() == batch.targets.size() &&
                     batch.inputs.size() == batch.speakers.size(),
                 ErrorCode::kInvalidInput, "BN2BN batch is inconsistent");
  const auto layout = LayoutFor(batch.inputs, batch.pad);
  nn::Var x = t.Constant(StackRows(batch.inputs, layout, config_.bn_dim));
  const Matrix target = StackRows(batch.targets, layout, config_.bn_dim);
  return nn::MseLoss(Apply(t, x, layout, batch.speakers), target,
                     layout.RowMask());
}

BNMatrix BN2BNModel::Forward(const BNMatrix& bn_ua, int speaker) const {
  CheckSpeaker(speaker);
  ACCENTBN_CHECK(bn_ua.values.cols() == config_.bn_dim,
                 ErrorCode::kConfigMismatch,
                 "BN2BN expects width " + std::to_string(config_.bn_dim) +
                     ", got " + std::to_string(bn_ua.values.cols()));
  ACCENTBN_CHECK(bn_ua.values.rows() >= 1, ErrorCode::kInvalidInput,
                 "BN2BN input has no frames");
  nn::Tape t(false);
  const auto layout = nn::SequenceLayout::Packed({bn_ua.values.rows()});
  const Matrix x =
      bn_stats_.empty() ? bn_ua.values : bn_stats_.Normalize(bn_ua.values);
  nn::Var y = Apply(t, t.Constant(x), layout, {speaker});
  Matrix values = bn_stats_.empty() ? y.value() : bn_stats_.Denormalize(y.value());
  return BNMatrix{std::move(values), Provenance::kPredicted,
                  AccentTag::kAccented};
}

nn::CheckpointData BN2BNModel::ToCheckpoint() const {
  nn::CheckpointData data;
  data.kind = "bn2bn";
  data.seed = config_.seed;
  data.config = json{{"model", config_.ToJson()},
                     {"speaker_table", speakers_.tokens()}};
  nn::PutParameters(data, params_);
  if (!bn_stats_.empty()) nn::PutStats(data, "stats/bn", bn_stats_);
  return data;
}

std::unique_ptr<BN2BNModel> BN2BNModel::FromCheckpoint(
    const nn::CheckpointData& data) {
  ACCENTBN_CHECK(data.kind == "bn2bn", ErrorCode::kConfigMismatch,
                 "checkpoint holds a '" + data.kind + "' model, not bn2bn");
  auto model = std::make_unique<BN2BNModel>(
      BN2BNConfig::FromJson(data.config.at("model")),
      Vocabulary(
          data.config.at("speaker_table").get<std::vector<std::string>>()));
  nn::LoadParameters(data, model->params_);
  if (data.Find("stats/bn/mean")) model->bn_stats_ = nn::GetStats(data, "stats/bn");
  return model;
}

}  // namespace accentbn::models
