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

#include "models/bn2mel.h"

#include "core/error.h"
#include "models/bn2bn.h"

namespace accentbn::models {

using nlohmann::json;

void BN2MelConfig::Validate() const {
  ACCENTBN_CHECK(mel_dim == kNumMels, ErrorCode::kConfigMismatch,
                 "BN2Mel mel_dim must be " + std::to_string(kNumMels));
  ACCENTBN_CHECK(bn_dim >= 1 && cbhg_dim >= 1 && bank_size >= 1 &&
                     projection_dim >= 1 && highway_layers >= 0 &&
                     gru_dim >= 1 && decoder_dim >= 1 && postnet_layers >= 1 &&
                     postnet_channels >= 1 && postnet_kernel >= 1 &&
                     speaker_dim >= 1 && !prenet_dims.empty(),
                 ErrorCode::kConfigMismatch, "BN2Mel dimensions must be >= 1");
  for (int d : prenet_dims) {
    ACCENTBN_CHECK(d >= 1, ErrorCode::kConfigMismatch,
                   "BN2Mel prenet dims must be >= 1");
  }
  ACCENTBN_CHECK(prenet_dropout >= 0.0 && prenet_dropout < 1.0,
                 ErrorCode::kConfigMismatch, "prenet dropout must be in [0, 1)");
}

json BN2MelConfig::ToJson() const {
  return json{{"bn_dim", bn_dim},
              {"mel_dim", mel_dim},
              {"cbhg_dim", cbhg_dim},
              {"bank_size", bank_size},
              {"projection_dim", projection_dim},
              {"highway_layers", highway_layers},
              {"gru_dim", gru_dim},
              {"decoder_dim", decoder_dim},
              {"prenet_dims", prenet_dims},
              {"prenet_dropout", prenet_dropout},
              {"postnet_layers", postnet_layers},
              {"postnet_channels", postnet_channels},
              {"postnet_kernel", postnet_kernel},
              {"speaker_dim", speaker_dim},
              {"seed", seed}};
}

BN2MelConfig BN2MelConfig::FromJson(const json& j) {
  BN2MelConfig c;
  c.bn_dim = j.value("bn_dim", c.bn_dim);
  c.mel_dim = j.value("mel_dim", c.mel_dim);
  c.cbhg_dim = j.value("cbhg_dim", c.cbhg_dim);
  c.bank_size = j.value("bank_size", c.bank_size);
  c.projection_dim = j.value("projection_dim", c.projection_dim);
  c.highway_layers = j.value("highway_layers", c.highway_layers);
  c.gru_dim = j.value("gru_dim", c.gru_dim);
  c.decoder_dim = j.value("decoder_dim", c.decoder_dim);
  c.prenet_dims = j.value("prenet_dims", c.prenet_dims);
  c.prenet_dropout = j.value("prenet_dropout", c.prenet_dropout);
  c.postnet_layers = j.value("postnet_layers", c.postnet_layers);
  c.postnet_channels = j.value("postnet_channels", c.postnet_channels);
  c.postnet_kernel = j.value("postnet_kernel", c.postnet_kernel);
  c.speaker_dim = j.value("speaker_dim", c.speaker_dim);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::vector<int> PreviousFrameIndex(const nn::SequenceLayout& layout) {
  std::vector<int> index(layout.rows, -1);
  for (const auto& s : layout.segments) {
    for (Eigen::Index i = 1; i < s.length; ++i) {
      index[s.offset + i] = static_cast<int>(s.offset + i - 1);
    }
  }
  return index;
}

BN2MelModel::BN2MelModel(const BN2MelConfig& config, Vocabulary speakers)
    : config_(config), speakers_(std::move(speakers)) {
  config_.Validate();
  ACCENTBN_CHECK(!speakers_.empty(), ErrorCode::kConfigMismatch,
                 "BN2Mel needs a non-empty speaker table");
  nn::Initializer init(config_.seed);
  const int c = config_.cbhg_dim;
  input_ = nn::LinearLayer(params_, init, "in", config_.bn_dim, c);
  for (int k = 1; k <= config_.bank_size; ++k) {
    bank_.emplace_back(params_, init, "bank." + std::to_string(k), c, c, k);
  }
  projection1_ = nn::Conv1dLayer(params_, init, "proj1", c * config_.bank_size,
                                 config_.projection_dim, 3);
  projection2_ =
      nn::Conv1dLayer(params_, init, "proj2", config_.projection_dim, c, 3);
  for (int i = 0; i < config_.highway_layers; ++i) {
    highways_.emplace_back(params_, init, "highway." + std::to_string(i), c);
  }
  gru_forward_ = nn::GruLayer(params_, init, "gru.fwd", c, config_.gru_dim);
  gru_backward_ = nn::GruLayer(params_, init, "gru.bwd", c, config_.gru_dim);
  const int enc = 2 * config_.gru_dim;
  speaker_embedding_ = nn::EmbeddingLayer(params_, init, "spk", speakers_.size(),
                                          config_.speaker_dim);
  speaker_projection_ =
      nn::LinearLayer(params_, init, "spk.proj", config_.speaker_dim, enc);
  int in = config_.mel_dim;
  for (size_t i = 0; i < config_.prenet_dims.size(); ++i) {
    prenet_.emplace_back(params_, init, "prenet." + std::to_string(i), in,
                         config_.prenet_dims[i]);
    in = config_.prenet_dims[i];
  }
  decoder_ = nn::GruLayer(params_, init, "dec", in + enc, config_.decoder_dim);
  mel_out_ = nn::LinearLayer(params_, init, "mel", config_.decoder_dim + enc,
                             config_.mel_dim);
  for (int i = 0; i < config_.postnet_layers; ++i) {
    const int pin = i == 0 ? config_.mel_dim : config_.postnet_channels;
    const int pout = i + 1 == config_.postnet_layers ? config_.mel_dim
                                                     : config_.postnet_channels;
    postnet_.emplace_back(params_, init, "postnet." + std::to_string(i), pin,
                          pout, config_.postnet_kernel);
  }
  postnet_.back().weight->value.setZero();
}

void BN2MelModel::CheckSpeaker(int speaker) const {
  ACCENTBN_CHECK(speaker >= 0 && speaker < speakers_.size(),
                 ErrorCode::kVocabulary,
                 "speaker index " + std::to_string(speaker) +
                     " not in BN2Mel speaker table (size " +
                     std::to_string(speakers_.size()) + ")");
}

nn::Var BN2MelModel::Encode(nn::Tape& t, nn::Var x,
                            const nn::SequenceLayout& layout,
                            const std::vector<int>& speakers) const {
  ACCENTBN_CHECK(x.cols() == config_.bn_dim, ErrorCode::kConfigMismatch,
                 "BN2Mel expects width " + std::to_string(config_.bn_dim) +
                     ", got " + std::to_string(x.cols()));
  ACCENTBN_CHECK(speakers.size() == layout.size(), ErrorCode::kInvalidInput,
                 "one speaker per sequence required");
  nn::Var h = input_.Forward(t, x);
  std::vector<nn::Var> bank;
  for (const auto& conv : bank_) {
    bank.push_back(nn::Relu(conv.Forward(t, h, layout)));
  }
  nn::Var y = nn::MaxPool1d(nn::ConcatCols(bank), layout, 2);
  y = nn::Relu(projection1_.Forward(t, y, layout));
  y = projection2_.Forward(t, y, layout);
  y = nn::Add(y, h);
  for (const auto& hw : highways_) y = hw.Forward(t, y);
  nn::Var enc = nn::ConcatCols({gru_forward_.Forward(t, y, layout, false),
                                gru_backward_.Forward(t, y, layout, true)});
  std::vector<int> frame_speaker(layout.rows, -1);
  for (size_t b = 0; b < speakers.size(); ++b) {
    CheckSpeaker(speakers[b]);
    const auto& s = layout.segments[b];
    std::fill_n(frame_speaker.begin() + s.offset, s.length, speakers[b]);
  }
  return nn::Add(enc, speaker_projection_.Forward(
                          t, speaker_embedding_.Forward(t, frame_speaker)));
}

nn::Var BN2MelModel::Prenet(nn::Tape& t, nn::Var prev) const {
  nn::Var h = prev;
  for (const auto& layer : prenet_) {
    h = nn::Dropout(nn::Relu(layer.Forward(t, h)), config_.prenet_dropout,
                    /*always=*/true);
  }
  return h;
}

nn::Var BN2MelModel::Project(nn::Tape& t, nn::Var h, nn::Var encoded) const {
  return mel_out_.Forward(t, nn::ConcatCols({h, encoded}));
}

nn::Var BN2MelModel::Postnet(nn::Tape& t, nn::Var pre,
                             const nn::SequenceLayout& layout) const {
  nn::Var h = pre;
  for (size_t i = 0; i < postnet_.size(); ++i) {
    h = postnet_[i].Forward(t, h, layout);
    if (i + 1 < postnet_.size()) h = nn::Tanh(h);
  }
  return h;
}

std::pair<nn::Var, nn::Var> BN2MelModel::DecodeTeacherForced(
    nn::Tape& t, nn::Var encoded, nn::Var teacher,
    const nn::SequenceLayout& layout) const {
  nn::Var prev = nn::GatherRows(teacher, PreviousFrameIndex(layout));
  nn::Var dec_in = nn::ConcatCols({Prenet(t, prev), encoded});
  nn::Var h = decoder_.Forward(t, dec_in, layout, false);
  nn::Var pre = Project(t, h, encoded);
  nn::Var post = nn::Add(pre, Postnet(t, pre, layout));
  return {pre, post};
}

BN2MelLosses BN2MelModel::Loss(nn::Tape& t, const BN2MelBatch& batch) const {
  ACCENTBN_CHECK(!batch.inputs.empty() &&
                     batch.inputs.size() == batch.targets.size() &&
                     batch.inputs.size() == batch.speakers.size(),
                 ErrorCode::kInvalidInput, "BN2Mel batch is inconsistent");
  const auto layout = LayoutFor(batch.inputs, batch.pad);
  nn::Var x = t.Constant(StackRows(batch.inputs, layout, config_.bn_dim));
  const Matrix target = StackRows(batch.targets, layout, config_.mel_dim);
  nn::Var enc = Encode(t, x, layout, batch.speakers);
  auto [pre, post] = DecodeTeacherForced(t, enc, t.Constant(target), layout);
  const auto mask = layout.RowMask();
  nn::Var pre_loss = nn::MseLoss(pre, target, mask);
  nn::Var post_loss = nn::MseLoss(post, target, mask);
  return {nn::Add(pre_loss, post_loss), pre_loss, post_loss};
}

BN2MelOutput BN2MelModel::Forward(const BNMatrix& bn, int speaker,
                                  const std::optional<MelMatrix>& teacher_mel,
                                  uint64_t seed) const {
  CheckSpeaker(speaker);
  const Eigen::Index frames = bn.values.rows();
  ACCENTBN_CHECK(frames >= 1, ErrorCode::kInvalidInput, "BN2Mel input has no frames");
  ACCENTBN_CHECK(bn.values.cols() == config_.bn_dim, ErrorCode::kConfigMismatch,
                 "BN2Mel expects width " + std::to_string(config_.bn_dim) +
                     ", got " + std::to_string(bn.values.cols()));
  if (teacher_mel) {
    ACCENTBN_CHECK(teacher_mel->values.rows() == frames, ErrorCode::kInvalidInput,
                   "teacher mel has " +
                       std::to_string(teacher_mel->values.rows()) +
                       " frames, BN has " + std::to_string(frames));
  }
  nn::Tape t(false, seed);
  const auto layout = nn::SequenceLayout::Packed({frames});
  const Matrix x = bn_stats_.empty() ? bn.values : bn_stats_.Normalize(bn.values);
  nn::Var enc = Encode(t, t.Constant(x), layout, {speaker});

  BN2MelOutput out;
  Matrix pre;
  Matrix post;
  if (teacher_mel) {
    const Matrix teacher = mel_stats_.empty()
                               ? teacher_mel->values
                               : mel_stats_.Normalize(teacher_mel->values);
    nn::Var tv = t.Constant(teacher);
    auto [p, q] = DecodeTeacherForced(t, enc, tv, layout);
    pre = p.value();
    post = q.value();
    out.decoder_input = nn::GatherRows(tv, PreviousFrameIndex(layout)).value();
  } else {
    const auto one = nn::SequenceLayout::Packed({1});
    pre.resize(frames, config_.mel_dim);
    out.decoder_input = Matrix::Zero(frames, config_.mel_dim);
    nn::Var h;
    for (Eigen::Index i = 0; i < frames; ++i) {
      if (i > 0) out.decoder_input.row(i) = pre.row(i - 1);
      nn::Var enc_i = t.Constant(enc.value().row(i));
      nn::Var prev = t.Constant(out.decoder_input.row(i));
      nn::Var dec_in = nn::ConcatCols({Prenet(t, prev), enc_i});
      h = decoder_.Forward(t, dec_in, one, false, h);
      pre.row(i) = Project(t, h, enc_i).value();
    }
    nn::Var pv = t.Constant(pre);
    post = nn::Add(pv, Postnet(t, pv, layout)).value();
  }
  if (!mel_stats_.empty()) {
    pre = mel_stats_.Denormalize(pre);
    post = mel_stats_.Denormalize(post);
  }
  out.pre_mel = MelMatrix{std::move(pre)};
  out.post_mel = MelMatrix{std::move(post)};
  return out;
}

nn::CheckpointData BN2MelModel::ToCheckpoint() const {
  nn::CheckpointData data;
  data.kind = "bn2mel";
  data.seed = config_.seed;
  data.config = json{{"model", config_.ToJson()},
                     {"speaker_table", speakers_.tokens()}};
  nn::PutParameters(data, params_);
  if (!bn_stats_.empty()) nn::PutStats(data, "stats/bn", bn_stats_);
  if (!mel_stats_.empty()) nn::PutStats(data, "stats/mel", mel_stats_);
  return data;
}

std::unique_ptr<BN2MelModel> BN2MelModel::FromCheckpoint(
    const nn::CheckpointData& data) {
  ACCENTBN_CHECK(data.kind == "bn2mel", ErrorCode::kConfigMismatch,
                 "checkpoint holds a '" + data.kind + "' model, not bn2mel");
  auto model = std::make_unique<BN2MelModel>(
      BN2MelConfig::FromJson(data.config.at("model")),
      Vocabulary(
          data.config.at("speaker_table").get<std::vector<std::string>>()));
  nn::LoadParameters(data, model->params_);
  if (data.Find("stats/bn/mean")) model->bn_stats_ = nn::GetStats(data, "stats/bn");
  if (data.Find("stats/mel/mean")) {
    model->mel_stats_ = nn::GetStats(data, "stats/mel");
  }
  return model;
}

}  // namespace accentbn::models
