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

#include <cmath>
#include <random>

#include "augment/synthetic.h"
#include "core/error.h"
#include "core/feature_io.h"
#include "core/mel.h"
#include "doctest.h"
#include "models/bn2bn.h"
#include "models/bn2mel.h"
#include "models/t2bn.h"
#include "models/vocoder.h"
#include "nn/checkpoint.h"
#include "support/fixtures.h"
#include "support/gradcheck.h"
#include "train/fit.h"

namespace accentbn {
namespace {

using models::BN2BNConfig;
using models::BN2BNModel;
using models::BN2MelConfig;
using models::BN2MelModel;
using models::T2BNConfig;
using models::T2BNModel;
using testing::ErrorCodeOf;
using testing::Gaussian;

constexpr int kInvalid = static_cast<int>(ErrorCode::kInvalidInput);
constexpr int kMismatch = static_cast<int>(ErrorCode::kConfigMismatch);
constexpr int kVocab = static_cast<int>(ErrorCode::kVocabulary);

void Scramble(nn::ParameterStore& store, const std::string& prefix,
              uint64_t seed, double scale) {
  for (size_t i = 0; i < store.size(); ++i) {
    nn::Parameter& p = store[i];
    if (p.name.rfind(prefix, 0) != 0) continue;
    p.value = Gaussian(p.value.rows(), p.value.cols(), seed + i, scale);
  }
}

T2BNConfig TinyT2BN(int bn_dim = 8) {
  T2BNConfig c;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.hidden = 8;
  c.filter = 12;
  c.bn_dim = bn_dim;
  return c;
}

BN2BNConfig TinyBN2BN(int bn_dim = 8) {
  BN2BNConfig c;
  c.fft_layers = 1;
  c.hidden = 8;
  c.filter = 12;
  c.speaker_dim = 4;
  c.bn_dim = bn_dim;
  return c;
}

BN2MelConfig TinyBN2Mel(int bn_dim = 8) {
  BN2MelConfig c;
  c.bn_dim = bn_dim;
  c.cbhg_dim = 6;
  c.bank_size = 3;
  c.projection_dim = 8;
  c.highway_layers = 1;
  c.gru_dim = 5;
  c.decoder_dim = 8;
  c.prenet_dims = {8, 6};
  c.postnet_layers = 2;
  c.postnet_channels = 6;
  c.postnet_kernel = 3;
  c.speaker_dim = 4;
  return c;
}

Vocabulary Phonemes() { return Vocabulary({"a", "b", "c", "d", "e"}); }

// ---------------------------------------------------------------- t2bn

TEST_CASE("length regulator examples") {
  Matrix h(2, 3);
  h << 1, 2, 3, 4, 5, 6;
  SUBCASE("all ones is the identity") {
    CHECK(models::LengthRegulate(h, {{1, 1}}) == h);
  }
  SUBCASE("[2,3] repeats rows in order") {
    const Matrix out = models::LengthRegulate(h, {{2, 3}});
    REQUIRE(out.rows() == 5);
    for (int i = 0; i < 2; ++i) CHECK(out.row(i) == h.row(0));
    for (int i = 2; i < 5; ++i) CHECK(out.row(i) == h.row(1));
  }
  SUBCASE("zero durations omit the row") {
    const Matrix out = models::LengthRegulate(h, {{0, 4}});
    REQUIRE(out.rows() == 4);
    for (int i = 0; i < 4; ++i) CHECK(out.row(i) == h.row(1));
  }
  SUBCASE("errors") {
    CHECK(ErrorCodeOf([&] { models::LengthRegulate(h, {{1}}); }) == kInvalid);
    CHECK(ErrorCodeOf([&] { models::LengthRegulate(h, {{0, 0}}); }) == kInvalid);
    CHECK(ErrorCodeOf([&] { models::LengthRegulate(h, {{-1, 3}}); }) == kInvalid);
  }
}

TEST_CASE("length regulator output matches a naive expansion on random cases") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    std::vector<int> d(n);
    int total = 0;
    for (auto& v : d) total += (v = static_cast<int>(rng() % 11));
    if (total == 0) d[0] = total = 1;
    const Matrix h = Gaussian(n, 2, trial);
    const Matrix out = models::LengthRegulate(h, {d});
    REQUIRE(out.rows() == total);
    Eigen::Index row = 0;
    bool same = true;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d[i]; ++k) same &= out.row(row++) == h.row(i);
    }
    CHECK(same);
  }
}

TEST_CASE("duration target and inference rule") {
  CHECK(models::DurationTarget(4) == doctest::Approx(std::log(5.0)));
  CHECK(models::DurationTarget(4) == doctest::Approx(1.609).epsilon(1e-3));
  CHECK(models::DurationFromLog(0.0) == 1);
  CHECK(models::DurationFromLog(-3.0) == 1);
  for (int d = 1; d <= 2000; ++d) {
    CHECK(models::DurationFromLog(models::DurationTarget(d)) == d);
  }
}

TEST_CASE("t2bn config validation") {
  T2BNConfig c = TinyT2BN();
  c.heads = 3;
  CHECK(ErrorCodeOf([&] { c.Validate(); }) == kMismatch);
  c = TinyT2BN();
  c.decoder_layers = 0;
  CHECK(ErrorCodeOf([&] { c.Validate(); }) == kMismatch);
  const T2BNConfig d;
  CHECK(d.encoder_layers == 6);
  CHECK(d.decoder_layers == 6);
  CHECK(d.hidden == 192);
  CHECK(d.filter == 768);
  CHECK(d.bn_dim == 512);
}

TEST_CASE("untrained t2bn forward shapes") {
  T2BNConfig c;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.hidden = 16;
  c.filter = 32;
  T2BNModel model(c, Phonemes());
  const auto out = model.Forward({"a", "c", "e", "b"}, DurationSequence{{2, 0, 4, 1}});
  CHECK(out.bn.values.rows() == 7);
  CHECK(out.bn.values.cols() == 512);
  CHECK(out.bn.values.allFinite());
  CHECK(out.bn.provenance == Provenance::kPredicted);
  CHECK(out.bn.accent == AccentTag::kUnaccented);
  const auto five = model.Forward({"a", "b"}, DurationSequence{{2, 3}});
  CHECK(five.bn.values.rows() == 5);
}

TEST_CASE("supplied durations bypass the duration predictor") {
  T2BNModel model(TinyT2BN(), Phonemes());
  const size_t before = model.duration_predictor_calls();
  for (int i = 0; i < 5; ++i) model.Forward({"a", "b", "c"}, DurationSequence{{1, 2, 3}});
  CHECK(model.duration_predictor_calls() == before);
  const auto predicted = model.Forward({"a", "b", "c"}, std::nullopt);
  CHECK(model.duration_predictor_calls() == before + 1);
  CHECK(predicted.log_durations.size() == 3);
  int total = 0;
  for (int d : predicted.durations.frames) {
    CHECK(d >= 1);
    total += d;
  }
  CHECK(predicted.bn.values.rows() == total);
}

TEST_CASE("duration predictor gives one value per phoneme") {
  T2BNModel model(TinyT2BN(), Phonemes());
  CHECK(model.PredictDurations({0, 1, 2, 3, 4, 0, 1}).size() == 7);
  CHECK(ErrorCodeOf([&] { model.PredictDurations({}); }) == kInvalid);
}

TEST_CASE("unknown phonemes are vocabulary errors") {
  T2BNModel model(TinyT2BN(), Phonemes());
  CHECK(ErrorCodeOf([&] { model.Forward({"a", "zz"}, std::nullopt); }) == kVocab);
}

TEST_CASE("t2bn loss gradients match finite differences") {
  T2BNModel model(TinyT2BN(4), Vocabulary({"a", "b", "c"}));
  Scramble(model.params(), "", 3, 0.3);
  const Matrix y1 = Gaussian(5, 4, 1), y2 = Gaussian(3, 4, 2);
  models::T2BNBatch batch;
  batch.phonemes = {{0, 1}, {2, 1, 0}};
  batch.durations = {{2, 3}, {1, 0, 2}};
  batch.targets = {&y1, &y2};
  for (bool training : {false, true}) {
    auto r = testing::CheckGradients(
        model.params(),
        [&](nn::Tape& t) { return model.Loss(t, batch).total; }, training,
        1e-5, 7, 1e-9);
    INFO("training=" << training << " worst " << r.worst);
    CHECK(r.max_relative_error < 1e-4);
  }
}

TEST_CASE("t2bn loss ignores padding") {
  T2BNModel model(TinyT2BN(4), Vocabulary({"a", "b", "c"}));
  Scramble(model.params(), "proj.", 3, 0.3);
  const Matrix y1 = Gaussian(5, 4, 1), y2 = Gaussian(9, 4, 2);
  models::T2BNBatch batch;
  batch.phonemes = {{0, 1}, {2, 1, 0, 2}};
  batch.durations = {{2, 3}, {1, 4, 2, 2}};
  batch.targets = {&y1, &y2};
  nn::Tape a(false), b(false);
  batch.pad = true;
  const double padded = model.Loss(a, batch).total.value()(0, 0);
  batch.pad = false;
  const double packed = model.Loss(b, batch).total.value()(0, 0);
  CHECK(padded == doctest::Approx(packed).epsilon(1e-12));
}

TEST_CASE("t2bn checkpoint round trip") {
  testing::TempDir dir;
  T2BNModel model(TinyT2BN(), Phonemes());
  Scramble(model.params(), "proj.", 9, 0.5);
  NormStats stats{RowVector::Constant(8, 0.5), RowVector::Constant(8, 2.0)};
  model.set_bn_stats(stats);
  nn::SaveCheckpoint(model.ToCheckpoint(), dir / "m.ckpt");
  auto back = T2BNModel::FromCheckpoint(nn::LoadCheckpoint(dir / "m.ckpt"));
  const DurationSequence d{{1, 2, 3}};
  CHECK(back->Forward({"a", "b", "c"}, d).bn.values ==
        model.Forward({"a", "b", "c"}, d).bn.values);
  CHECK(back->phonemes() == model.phonemes());
}

// ---------------------------------------------------------------- bn2bn

TEST_CASE("bn2bn preserves length for every speaker") {
  BN2BNConfig c = TinyBN2BN(512);
  BN2BNModel model(c, Vocabulary({"s0", "s1", "s2"}));
  Scramble(model.params(), "out.", 1, 0.1);
  for (int t : {1, 2, 7, 40}) {
    for (int s = 0; s < 3; ++s) {
      const BNMatrix out = model.Forward(
          {Gaussian(t, 512, t), Provenance::kPredicted, AccentTag::kUnaccented}, s);
      CHECK(out.values.rows() == t);
      CHECK(out.values.cols() == 512);
      CHECK(out.accent == AccentTag::kAccented);
      CHECK(out.provenance == Provenance::kPredicted);
    }
  }
}

TEST_CASE("bn2bn input validation") {
  BN2BNModel model(TinyBN2BN(), Vocabulary({"s0"}));
  const BNMatrix ok{Gaussian(4, 8, 1), Provenance::kPredicted, AccentTag::kUnaccented};
  CHECK(ErrorCodeOf([&] { model.Forward(ok, 1); }) == kVocab);
  CHECK(ErrorCodeOf([&] { model.Forward(ok, -1); }) == kVocab);
  const BNMatrix wide{Gaussian(4, 9, 1), Provenance::kPredicted, AccentTag::kUnaccented};
  CHECK(ErrorCodeOf([&] { model.Forward(wide, 0); }) == kMismatch);
}

TEST_CASE("bn2bn starts as the identity map") {
  BN2BNModel model(TinyBN2BN(), Vocabulary({"s0", "s1"}));
  const Matrix x = Gaussian(6, 8, 4);
  CHECK(model.Forward({x, Provenance::kPredicted, AccentTag::kUnaccented}, 1)
            .values.isApprox(x, 1e-14));
}

TEST_CASE("frame-local ablation commutes with frame permutations") {
  BN2BNConfig c = TinyBN2BN();
  c.context = false;
  BN2BNModel model(c, Vocabulary({"s0", "s1"}));
  Scramble(model.params(), "", 2, 0.4);
  const Matrix x = Gaussian(9, 8, 5);
  Matrix swapped = x;
  swapped.row(2).swap(swapped.row(6));
  const Matrix y = model.Forward({x, Provenance::kPredicted, AccentTag::kUnaccented}, 1).values;
  Matrix ys = model.Forward({swapped, Provenance::kPredicted, AccentTag::kUnaccented}, 1).values;
  ys.row(2).swap(ys.row(6));
  CHECK((y - ys).cwiseAbs().maxCoeff() == 0.0);
  // A single frame evaluated alone gives the same output row.
  const Matrix one =
      model.Forward({x.row(4), Provenance::kPredicted, AccentTag::kUnaccented}, 1).values;
  CHECK((one.row(0) - y.row(4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("with context the map sees neighbouring frames") {
  BN2BNModel model(TinyBN2BN(), Vocabulary({"s0"}));
  Scramble(model.params(), "", 2, 0.4);
  const Matrix x = Gaussian(9, 8, 5);
  Matrix bumped = x;
  bumped.row(6).array() += 1.0;
  const Matrix a = model.Forward({x, Provenance::kPredicted, AccentTag::kUnaccented}, 0).values;
  const Matrix b = model.Forward({bumped, Provenance::kPredicted, AccentTag::kUnaccented}, 0).values;
  CHECK((a.row(5) - b.row(5)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("bn2bn loss gradients match finite differences") {
  BN2BNModel model(TinyBN2BN(4), Vocabulary({"s0", "s1"}));
  Scramble(model.params(), "out.", 3, 0.3);
  const Matrix x1 = Gaussian(4, 4, 1), x2 = Gaussian(3, 4, 2);
  const Matrix y1 = Gaussian(4, 4, 3), y2 = Gaussian(3, 4, 4);
  models::BN2BNBatch batch{{&x1, &x2}, {&y1, &y2}, {1, 0}, true};
  for (bool training : {false, true}) {
    auto r = testing::CheckGradients(
        model.params(), [&](nn::Tape& t) { return model.Loss(t, batch); }, training);
    INFO("worst " << r.worst);
    CHECK(r.max_relative_error < 1e-4);
  }
}

TEST_CASE("bn2bn loss ignores padding") {
  BN2BNModel model(TinyBN2BN(4), Vocabulary({"s0", "s1"}));
  Scramble(model.params(), "out.", 3, 0.3);
  const Matrix x1 = Gaussian(4, 4, 1), x2 = Gaussian(9, 4, 2);
  const Matrix y1 = Gaussian(4, 4, 3), y2 = Gaussian(9, 4, 4);
  models::BN2BNBatch batch{{&x1, &x2}, {&y1, &y2}, {1, 0}, true};
  nn::Tape a(false), b(false);
  const double padded = model.Loss(a, batch).value()(0, 0);
  batch.pad = false;
  const double packed = model.Loss(b, batch).value()(0, 0);
  CHECK(padded == doctest::Approx(packed).epsilon(1e-12));
}

TEST_CASE("bn2bn trained on identity pairs stays close to the identity") {
  BN2BNConfig c = TinyBN2BN(16);
  c.hidden = 32;
  c.filter = 64;
  BN2BNModel model(c, Vocabulary({"s0", "s1"}));
  // Start away from the identity so training has to recover it.
  Scramble(model.params(), "out.", 11, 0.2);
  train::BN2BNDataset data;
  data.speakers = model.speakers();
  for (int i = 0; i < 24; ++i) {
    const Matrix x = Gaussian(10 + i % 7, 16, 100 + i);
    data.examples.push_back({"u" + std::to_string(i), x, x, i % 2});
  }
  const double before = [&] {
    const Matrix x = Gaussian(12, 16, 999);
    return (model.Forward({x, Provenance::kPredicted, AccentTag::kUnaccented}, 0).values - x)
        .squaredNorm() / x.size();
  }();
  train::TrainConfig tc;
  tc.max_steps = 400;
  tc.batch_size = 8;
  tc.lr = 1e-3;
  auto trainable = train::MakeTrainable(model, data);
  train::Fit(*trainable, tc);
  double mse = 0.0;
  Eigen::Index n = 0;
  for (int i = 0; i < 6; ++i) {
    const Matrix x = Gaussian(11, 16, 900 + i);
    const Matrix y =
        model.Forward({x, Provenance::kPredicted, AccentTag::kUnaccented}, i % 2).values;
    mse += (y - x).squaredNorm();
    n += x.size();
  }
  mse /= n;
  INFO("before " << before << " after " << mse);
  CHECK(before > 1e-2);
  CHECK(mse < 1e-2);
}

TEST_CASE("trained bn2bn responds to the accent speaker") {
  augment::SyntheticAccentSpec spec;
  spec.bn_dim = 16;
  spec.target_utterances = 2;
  spec.accent_utterances = 24;
  spec.num_speakers = 2;
  const auto corpus = augment::GenerateSyntheticCorpus(spec);
  train::BN2BNDataset data;
  data.speakers = corpus.accent.speaker_table;
  for (const auto& r : corpus.accent.records) {
    data.examples.push_back(
        {r.utt_id, corpus.bn_ua.at(r.utt_id), corpus.bn.at(r.utt_id), r.speaker_id});
  }
  BN2BNConfig c = TinyBN2BN(16);
  c.hidden = 32;
  c.filter = 64;
  BN2BNModel model(c, data.speakers);
  const Matrix x = corpus.bn_ua.at(corpus.accent.records[0].utt_id);
  auto run = [&](int s) {
    return model.Forward({x, Provenance::kPredicted, AccentTag::kUnaccented}, s).values;
  };
  CHECK((run(0) - run(1)).cwiseAbs().maxCoeff() == 0.0);
  train::TrainConfig tc;
  tc.max_steps = 150;
  tc.batch_size = 8;
  tc.lr = 1e-3;
  auto trainable = train::MakeTrainable(model, data);
  train::Fit(*trainable, tc);
  CHECK((run(0) - run(1)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("bn2bn checkpoint round trip keeps the speaker table") {
  testing::TempDir dir;
  BN2BNConfig c = TinyBN2BN();
  c.accent = "north";
  BN2BNModel model(c, Vocabulary({"s0", "s1"}));
  Scramble(model.params(), "", 4, 0.3);
  nn::SaveCheckpoint(model.ToCheckpoint(), dir / "m.ckpt");
  auto back = BN2BNModel::FromCheckpoint(nn::LoadCheckpoint(dir / "m.ckpt"));
  CHECK(back->speakers() == model.speakers());
  CHECK(back->config().accent == "north");
  const BNMatrix x{Gaussian(5, 8, 1), Provenance::kPredicted, AccentTag::kUnaccented};
  CHECK(back->Forward(x, 1).values == model.Forward(x, 1).values);
  CHECK(ErrorCodeOf([&] { T2BNModel::FromCheckpoint(model.ToCheckpoint()); }) == kMismatch);
}

// ---------------------------------------------------------------- bn2mel

TEST_CASE("bn2mel config") {
  const BN2MelConfig d;
  CHECK(d.mel_dim == 80);
  CHECK(d.bank_size == 8);
  CHECK(d.highway_layers == 4);
  CHECK(d.gru_dim == 128);
  CHECK(d.decoder_dim == 256);
  CHECK(d.prenet_dims == std::vector<int>{256, 128});
  CHECK(d.postnet_layers == 5);
  CHECK(d.speaker_dim == 64);
  BN2MelConfig bad = TinyBN2Mel();
  bad.mel_dim = 40;
  CHECK(ErrorCodeOf([&] { bad.Validate(); }) == kMismatch);
}

TEST_CASE("bn2mel is frame synchronous") {
  BN2MelModel model(TinyBN2Mel(), Vocabulary({"s0", "s1"}));
  for (int t : {1, 2, 5, 17}) {
    const BNMatrix bn{Gaussian(t, 8, t), Provenance::kPredicted, AccentTag::kAccented};
    const auto free = model.Forward(bn, 1, std::nullopt, 3);
    CHECK(free.pre_mel.values.rows() == t);
    CHECK(free.post_mel.values.rows() == t);
    CHECK(free.pre_mel.values.cols() == 80);
    CHECK(free.post_mel.values.cols() == 80);
    const MelMatrix teacher{Gaussian(t, 80, 50 + t)};
    const auto forced = model.Forward(bn, 0, teacher, 3);
    CHECK(forced.pre_mel.values.rows() == t);
    CHECK(forced.post_mel.values.cols() == 80);
  }
}

TEST_CASE("decoder sees a zero go-frame then the previous frame") {
  BN2MelModel model(TinyBN2Mel(), Vocabulary({"s0"}));
  Scramble(model.params(), "", 6, 0.3);
  const BNMatrix bn{Gaussian(6, 8, 1), Provenance::kPredicted, AccentTag::kAccented};
  const MelMatrix teacher{Gaussian(6, 80, 2)};
  const auto forced = model.Forward(bn, 0, teacher, 1);
  CHECK(forced.decoder_input.row(0).isZero(0.0));
  for (int t = 1; t < 6; ++t) CHECK(forced.decoder_input.row(t) == teacher.values.row(t - 1));
  const auto free = model.Forward(bn, 0, std::nullopt, 1);
  CHECK(free.decoder_input.row(0).isZero(0.0));
  for (int t = 1; t < 6; ++t) CHECK(free.decoder_input.row(t) == free.pre_mel.values.row(t - 1));
}

TEST_CASE("postnet output is added as a residual") {
  BN2MelModel model(TinyBN2Mel(), Vocabulary({"s0"}));
  Scramble(model.params(), "", 8, 0.3);
  const Matrix x = Gaussian(7, 8, 1), y = Gaussian(7, 80, 2);
  const auto layout = nn::SequenceLayout::Packed({7});
  nn::Tape t(false, 4);
  nn::Var enc = model.Encode(t, t.Constant(x), layout, {0});
  auto [pre, post] = model.DecodeTeacherForced(t, enc, t.Constant(y), layout);
  const Matrix residual = model.Postnet(t, pre, layout).value();
  CHECK(residual.cwiseAbs().maxCoeff() > 0.0);
  CHECK((post.value() - pre.value() - residual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bn2mel input validation") {
  BN2MelModel model(TinyBN2Mel(), Vocabulary({"s0"}));
  const BNMatrix bn{Gaussian(5, 8, 1), Provenance::kPredicted, AccentTag::kAccented};
  CHECK(ErrorCodeOf([&] { model.Forward(bn, 0, MelMatrix{Gaussian(4, 80, 1)}); }) == kInvalid);
  CHECK(ErrorCodeOf([&] { model.Forward(bn, 2, std::nullopt); }) == kVocab);
  const BNMatrix wide{Gaussian(5, 9, 1), Provenance::kPredicted, AccentTag::kAccented};
  CHECK(ErrorCodeOf([&] { model.Forward(wide, 0, std::nullopt); }) == kMismatch);
}

TEST_CASE("bn2mel loss gradients match finite differences") {
  BN2MelConfig c = TinyBN2Mel(3);
  c.mel_dim = 80;
  BN2MelModel model(c, Vocabulary({"s0", "s1"}));
  // Zero biases put the go-frame exactly on the ReLU kink.
  Scramble(model.params(), "", 3, 0.2);
  const Matrix x1 = Gaussian(4, 3, 1), x2 = Gaussian(3, 3, 2);
  const Matrix y1 = Gaussian(4, 80, 3), y2 = Gaussian(3, 80, 4);
  models::BN2MelBatch batch{{&x1, &x2}, {&y1, &y2}, {1, 0}, true};
  auto r = testing::CheckGradients(
      model.params(), [&](nn::Tape& t) { return model.Loss(t, batch).total; }, true);
  INFO("worst " << r.worst);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("bn2mel teacher-forced loss is reproducible under a fixed seed") {
  BN2MelModel model(TinyBN2Mel(), Vocabulary({"s0", "s1"}));
  const Matrix x1 = Gaussian(6, 8, 1), x2 = Gaussian(4, 8, 2);
  const Matrix y1 = Gaussian(6, 80, 3), y2 = Gaussian(4, 80, 4);
  models::BN2MelBatch batch{{&x1, &x2}, {&y1, &y2}, {1, 0}, true};
  nn::Tape a(true, 17), b(true, 17), c(true, 18);
  const double la = model.Loss(a, batch).total.value()(0, 0);
  const double lb = model.Loss(b, batch).total.value()(0, 0);
  const double lc = model.Loss(c, batch).total.value()(0, 0);
  CHECK(std::abs(la - lb) <= 1e-6);
  CHECK(la != lc);
}

TEST_CASE("trained postnet refines held-out teacher-forced mel") {
  augment::SyntheticAccentSpec spec;
  spec.bn_dim = 16;
  spec.target_utterances = 40;
  spec.accent_utterances = 2;
  const auto corpus = augment::GenerateSyntheticCorpus(spec);
  train::BN2MelDataset data;
  data.speakers = corpus.target.speaker_table;
  std::vector<const UtteranceRecord*> held;
  for (size_t i = 0; i < corpus.target.records.size(); ++i) {
    const auto& r = corpus.target.records[i];
    if (i < 32) {
      data.examples.push_back({r.utt_id, corpus.bn.at(r.utt_id), corpus.mel.at(r.utt_id),
                               r.speaker_id});
    } else {
      held.push_back(&r);
    }
  }
  BN2MelConfig c = TinyBN2Mel(16);
  c.cbhg_dim = 32;
  c.projection_dim = 32;
  c.gru_dim = 32;
  c.decoder_dim = 64;
  c.prenet_dims = {64, 32};
  c.postnet_channels = 32;
  c.postnet_layers = 3;
  BN2MelModel model(c, data.speakers);
  train::TrainConfig tc;
  tc.max_steps = 300;
  tc.batch_size = 8;
  tc.lr = 1e-3;
  auto trainable = train::MakeTrainable(model, data);
  train::Fit(*trainable, tc);
  double pre = 0.0, post = 0.0;
  for (size_t i = 0; i < held.size(); ++i) {
    const auto& r = *held[i];
    const Matrix& mel = corpus.mel.at(r.utt_id);
    const auto out = model.Forward({corpus.bn.at(r.utt_id), Provenance::kExtracted,
                                    AccentTag::kUnaccented},
                                   r.speaker_id, MelMatrix{mel}, i);
    CHECK(out.pre_mel.values.allFinite());
    CHECK(out.post_mel.values.allFinite());
    pre += (out.pre_mel.values - mel).squaredNorm();
    post += (out.post_mel.values - mel).squaredNorm();
  }
  INFO("pre " << pre << " post " << post);
  CHECK(post <= pre);
}

TEST_CASE("bn2mel checkpoint round trip") {
  testing::TempDir dir;
  BN2MelModel model(TinyBN2Mel(), Vocabulary({"s0", "s1"}));
  Scramble(model.params(), "", 4, 0.3);
  model.set_stats({RowVector::Constant(8, 0.1), RowVector::Constant(8, 1.5)},
                  {RowVector::Constant(80, -2.0), RowVector::Constant(80, 0.7)});
  nn::SaveCheckpoint(model.ToCheckpoint(), dir / "m.ckpt");
  auto back = BN2MelModel::FromCheckpoint(nn::LoadCheckpoint(dir / "m.ckpt"));
  const BNMatrix bn{Gaussian(5, 8, 1), Provenance::kPredicted, AccentTag::kAccented};
  CHECK(back->Forward(bn, 1, std::nullopt, 9).post_mel.values ==
        model.Forward(bn, 1, std::nullopt, 9).post_mel.values);
}

// ---------------------------------------------------------------- vocoder

MelMatrix ToneMel(int frames) {
  std::vector<double> x(static_cast<size_t>(frames) * 200);
  for (size_t i = 0; i < x.size(); ++i) x[i] = 0.3 * std::sin(0.2 * i);
  return ComputeMel(x, 16000);
}

TEST_CASE("griffin-lim output length is frames times hop") {
  const MelMatrix mel = ToneMel(80);
  CHECK(models::GriffinLim(mel, 4, 1).size() == 16000);
  CHECK(models::GriffinLim(ToneMel(3), 2, 1).size() == 600);
}

TEST_CASE("griffin-lim of silence is near silent") {
  const MelMatrix mel{Matrix::Constant(40, 80, std::log(1e-5))};
  const auto y = models::GriffinLim(mel, 10, 3);
  double energy = 0.0;
  for (double v : y) energy += v * v;
  CHECK(std::sqrt(energy / y.size()) < 1e-3);
}

TEST_CASE("griffin-lim is deterministic per seed") {
  const MelMatrix mel = ToneMel(20);
  CHECK(models::GriffinLim(mel, 5, 7) == models::GriffinLim(mel, 5, 7));
  CHECK(models::GriffinLim(mel, 5, 7) != models::GriffinLim(mel, 5, 8));
}

TEST_CASE("griffin-lim reconstructs a tone's spectrum") {
  const MelMatrix mel = ToneMel(40);
  const auto y = models::GriffinLim(mel, 60, 1);
  const MelMatrix again = ComputeMel(y, 16000);
  const Matrix inner = mel.values.middleRows(4, 32);
  const Matrix rebuilt = again.values.middleRows(4, 32);
  // Linear magnitudes correlate strongly after reconstruction.
  const Matrix a = inner.array().exp().matrix(), b = rebuilt.array().exp().matrix();
  const double corr = (a.array() * b.array()).sum() / (a.norm() * b.norm());
  CHECK(corr > 0.9);
}

TEST_CASE("griffin-lim rejects bad input") {
  Matrix m = ToneMel(5).values;
  m(2, 3) = std::nan("");
  CHECK(ErrorCodeOf([&] { models::GriffinLim(MelMatrix{m}, 3, 1); }) == kInvalid);
  m(2, 3) = std::numeric_limits<double>::infinity();
  CHECK(ErrorCodeOf([&] { models::GriffinLim(MelMatrix{m}, 3, 1); }) == kInvalid);
  CHECK(ErrorCodeOf([&] { models::GriffinLim(ToneMel(5), 0, 1); }) == kInvalid);
}

TEST_CASE("vocoder export round trip") {
  testing::TempDir dir;
  const MelMatrix mel = ToneMel(12);
  models::ExportForVocoder(mel, dir / "x.abnf");
  const auto h = ReadFeatureHeader(dir / "x.abnf");
  CHECK(h.rows == 12);
  CHECK(h.cols == 80);
  CHECK(h.dtype == DType::kFloat32);
  const MelMatrix back = LoadMel(dir / "x.abnf");
  CHECK(back.values.isApprox(mel.values.cast<float>().cast<double>()));
  CHECK(ErrorCodeOf([&] { models::ExportForVocoder(mel, dir / "missing" / "x.abnf"); }) ==
        static_cast<int>(ErrorCode::kIo));
}

}  // namespace
}  // namespace accentbn
