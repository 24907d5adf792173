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
#include <limits>
#include <set>

#include "augment/synthetic.h"
#include "core/error.h"
#include "doctest.h"
#include "models/bn2bn.h"
#include "models/bn2mel.h"
#include "models/t2bn.h"
#include "nn/checkpoint.h"
#include "support/fixtures.h"
#include "train/batcher.h"
#include "train/config.h"
#include "train/datasets.h"
#include "train/fit.h"

namespace accentbn {
namespace {

using testing::ErrorCodeOf;
using testing::Gaussian;
using testing::TempDir;

constexpr int kInvalid = static_cast<int>(ErrorCode::kInvalidInput);
constexpr int kMismatch = static_cast<int>(ErrorCode::kConfigMismatch);

TEST_CASE("mse examples") {
  const Matrix a = Gaussian(4, 3, 1);
  CHECK(train::MseLoss(a, a) == 0.0);
  CHECK(train::MseLoss(a.array() + 1.0, a) == doctest::Approx(1.0));
  const Matrix b = Gaussian(4, 3, 2);
  const double masked = train::MseLoss(a, b, {1, 0, 1, 0});
  Matrix av(2, 3), bv(2, 3);
  av << a.row(0), a.row(2);
  bv << b.row(0), b.row(2);
  double brute = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) brute += (av(i, j) - bv(i, j)) * (av(i, j) - bv(i, j));
  }
  CHECK(masked == doctest::Approx(brute / 6.0).epsilon(1e-14));
  CHECK(masked == doctest::Approx(train::MseLoss(av, bv)).epsilon(1e-14));
}

TEST_CASE("mse errors") {
  const Matrix a = Gaussian(4, 3, 1);
  CHECK(ErrorCodeOf([&] { train::MseLoss(a, Gaussian(4, 2, 1)); }) == kInvalid);
  CHECK(ErrorCodeOf([&] { train::MseLoss(a, a, {1, 0}); }) == kInvalid);
  CHECK(ErrorCodeOf([&] { train::MseLoss(a, a, {0, 0, 0, 0}); }) == kInvalid);
}

TEST_CASE("training defaults") {
  const train::TrainConfig c;
  CHECK(c.lr == 2e-4);
  CHECK(c.batch_size == 16);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.98);
  CHECK(c.eps == 1e-9);
  CHECK(c.max_steps == 2000);
  CHECK(c.clip_norm == 1.0);
  const auto back = train::TrainConfig::FromJson(c.ToJson());
  CHECK(back.ToJson() == c.ToJson());
}

TEST_CASE("training config validation") {
  train::TrainConfig c;
  c.lr = 0;
  CHECK(ErrorCodeOf([&] { c.Validate(); }) == kMismatch);
  c = {};
  c.batch_size = 0;
  CHECK(ErrorCodeOf([&] { c.Validate(); }) == kMismatch);
  c = {};
  c.beta2 = 1.0;
  CHECK(ErrorCodeOf([&] { c.Validate(); }) == kMismatch);
}

TEST_CASE("batcher covers each example once per epoch and is reproducible") {
  std::vector<Eigen::Index> lengths;
  for (int i = 0; i < 37; ++i) lengths.push_back(3 + (i * 7) % 11);
  train::Batcher a(lengths, 5, 9), b(lengths, 5, 9), c(lengths, 5, 10);
  CHECK(a.batches_per_epoch() == 8);
  for (int64_t epoch = 0; epoch < 3; ++epoch) {
    std::multiset<size_t> seen;
    for (int64_t k = 0; k < a.batches_per_epoch(); ++k) {
      const auto batch = a.Batch(epoch * a.batches_per_epoch() + k);
      CHECK(batch.size() <= 5);
      seen.insert(batch.begin(), batch.end());
    }
    CHECK(seen.size() == 37);
    CHECK(std::set<size_t>(seen.begin(), seen.end()).size() == 37);
  }
  bool differs = false;
  for (int64_t step = 0; step < 30; ++step) {
    CHECK(a.Batch(step) == b.Batch(step));
    differs |= a.Batch(step) != c.Batch(step);
  }
  CHECK(differs);
  // Random access gives the same batches as sequential access.
  CHECK(a.Batch(17) == train::Batcher(lengths, 5, 9).Batch(17));
  train::Batcher single(lengths, 5, 9, true);
  for (int64_t step = 0; step < 10; ++step) {
    CHECK(single.Batch(step) == std::vector<size_t>{0, 1, 2, 3, 4});
  }
}

train::T2BNDataset Toy(const augment::SyntheticCorpus& c) {
  train::T2BNDataset ds;
  ds.phonemes = c.target.phoneme_table;
  for (const auto& r : c.target.records) {
    ds.examples.push_back({r.utt_id, c.target.PhonemeIds(r), r.durations->frames,
                           c.bn.at(r.utt_id)});
  }
  return ds;
}

augment::SyntheticCorpus SmallCorpus() {
  augment::SyntheticAccentSpec spec;
  spec.bn_dim = 16;
  spec.target_utterances = 12;
  spec.accent_utterances = 4;
  return augment::GenerateSyntheticCorpus(spec);
}

models::T2BNConfig SmallT2BN() {
  models::T2BNConfig c;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.hidden = 16;
  c.filter = 32;
  c.bn_dim = 16;
  return c;
}

TEST_CASE("t2bn total loss is the sum of its logged parts") {
  const auto corpus = SmallCorpus();
  const auto ds = Toy(corpus);
  models::T2BNModel model(SmallT2BN(), ds.phonemes);
  train::TrainConfig tc;
  tc.max_steps = 5;
  tc.batch_size = 4;
  auto trainable = train::MakeTrainable(model, ds);
  const auto r = train::Fit(*trainable, tc);
  CHECK(r.curve.parts == std::vector<std::string>{"bn", "duration"});
  for (const auto& row : r.curve.rows) {
    CHECK(row.total == doctest::Approx(row.parts[0] + row.parts[1]).epsilon(1e-14));
    CHECK(row.total >= 0.0);
    CHECK(std::isfinite(row.total));
  }
}

TEST_CASE("identical seeds give identical loss curves") {
  const auto corpus = SmallCorpus();
  const auto ds = Toy(corpus);
  auto run = [&](uint64_t seed) {
    models::T2BNModel model(SmallT2BN(), ds.phonemes);
    train::TrainConfig tc;
    tc.max_steps = 12;
    tc.batch_size = 4;
    tc.seed = seed;
    auto trainable = train::MakeTrainable(model, ds);
    return train::Fit(*trainable, tc).curve;
  };
  const auto a = run(3), b = run(3), c = run(4);
  REQUIRE(a.rows.size() == 12);
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(std::abs(a.rows[i].total - b.rows[i].total) <= 1e-6);
  }
  CHECK(a.rows.back().total != c.rows.back().total);
}

TEST_CASE("resuming continues the uninterrupted run") {
  const auto corpus = SmallCorpus();
  const auto ds = Toy(corpus);
  TempDir dir;
  train::TrainConfig tc;
  tc.max_steps = 10;
  tc.batch_size = 4;
  tc.checkpoint_interval = 5;
  models::T2BNModel full(SmallT2BN(), ds.phonemes);
  train::FitOptions fo;
  fo.out_dir = dir / "full";
  auto t_full = train::MakeTrainable(full, ds);
  const auto uninterrupted = train::Fit(*t_full, tc, fo);
  CHECK(std::filesystem::exists(dir / "full/checkpoints/step_0000005.ckpt"));
  CHECK(std::filesystem::exists(dir / "full/final.ckpt"));

  const auto ck = nn::LoadCheckpoint(dir / "full/checkpoints/step_0000005.ckpt");
  CHECK(ck.step == 5);
  auto resumed_model = models::T2BNModel::FromCheckpoint(ck);
  train::FitOptions ro;
  ro.resume = ck;
  ro.previous = train::LossCurve::ReadCsv(dir / "full/loss.csv");
  auto t_res = train::MakeTrainable(*resumed_model, ds);
  const auto resumed = train::Fit(*t_res, tc, ro);
  REQUIRE(resumed.curve.rows.size() == 10);
  for (size_t i = 0; i < 10; ++i) {
    CHECK(resumed.curve.rows[i].step == static_cast<int64_t>(i + 1));
    CHECK(std::abs(resumed.curve.rows[i].total - uninterrupted.curve.rows[i].total) <= 1e-6);
  }
  const auto a = full.Forward({"ph00", "ph01"}, DurationSequence{{2, 2}});
  const auto b = resumed_model->Forward({"ph00", "ph01"}, DurationSequence{{2, 2}});
  CHECK((a.bn.values - b.bn.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("loss csv round trip") {
  TempDir dir;
  train::LossCurve c;
  c.parts = {"pre_mel", "post_mel"};
  c.rows = {{1, 0.3, {0.1, 0.2}}, {2, 1.0 / 3.0, {0.25, 1.0 / 12.0}}};
  c.WriteCsv(dir / "l.csv");
  CHECK(testing::ReadFile(dir / "l.csv").rfind("step,loss,pre_mel,post_mel\n", 0) == 0);
  const auto back = train::LossCurve::ReadCsv(dir / "l.csv");
  CHECK(back.parts == c.parts);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1].total == c.rows[1].total);
  CHECK(back.rows[1].parts == c.rows[1].parts);
}

TEST_CASE("non-finite losses abort with a diagnostic checkpoint") {
  const auto corpus = SmallCorpus();
  const auto ds = Toy(corpus);
  models::T2BNModel model(SmallT2BN(), ds.phonemes);
  model.params().Get("proj.w").value(0, 0) = std::numeric_limits<double>::quiet_NaN();
  TempDir dir;
  train::TrainConfig tc;
  tc.max_steps = 5;
  tc.batch_size = 4;
  train::FitOptions fo;
  fo.out_dir = dir.path();
  auto trainable = train::MakeTrainable(model, ds);
  CHECK(ErrorCodeOf([&] { train::Fit(*trainable, tc, fo); }) ==
        static_cast<int>(ErrorCode::kNumericFailure));
  REQUIRE(std::filesystem::exists(dir / "diagnostic.ckpt"));
  const auto diag = nn::LoadCheckpoint(dir / "diagnostic.ckpt");
  CHECK(diag.config.contains("failure"));
  CHECK(diag.kind == "t2bn");
}

TEST_CASE("incompatible datasets are configuration errors") {
  const auto corpus = SmallCorpus();
  auto ds = Toy(corpus);
  models::T2BNModel other_vocab(SmallT2BN(), Vocabulary({"x", "y"}));
  CHECK(ErrorCodeOf([&] {
          auto t = train::MakeTrainable(other_vocab, ds);
          t->Prepare(false);
        }) == kMismatch);
  auto wide = SmallT2BN();
  wide.bn_dim = 20;
  models::T2BNModel wrong_width(wide, ds.phonemes);
  CHECK(ErrorCodeOf([&] {
          auto t = train::MakeTrainable(wrong_width, ds);
          t->Prepare(false);
        }) == kMismatch);
}

TEST_CASE("single-batch overfitting drives the loss down") {
  const auto corpus = SmallCorpus();
  const auto ds = Toy(corpus);
  models::T2BNModel model(SmallT2BN(), ds.phonemes);
  train::TrainConfig tc;
  tc.max_steps = 300;
  tc.batch_size = 8;
  tc.single_batch = true;
  tc.lr = 1e-3;
  auto trainable = train::MakeTrainable(model, ds);
  const auto curve = train::Fit(*trainable, tc).curve;
  INFO("first " << curve.rows.front().total << " last " << curve.rows.back().total);
  CHECK(curve.rows.back().total <= 0.05 * curve.rows.front().total);
}

TEST_CASE("bn2bn and bn2mel trainables report their parts") {
  const auto corpus = SmallCorpus();
  train::BN2BNDataset bd;
  bd.speakers = corpus.accent.speaker_table;
  for (const auto& r : corpus.accent.records) {
    bd.examples.push_back({r.utt_id, corpus.bn_ua.at(r.utt_id), corpus.bn.at(r.utt_id),
                           r.speaker_id});
  }
  models::BN2BNConfig bc;
  bc.fft_layers = 1;
  bc.hidden = 8;
  bc.filter = 8;
  bc.bn_dim = 16;
  models::BN2BNModel bn2bn(bc, bd.speakers);
  train::TrainConfig tc;
  tc.max_steps = 2;
  tc.batch_size = 2;
  auto tb = train::MakeTrainable(bn2bn, bd);
  CHECK(train::Fit(*tb, tc).curve.parts == std::vector<std::string>{"bn"});

  train::BN2MelDataset md;
  md.speakers = corpus.target.speaker_table;
  for (const auto& r : corpus.target.records) {
    md.examples.push_back({r.utt_id, corpus.bn.at(r.utt_id), corpus.mel.at(r.utt_id), 0});
  }
  models::BN2MelConfig mc;
  mc.bn_dim = 16;
  mc.cbhg_dim = 8;
  mc.bank_size = 2;
  mc.projection_dim = 8;
  mc.highway_layers = 1;
  mc.gru_dim = 8;
  mc.decoder_dim = 8;
  mc.prenet_dims = {8, 8};
  mc.postnet_channels = 8;
  models::BN2MelModel bn2mel(mc, md.speakers);
  auto tm = train::MakeTrainable(bn2mel, md);
  const auto curve = train::Fit(*tm, tc).curve;
  CHECK(curve.parts == std::vector<std::string>{"pre_mel", "post_mel"});
  for (const auto& row : curve.rows) {
    CHECK(row.total == doctest::Approx(row.parts[0] + row.parts[1]).epsilon(1e-14));
  }
  CHECK_FALSE(bn2mel.mel_stats().empty());
}

TEST_CASE("seed mixing spreads indices") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i) seen.insert(train::MixSeed(1, i));
  CHECK(seen.size() == 1000);
  CHECK(train::MixSeed(1, 5) == train::MixSeed(1, 5));
  CHECK(train::MixSeed(1, 5) != train::MixSeed(2, 5));
}

}  // namespace
}  // namespace accentbn
