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

#include "train/datasets.h"

#include <cstdlib>

#include "core/error.h"
#include "core/feature_io.h"
#include "core/interpolate.h"

namespace accentbn::train {
namespace {

Matrix LoadWidth(const std::filesystem::path& path, int width,
                 const std::string& what) {
  Matrix m = LoadFeatures(path);
  ACCENTBN_CHECK(m.cols() == width, ErrorCode::kConfigMismatch,
                 path.string() + ": " + what + " width " +
                     std::to_string(m.cols()) + ", expected " +
                     std::to_string(width));
  ACCENTBN_CHECK(m.rows() >= 1, ErrorCode::kValidation,
                 path.string() + ": no frames");
  return m;
}

}  // namespace

T2BNDataset LoadT2BNDataset(const Manifest& manifest, int bn_dim,
                            int tolerance) {
  manifest.Validate();
  T2BNDataset ds;
  ds.phonemes = manifest.phoneme_table;
  for (const auto& r : manifest.records) {
    ACCENTBN_CHECK(r.durations.has_value(), ErrorCode::kValidation,
                   r.utt_id + ": T2BN training needs durations");
    ACCENTBN_CHECK(!r.bn_path.empty(), ErrorCode::kValidation,
                   r.utt_id + ": T2BN training needs bn_path");
    T2BNExample ex;
    ex.utt_id = r.utt_id;
    ex.phonemes = manifest.PhonemeIds(r);
    ex.durations = r.durations->frames;
    Matrix bn = LoadWidth(manifest.Resolve(r.bn_path), bn_dim, "BN");
    const Eigen::Index total = r.durations->Total();
    ACCENTBN_CHECK(std::abs(bn.rows() - total) <= tolerance,
                   ErrorCode::kValidation,
                   r.utt_id + ": sum(durations) = " + std::to_string(total) +
                       " but BN has " + std::to_string(bn.rows()) + " frames");
    if (bn.rows() != total) {
      Matrix fixed(total, bn.cols());
      for (Eigen::Index i = 0; i < total; ++i) {
        fixed.row(i) = bn.row(std::min(i, bn.rows() - 1));
      }
      bn = std::move(fixed);
    }
    ex.bn = std::move(bn);
    ds.examples.push_back(std::move(ex));
  }
  ACCENTBN_CHECK(!ds.examples.empty(), ErrorCode::kCorpusEmpty,
                 "T2BN training manifest has no records");
  return ds;
}

BN2BNDataset LoadBN2BNDataset(const augment::PairManifest& pairs) {
  BN2BNDataset ds;
  ds.accent = pairs.accent;
  ds.speakers = pairs.speaker_table;
  for (const auto& r : pairs.records) {
    BN2BNExample ex;
    ex.utt_id = r.utt_id;
    ex.speaker = r.spk_ac;
    ex.bn_ua = LoadWidth(pairs.Resolve(r.bn_ua_path), pairs.bn_dim, "BN_ua");
    ex.bn_ac = LoadWidth(pairs.Resolve(r.bn_ac_path), pairs.bn_dim, "BN_ac");
    ACCENTBN_CHECK(ex.bn_ua.rows() == r.frames && ex.bn_ac.rows() == r.frames,
                   ErrorCode::kValidation,
                   r.utt_id + ": pair files disagree with frames = " +
                       std::to_string(r.frames));
    ds.examples.push_back(std::move(ex));
  }
  ACCENTBN_CHECK(!ds.examples.empty(), ErrorCode::kCorpusEmpty,
                 "pair manifest has no records");
  return ds;
}

BN2BNDataset MakeBN2BNDataset(const std::vector<augment::ParallelPair>& pairs,
                              const Vocabulary& speakers,
                              const std::string& accent) {
  BN2BNDataset ds;
  ds.accent = accent;
  ds.speakers = speakers;
  for (const auto& p : pairs) {
    p.Validate();
    ds.examples.push_back({p.utt_id, p.bn_ua_hat.values, p.bn_ac.values, p.spk_ac});
  }
  ACCENTBN_CHECK(!ds.examples.empty(), ErrorCode::kCorpusEmpty,
                 "no parallel pairs");
  return ds;
}

BN2MelDataset LoadBN2MelDataset(const Manifest& manifest, int bn_dim) {
  manifest.Validate();
  BN2MelDataset ds;
  ds.speakers = manifest.speaker_table;
  for (const auto& r : manifest.records) {
    ACCENTBN_CHECK(!r.mel_path.empty() && !r.bn_path.empty(),
                   ErrorCode::kValidation,
                   r.utt_id + ": BN2Mel training needs mel_path and bn_path");
    BN2MelExample ex;
    ex.utt_id = r.utt_id;
    ex.speaker = r.speaker_id;
    ex.mel = LoadWidth(manifest.Resolve(r.mel_path),
                       manifest.feature_config.n_mels, "mel");
    ex.bn = LoadWidth(manifest.Resolve(r.bn_path), bn_dim, "BN");
    if (ex.bn.rows() != ex.mel.rows()) {
      ex.bn = InterpolateFrames(ex.bn, ex.mel.rows());
    }
    ds.examples.push_back(std::move(ex));
  }
  ACCENTBN_CHECK(!ds.examples.empty(), ErrorCode::kCorpusEmpty,
                 "BN2Mel training manifest has no records");
  return ds;
}

}  // namespace accentbn::train
