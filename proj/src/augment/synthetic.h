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

#ifndef ACCENTBN_AUGMENT_SYNTHETIC_H_
#define ACCENTBN_AUGMENT_SYNTHETIC_H_

#include <filesystem>
#include <map>
#include <string>

#include "core/manifest.h"
#include "core/types.h"
#include "json.hpp"

namespace accentbn::augment {

// Desk-scale corpus where the accent is a planted linear map:
// BN_ac = BN_ua A^T + b_spk.
struct SyntheticAccentSpec {
  uint64_t seed = 1;
  int bn_dim = kDefaultBnDim;
  int num_phonemes = 12;
  int num_speakers = 2;
  int target_utterances = 32;
  int accent_utterances = 32;
  int min_phonemes = 4;
  int max_phonemes = 8;
  int min_duration = 2;
  int max_duration = 6;
  // Singular values of A are spread evenly over [min, max].
  double singular_min = 0.5;
  double singular_max = 1.5;
  bool identity_transform = false;
  double bias_scale = 0.5;
  // Gaussian noise on BN_ac, standing in for extractor noise.
  double noise = 0.0;
  // Per-frame variation around each phoneme prototype.
  double jitter = 0.05;
  double slope_scale = 0.5;
  std::string accent = "accent";

  void Validate() const;
  nlohmann::json ToJson() const;
  static SyntheticAccentSpec FromJson(const nlohmann::json& j);
};

struct SyntheticCorpus {
  Manifest target;
  Manifest accent;
  Matrix transform;  // bn_dim x bn_dim
  Matrix bias;       // num_speakers x bn_dim
  // Per-utterance arrays keyed by utt_id.
  std::map<std::string, Matrix> mel;
  std::map<std::string, Matrix> bn;     // BN_ua for target, BN_ac for accent
  std::map<std::string, Matrix> bn_ua;  // ground-truth BN_ua of accent utts
};

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticAccentSpec& spec);

// Layout under `dir`:
//   target/manifest.jsonl, target/feats/<id>.{mel,bn}.abnf
//   accent/manifest.jsonl, accent/feats/<id>.{mel,bn,bn_ua}.abnf
//   transform.abnf, bias.abnf, spec.json
void WriteSyntheticCorpus(const SyntheticCorpus& corpus,
                          const SyntheticAccentSpec& spec,
                          const std::filesystem::path& dir);

}  // namespace accentbn::augment

#endif  // ACCENTBN_AUGMENT_SYNTHETIC_H_
