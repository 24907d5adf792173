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

#ifndef ACCENTBN_TRAIN_DATASETS_H_
#define ACCENTBN_TRAIN_DATASETS_H_

#include <string>
#include <vector>

#include "augment/parallel.h"
#include "core/manifest.h"
#include "core/types.h"
#include "core/vocabulary.h"

namespace accentbn::train {

struct T2BNExample {
  std::string utt_id;
  std::vector<int> phonemes;
  std::vector<int> durations;
  Matrix bn;  // sum(durations) x bn_dim
};

struct T2BNDataset {
  Vocabulary phonemes;
  std::vector<T2BNExample> examples;
};

struct BN2BNExample {
  std::string utt_id;
  Matrix bn_ua;
  Matrix bn_ac;
  int speaker = 0;
};

struct BN2BNDataset {
  std::string accent;
  Vocabulary speakers;
  std::vector<BN2BNExample> examples;
};

struct BN2MelExample {
  std::string utt_id;
  Matrix bn;
  Matrix mel;
  int speaker = 0;
};

struct BN2MelDataset {
  Vocabulary speakers;
  std::vector<BN2MelExample> examples;
};

// Records need durations and a bn_path. BN within `tolerance` frames of
// sum(durations) is trimmed or edge-padded to match; larger gaps are a
// validation error.
T2BNDataset LoadT2BNDataset(const Manifest& manifest, int bn_dim,
                            int tolerance = kDurationMismatchTolerance);

BN2BNDataset LoadBN2BNDataset(const augment::PairManifest& pairs);
BN2BNDataset MakeBN2BNDataset(const std::vector<augment::ParallelPair>& pairs,
                              const Vocabulary& speakers,
                              const std::string& accent);

// Records need mel_path and bn_path; BN is resampled to the mel frame count
// when they differ.
BN2MelDataset LoadBN2MelDataset(const Manifest& manifest, int bn_dim);

}  // namespace accentbn::train

#endif  // ACCENTBN_TRAIN_DATASETS_H_
