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

#ifndef ACCENTBN_AUGMENT_PARALLEL_H_
#define ACCENTBN_AUGMENT_PARALLEL_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/bn_extractor.h"
#include "core/manifest.h"
#include "core/types.h"
#include "models/t2bn.h"

namespace accentbn::augment {

// Frame-aligned {hat BN_ua, BN_ac} training pair for BN2BN.
struct ParallelPair {
  std::string utt_id;
  BNMatrix bn_ua_hat;
  BNMatrix bn_ac;
  int spk_ac = 0;
  Eigen::Index frames = 0;

  // Throws kValidation when the shapes disagree.
  void Validate() const;
};

struct AugmentOptions {
  int tolerance = kDurationMismatchTolerance;
  // Restrict to one accent of a multi-accent manifest.
  std::optional<std::string> accent;
};

struct AugmentStats {
  size_t pairs = 0;
  size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Streams pairs in utt_id order to `sink`. BN_ac comes from the record's
// bn_path when present, otherwise from the extractor run on its mel.
AugmentStats ForEachParallelPair(
    const Manifest& accent_manifest, const models::T2BNModel& t2bn,
    const BNExtractor& extractor, const AugmentOptions& options,
    const std::function<void(ParallelPair&&)>& sink);

std::vector<ParallelPair> BuildParallelCorpus(
    const Manifest& accent_manifest, const models::T2BNModel& t2bn,
    const BNExtractor& extractor, const AugmentOptions& options = {},
    AugmentStats* stats = nullptr);

struct PairRecord {
  std::string utt_id;
  int spk_ac = 0;
  Eigen::Index frames = 0;
  std::string bn_ua_path;
  std::string bn_ac_path;
};

// Line-delimited JSON: a header {format, version, accent, bn_dim,
// speaker_table} followed by one PairRecord per line.
struct PairManifest {
  std::string accent;
  int bn_dim = kDefaultBnDim;
  Vocabulary speaker_table;
  std::vector<PairRecord> records;
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::string& path) const;
};

void SavePairManifest(const PairManifest& manifest,
                      const std::filesystem::path& path);
PairManifest LoadPairManifest(const std::filesystem::path& path);

// Writes feature files under `out_dir/pairs/` and `out_dir/pairs.jsonl`.
AugmentStats WriteParallelCorpus(const Manifest& accent_manifest,
                                 const models::T2BNModel& t2bn,
                                 const BNExtractor& extractor,
                                 const std::filesystem::path& out_dir,
                                 const AugmentOptions& options = {});

}  // namespace accentbn::augment

#endif  // ACCENTBN_AUGMENT_PARALLEL_H_
