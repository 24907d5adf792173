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

#ifndef ACCENTBN_CORE_MANIFEST_H_
#define ACCENTBN_CORE_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/types.h"
#include "core/vocabulary.h"

namespace accentbn {

struct DurationSequence {
  std::vector<int> frames;

  int Total() const;
  bool operator==(const DurationSequence&) const = default;
};

struct UtteranceRecord {
  std::string utt_id;
  int speaker_id = 0;
  int accent_id = 0;
  std::vector<std::string> phonemes;
  std::optional<DurationSequence> durations;
  std::string mel_path;  // empty when absent; relative to the manifest dir
  std::string bn_path;
  std::string wav_path;

  bool operator==(const UtteranceRecord&) const = default;
};

struct Manifest {
  std::vector<UtteranceRecord> records;
  Vocabulary speaker_table;
  Vocabulary accent_table;
  Vocabulary phoneme_table;
  FeatureConfig feature_config;
  // Directory relative artifact paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::string& path) const;
  const UtteranceRecord* Find(const std::string& utt_id) const;
  std::vector<int> PhonemeIds(const UtteranceRecord& record) const;

  // Structural checks only: unique ids, resolvable tables, duration lengths.
  void Validate() const;

  bool operator==(const Manifest& o) const {
    return records == o.records && speaker_table == o.speaker_table &&
           accent_table == o.accent_table &&
           phoneme_table == o.phoneme_table &&
           feature_config == o.feature_config;
  }
};

// |sum(D) - mel frames|, or nullopt when durations are absent.
std::optional<int> DurationMismatch(const UtteranceRecord& record,
                                    Eigen::Index mel_frames);

Manifest LoadManifest(const std::filesystem::path& path);
void SaveManifest(const Manifest& manifest, const std::filesystem::path& path);

nlohmann::json FeatureConfigToJson(const FeatureConfig& config);
FeatureConfig FeatureConfigFromJson(const nlohmann::json& j);
nlohmann::json VocabularyToJson(const Vocabulary& vocab);
Vocabulary VocabularyFromJson(const nlohmann::json& j, const std::string& what);

}  // namespace accentbn

#endif  // ACCENTBN_CORE_MANIFEST_H_
