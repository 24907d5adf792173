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

#include "core/manifest.h"

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "core/error.h"

namespace accentbn {

using nlohmann::json;

int DurationSequence::Total() const {
  return std::accumulate(frames.begin(), frames.end(), 0);
}

std::filesystem::path Manifest::Resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

const UtteranceRecord* Manifest::Find(const std::string& utt_id) const {
  for (const auto& r : records) {
    if (r.utt_id == utt_id) return &r;
  }
  return nullptr;
}

std::vector<int> Manifest::PhonemeIds(const UtteranceRecord& record) const {
  std::vector<int> ids;
  ids.reserve(record.phonemes.size());
  for (const auto& p : record.phonemes) {
    ids.push_back(phoneme_table.Index(p, "phoneme"));
  }
  return ids;
}

void Manifest::Validate() const {
  std::set<std::string> seen;
  for (const auto& r : records) {
    ACCENTBN_CHECK(!r.utt_id.empty(), ErrorCode::kValidation,
                   "record with empty utt_id");
    ACCENTBN_CHECK(seen.insert(r.utt_id).second, ErrorCode::kValidation,
                   "duplicate utt_id: " + r.utt_id);
    ACCENTBN_CHECK(r.speaker_id >= 0 && r.speaker_id < speaker_table.size(),
                   ErrorCode::kValidation,
                   r.utt_id + ": unresolvable speaker index");
    ACCENTBN_CHECK(r.accent_id >= 0 && r.accent_id < accent_table.size(),
                   ErrorCode::kValidation,
                   r.utt_id + ": unresolvable accent index");
    ACCENTBN_CHECK(!r.phonemes.empty(), ErrorCode::kValidation,
                   r.utt_id + ": empty phoneme sequence");
    for (const auto& p : r.phonemes) {
      ACCENTBN_CHECK(phoneme_table.Contains(p), ErrorCode::kVocabulary,
                     r.utt_id + ": phoneme '" + p + "' not in phoneme_table");
    }
    if (r.durations) {
      ACCENTBN_CHECK(r.durations->frames.size() == r.phonemes.size(),
                     ErrorCode::kValidation,
                     r.utt_id + ": " +
                         std::to_string(r.durations->frames.size()) +
                         " durations for " + std::to_string(r.phonemes.size()) +
                         " phonemes");
      for (int d : r.durations->frames) {
        ACCENTBN_CHECK(d >= 0, ErrorCode::kValidation,
                       r.utt_id + ": negative duration");
      }
      ACCENTBN_CHECK(r.durations->Total() >= 1, ErrorCode::kValidation,
                     r.utt_id + ": durations sum to zero");
    }
  }
}

std::optional<int> DurationMismatch(const UtteranceRecord& record,
                                    Eigen::Index mel_frames) {
  if (!record.durations) return std::nullopt;
  return std::abs(record.durations->Total() - static_cast<int>(mel_frames));
}

json FeatureConfigToJson(const FeatureConfig& c) {
  return json{{"sample_rate", c.sample_rate}, {"hop_length", c.hop_length},
              {"win_length", c.win_length},   {"n_fft", c.n_fft},
              {"n_mels", c.n_mels},           {"fmin", c.fmin},
              {"fmax", c.fmax},               {"log_floor", c.log_floor},
              {"bn_dim", c.bn_dim}};
}

FeatureConfig FeatureConfigFromJson(const json& j) {
  FeatureConfig c;
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.hop_length = j.value("hop_length", c.hop_length);
  c.win_length = j.value("win_length", c.win_length);
  c.n_fft = j.value("n_fft", c.n_fft);
  c.n_mels = j.value("n_mels", c.n_mels);
  c.fmin = j.value("fmin", c.fmin);
  c.fmax = j.value("fmax", c.fmax);
  c.log_floor = j.value("log_floor", c.log_floor);
  c.bn_dim = j.value("bn_dim", c.bn_dim);
  return c;
}

json VocabularyToJson(const Vocabulary& vocab) {
  json j = json::object();
  for (int i = 0; i < vocab.size(); ++i) j[vocab.Token(i)] = i;
  return j;
}

Vocabulary VocabularyFromJson(const json& j, const std::string& what) {
  if (j.is_array()) return Vocabulary(j.get<std::vector<std::string>>());
  ACCENTBN_CHECK(j.is_object(), ErrorCode::kParse,
                 what + " must be an object name -> index");
  std::vector<std::string> tokens(j.size());
  std::vector<bool> filled(j.size(), false);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const int idx = it.value().get<int>();
    ACCENTBN_CHECK(idx >= 0 && idx < static_cast<int>(tokens.size()) &&
                       !filled[idx],
                   ErrorCode::kValidation,
                   what + " indices must be a permutation of 0..n-1");
    tokens[idx] = it.key();
    filled[idx] = true;
  }
  return Vocabulary(tokens);
}

namespace {

UtteranceRecord RecordFromJson(const json& j, const Manifest& m) {
  UtteranceRecord r;
  r.utt_id = j.at("utt_id").get<std::string>();
  const std::string speaker = j.at("speaker").get<std::string>();
  const std::string accent = j.at("accent").get<std::string>();
  ACCENTBN_CHECK(m.speaker_table.Contains(speaker), ErrorCode::kValidation,
                 r.utt_id + ": unresolvable speaker '" + speaker + "'");
  ACCENTBN_CHECK(m.accent_table.Contains(accent), ErrorCode::kValidation,
                 r.utt_id + ": unresolvable accent '" + accent + "'");
  r.speaker_id = m.speaker_table.Index(speaker);
  r.accent_id = m.accent_table.Index(accent);
  r.phonemes = j.at("phonemes").get<std::vector<std::string>>();
  if (j.contains("durations") && !j.at("durations").is_null()) {
    r.durations = DurationSequence{j.at("durations").get<std::vector<int>>()};
  }
  r.mel_path = j.value("mel_path", "");
  r.bn_path = j.value("bn_path", "");
  r.wav_path = j.value("wav_path", "");
  return r;
}

json RecordToJson(const UtteranceRecord& r, const Manifest& m) {
  json j{{"utt_id", r.utt_id},
         {"speaker", m.speaker_table.Token(r.speaker_id, "speaker")},
         {"accent", m.accent_table.Token(r.accent_id, "accent")},
         {"phonemes", r.phonemes}};
  if (r.durations) j["durations"] = r.durations->frames;
  if (!r.mel_path.empty()) j["mel_path"] = r.mel_path;
  if (!r.bn_path.empty()) j["bn_path"] = r.bn_path;
  if (!r.wav_path.empty()) j["wav_path"] = r.wav_path;
  return j;
}

}  // namespace

Manifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) Throw(ErrorCode::kIo, "cannot open manifest: " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where =
        path.filename().string() + ":" + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      Throw(ErrorCode::kParse, where + "malformed JSON (" + e.what() + ")");
    }
    try {
      if (!have_header) {
        ACCENTBN_CHECK(j.contains("speaker_table") &&
                           j.contains("accent_table"),
                       ErrorCode::kParse,
                       "first line must be the manifest header");
        m.speaker_table = VocabularyFromJson(j["speaker_table"], "speaker_table");
        m.accent_table = VocabularyFromJson(j["accent_table"], "accent_table");
        if (j.contains("phoneme_table")) {
          m.phoneme_table =
              VocabularyFromJson(j["phoneme_table"], "phoneme_table");
        }
        if (j.contains("feature_config")) {
          m.feature_config = FeatureConfigFromJson(j["feature_config"]);
        }
        have_header = true;
        continue;
      }
      m.records.push_back(RecordFromJson(j, m));
    } catch (const Error& e) {
      Throw(e.code(), where + e.what());
    } catch (const json::exception& e) {
      Throw(ErrorCode::kParse, where + e.what());
    }
  }
  ACCENTBN_CHECK(have_header, ErrorCode::kParse,
                 path.string() + ": missing manifest header");
  m.Validate();
  return m;
}

void SaveManifest(const Manifest& m, const std::filesystem::path& path) {
  m.Validate();
  std::ofstream os(path, std::ios::trunc);
  if (!os) Throw(ErrorCode::kIo, "cannot write manifest: " + path.string());
  json header{{"format", "accentbn-manifest"},
              {"version", 1},
              {"speaker_table", VocabularyToJson(m.speaker_table)},
              {"accent_table", VocabularyToJson(m.accent_table)},
              {"phoneme_table", VocabularyToJson(m.phoneme_table)},
              {"feature_config", FeatureConfigToJson(m.feature_config)}};
  os << header.dump() << '\n';
  for (const auto& r : m.records) os << RecordToJson(r, m).dump() << '\n';
  if (!os) Throw(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace accentbn
