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

#include "augment/parallel.h"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "core/error.h"
#include "core/feature_io.h"
#include "core/interpolate.h"
#include "json.hpp"

namespace accentbn::augment {

using nlohmann::json;

void ParallelPair::Validate() const {
  ACCENTBN_CHECK(frames >= 1 && bn_ua_hat.values.rows() == frames &&
                     bn_ac.values.rows() == frames,
                 ErrorCode::kValidation,
                 utt_id + ": pair matrices must both have " +
                     std::to_string(frames) + " frames");
  ACCENTBN_CHECK(bn_ua_hat.values.cols() == bn_ac.values.cols(),
                 ErrorCode::kValidation, utt_id + ": pair width mismatch");
  ACCENTBN_CHECK(spk_ac >= 0, ErrorCode::kValidation,
                 utt_id + ": unresolvable accent speaker");
}

AugmentStats ForEachParallelPair(
    const Manifest& manifest, const models::T2BNModel& t2bn,
    const BNExtractor& extractor, const AugmentOptions& options,
    const std::function<void(ParallelPair&&)>& sink) {
  manifest.Validate();
  std::optional<int> accent_id;
  if (options.accent) {
    accent_id = manifest.accent_table.Index(*options.accent, "accent");
  }
  std::vector<const UtteranceRecord*> records;
  for (const auto& r : manifest.records) {
    if (!accent_id || r.accent_id == *accent_id) records.push_back(&r);
  }
  std::sort(records.begin(), records.end(),
            [](const auto* a, const auto* b) { return a->utt_id < b->utt_id; });

  AugmentStats stats;
  for (const UtteranceRecord* r : records) {
    ACCENTBN_CHECK(r->durations.has_value(), ErrorCode::kValidation,
                   r->utt_id + ": record has no forced-alignment durations");
    ACCENTBN_CHECK(!r->mel_path.empty(), ErrorCode::kValidation,
                   r->utt_id + ": record has no mel_path");
    const MelMatrix mel =
        LoadMel(manifest.Resolve(r->mel_path), manifest.feature_config);
    const Eigen::Index mel_frames = mel.frames();
    const int mismatch = *DurationMismatch(*r, mel_frames);
    if (mismatch > options.tolerance) {
      std::string msg = r->utt_id + ": sum(durations) = " +
                        std::to_string(r->durations->Total()) + " vs " +
                        std::to_string(mel_frames) +
                        " mel frames exceeds tolerance, skipped";
      std::cerr << "warning: " << msg << '\n';
      stats.warnings.push_back(std::move(msg));
      ++stats.skipped;
      continue;
    }
    if (mismatch > 0) {
      std::string msg = r->utt_id + ": trimmed " + std::to_string(mismatch) +
                        " frame(s) to align durations with mel";
      std::cerr << "warning: " << msg << '\n';
      stats.warnings.push_back(std::move(msg));
    }

    BNMatrix bn_ac;
    if (!r->bn_path.empty()) {
      Matrix values = LoadFeatures(manifest.Resolve(r->bn_path));
      ACCENTBN_CHECK(values.cols() == t2bn.config().bn_dim,
                     ErrorCode::kConfigMismatch,
                     r->utt_id + ": BN width " + std::to_string(values.cols()) +
                         " does not match the T2BN bn_dim");
      if (values.rows() != mel_frames) {
        values = InterpolateFrames(values, mel_frames);
      }
      bn_ac = BNMatrix{std::move(values), Provenance::kExtracted,
                       AccentTag::kAccented};
    } else {
      bn_ac = ExtractBN(mel, extractor, t2bn.config().bn_dim,
                        AccentTag::kAccented);
    }
    models::T2BNOutput hat = t2bn.Forward(r->phonemes, r->durations);

    const Eigen::Index frames = std::min<Eigen::Index>(
        r->durations->Total(), mel_frames);
    ParallelPair pair;
    pair.utt_id = r->utt_id;
    pair.spk_ac = r->speaker_id;
    pair.frames = frames;
    pair.bn_ua_hat = BNMatrix{hat.bn.values.topRows(frames),
                              Provenance::kPredicted, AccentTag::kUnaccented};
    pair.bn_ac = BNMatrix{bn_ac.values.topRows(frames), Provenance::kExtracted,
                          AccentTag::kAccented};
    pair.Validate();
    ++stats.pairs;
    sink(std::move(pair));
  }
  ACCENTBN_CHECK(stats.pairs > 0, ErrorCode::kCorpusEmpty,
                 "augmentation produced no parallel pairs (" +
                     std::to_string(stats.skipped) + " skipped)");
  return stats;
}

std::vector<ParallelPair> BuildParallelCorpus(
    const Manifest& manifest, const models::T2BNModel& t2bn,
    const BNExtractor& extractor, const AugmentOptions& options,
    AugmentStats* stats) {
  std::vector<ParallelPair> pairs;
  AugmentStats s = ForEachParallelPair(
      manifest, t2bn, extractor, options,
      [&](ParallelPair&& p) { pairs.push_back(std::move(p)); });
  if (stats) *stats = std::move(s);
  return pairs;
}

std::filesystem::path PairManifest::Resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

void SavePairManifest(const PairManifest& m,
                      const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) Throw(ErrorCode::kIo, "cannot write pair manifest: " + path.string());
  json header{{"format", "accentbn-pairs"},
              {"version", 1},
              {"accent", m.accent},
              {"bn_dim", m.bn_dim},
              {"speaker_table", VocabularyToJson(m.speaker_table)}};
  os << header.dump() << '\n';
  for (const auto& r : m.records) {
    os << json{{"utt_id", r.utt_id},
               {"spk_ac", r.spk_ac},
               {"frames", r.frames},
               {"bn_ua_path", r.bn_ua_path},
               {"bn_ac_path", r.bn_ac_path}}
              .dump()
       << '\n';
  }
  if (!os) Throw(ErrorCode::kIo, "write failed: " + path.string());
}

PairManifest LoadPairManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) Throw(ErrorCode::kIo, "cannot open pair manifest: " + path.string());
  PairManifest m;
  m.base_dir = path.parent_path();
  std::string line;
  int line_no = 0;
  bool have_header = false;
  auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      Throw(ErrorCode::kParse, where() + e.what());
    }
    try {
      if (!have_header) {
        ACCENTBN_CHECK(j.value("format", "") == "accentbn-pairs",
                       ErrorCode::kParse, where() + "not a pair manifest header");
        m.accent = j.value("accent", "");
        m.bn_dim = j.value("bn_dim", kDefaultBnDim);
        m.speaker_table = VocabularyFromJson(j.at("speaker_table"), "speaker_table");
        have_header = true;
        continue;
      }
      PairRecord r;
      r.utt_id = j.at("utt_id").get<std::string>();
      r.spk_ac = j.at("spk_ac").get<int>();
      r.frames = j.at("frames").get<Eigen::Index>();
      r.bn_ua_path = j.at("bn_ua_path").get<std::string>();
      r.bn_ac_path = j.at("bn_ac_path").get<std::string>();
      ACCENTBN_CHECK(r.spk_ac >= 0 && r.spk_ac < m.speaker_table.size(),
                     ErrorCode::kValidation,
                     where() + r.utt_id + ": spk_ac out of range");
      ACCENTBN_CHECK(r.frames >= 1, ErrorCode::kValidation,
                     where() + r.utt_id + ": frames must be >= 1");
      m.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      Throw(ErrorCode::kParse, where() + e.what());
    }
  }
  ACCENTBN_CHECK(have_header, ErrorCode::kParse,
                 path.string() + ": empty pair manifest");
  return m;
}

AugmentStats WriteParallelCorpus(const Manifest& manifest,
                                 const models::T2BNModel& t2bn,
                                 const BNExtractor& extractor,
                                 const std::filesystem::path& out_dir,
                                 const AugmentOptions& options) {
  std::filesystem::create_directories(out_dir / "pairs");
  PairManifest pm;
  pm.bn_dim = t2bn.config().bn_dim;
  pm.speaker_table = manifest.speaker_table;
  if (options.accent) {
    pm.accent = *options.accent;
  } else {
    std::vector<int> ids;
    for (const auto& r : manifest.records) ids.push_back(r.accent_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    ACCENTBN_CHECK(ids.size() <= 1, ErrorCode::kValidation,
                   "accent manifest mixes several accents; select one");
    if (!ids.empty()) pm.accent = manifest.accent_table.Token(ids[0], "accent");
  }
  AugmentStats stats = ForEachParallelPair(
      manifest, t2bn, extractor, options, [&](ParallelPair&& p) {
        PairRecord r{p.utt_id, p.spk_ac, p.frames,
                     "pairs/" + p.utt_id + ".bn_ua.abnf",
                     "pairs/" + p.utt_id + ".bn_ac.abnf"};
        SaveFeatures(p.bn_ua_hat.values, out_dir / r.bn_ua_path);
        SaveFeatures(p.bn_ac.values, out_dir / r.bn_ac_path);
        pm.records.push_back(std::move(r));
      });
  SavePairManifest(pm, out_dir / "pairs.jsonl");
  return stats;
}

}  // namespace accentbn::augment
