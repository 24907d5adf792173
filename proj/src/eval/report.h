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

#ifndef ACCENTBN_EVAL_REPORT_H_
#define ACCENTBN_EVAL_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "core/manifest.h"
#include "eval/metrics.h"
#include "json.hpp"

namespace accentbn::eval {

inline constexpr double kFrameMs = 1000.0 * kHopLength / kSampleRate;

struct UtteranceRow {
  std::string utt_id;
  int phonemes = 0;
  int pred_frames = 0;
  int gt_frames = 0;
  double duration_mae = 0.0;
  double cosine = 0.0;
};

struct EvalReport {
  std::string system;
  std::string embedding;
  double duration_mae = 0.0;  // frames, pooled over phonemes
  double cosine_similarity = 0.0;
  Histogram histogram;
  std::vector<UtteranceRow> utterances;

  nlohmann::json ToJson() const;
};

struct EvalOptions {
  std::string system = "system";
  double bin_width = 1.0;
};

// Pairs system and reference records by utt_id. Durations are compared
// phoneme by phoneme; cosine similarity compares the system mel with the
// reference mel of the same utterance.
EvalReport Evaluate(const Manifest& system, const Manifest& reference,
                    const EmbeddingExtractor& extractor,
                    const EvalOptions& options = {});

// report.json, utterances.csv, histogram.csv
void WriteEvalReport(const EvalReport& report, const std::filesystem::path& dir);

// Structural check of a report document; returns the problems found.
std::vector<std::string> ValidateEvalReport(const nlohmann::json& report);

}  // namespace accentbn::eval

#endif  // ACCENTBN_EVAL_REPORT_H_
