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

#include "eval/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/error.h"
#include "core/feature_io.h"
#include "core/mel.h"
#include "core/wav.h"

namespace accentbn::eval {
namespace {

using nlohmann::json;

MelMatrix LoadRecordMel(const Manifest& m, const UtteranceRecord& r) {
  if (!r.mel_path.empty()) return LoadMel(m.Resolve(r.mel_path), m.feature_config);
  ACCENTBN_CHECK(!r.wav_path.empty(), ErrorCode::kValidation,
                 r.utt_id + ": record has neither mel_path nor wav_path");
  const Waveform w = ReadWav(m.Resolve(r.wav_path));
  return ComputeMel(w.samples, w.sample_rate, m.feature_config);
}

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

json EvalReport::ToJson() const {
  json rows = json::array();
  for (const auto& u : utterances) {
    rows.push_back({{"utt_id", u.utt_id},
                    {"phonemes", u.phonemes},
                    {"pred_frames", u.pred_frames},
                    {"gt_frames", u.gt_frames},
                    {"duration_mae", u.duration_mae},
                    {"cosine", u.cosine}});
  }
  return json{{"format", "accentbn-eval-report"},
              {"version", 1},
              {"system", system},
              {"embedding", embedding},
              {"duration_mae", duration_mae},
              {"duration_units", "frames"},
              {"frame_ms", kFrameMs},
              {"duration_mae_pooling", "phoneme"},
              {"cosine_similarity", cosine_similarity},
              {"histogram",
               {{"bin_width", histogram.bin_width},
                {"edges", histogram.edges},
                {"centers", histogram.centers},
                {"counts", histogram.counts},
                {"densities", histogram.densities}}},
              {"utterances", rows}};
}

EvalReport Evaluate(const Manifest& system, const Manifest& reference,
                    const EmbeddingExtractor& extractor,
                    const EvalOptions& options) {
  std::vector<const UtteranceRecord*> records;
  for (const auto& r : system.records) records.push_back(&r);
  ACCENTBN_CHECK(!records.empty(), ErrorCode::kCorpusEmpty,
                 "system manifest has no records");
  std::sort(records.begin(), records.end(),
            [](const auto* a, const auto* b) { return a->utt_id < b->utt_id; });

  EvalReport report;
  report.system = options.system;
  report.embedding = extractor.id();
  std::vector<DurationSequence> pred, gt;
  std::vector<int> pooled_pred, pooled_gt;
  double cosine_sum = 0.0;
  for (const UtteranceRecord* s : records) {
    const UtteranceRecord* ref = reference.Find(s->utt_id);
    ACCENTBN_CHECK(ref != nullptr, ErrorCode::kValidation,
                   s->utt_id + ": not in the reference manifest");
    ACCENTBN_CHECK(s->durations && ref->durations, ErrorCode::kValidation,
                   s->utt_id + ": durations missing on one side");
    UtteranceRow row;
    row.utt_id = s->utt_id;
    row.phonemes = static_cast<int>(ref->durations->frames.size());
    row.pred_frames = s->durations->Total();
    row.gt_frames = ref->durations->Total();
    row.duration_mae = DurationMae(*s->durations, *ref->durations);
    row.cosine = CosineSimilarity(extractor.Extract(LoadRecordMel(system, *s)),
                                  extractor.Extract(LoadRecordMel(reference, *ref)));
    cosine_sum += row.cosine;
    pred.push_back(*s->durations);
    gt.push_back(*ref->durations);
    pooled_pred.insert(pooled_pred.end(), s->durations->frames.begin(),
                       s->durations->frames.end());
    pooled_gt.insert(pooled_gt.end(), ref->durations->frames.begin(),
                     ref->durations->frames.end());
    report.utterances.push_back(std::move(row));
  }
  report.duration_mae = PooledDurationMae(pred, gt);
  report.cosine_similarity = cosine_sum / static_cast<double>(records.size());
  report.histogram = DeviationHistogram(pooled_pred, pooled_gt, options.bin_width);
  return report;
}

void WriteEvalReport(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name, std::ios::trunc);
    if (!os) Throw(ErrorCode::kIo, "cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("report.json");
    os << report.ToJson().dump(2) << '\n';
  }
  {
    auto os = open("utterances.csv");
    os << "utt_id,phonemes,pred_frames,gt_frames,duration_mae,cosine\n";
    for (const auto& u : report.utterances) {
      os << u.utt_id << ',' << u.phonemes << ',' << u.pred_frames << ','
         << u.gt_frames << ',' << Fmt(u.duration_mae) << ',' << Fmt(u.cosine)
         << '\n';
    }
  }
  {
    auto os = open("histogram.csv");
    os << "bin_center,density\n";
    for (size_t i = 0; i < report.histogram.centers.size(); ++i) {
      os << Fmt(report.histogram.centers[i]) << ','
         << Fmt(report.histogram.densities[i]) << '\n';
    }
  }
}

std::vector<std::string> ValidateEvalReport(const json& j) {
  std::vector<std::string> problems;
  auto need = [&](const char* key, json::value_t type) -> bool {
    if (!j.contains(key)) {
      problems.push_back(std::string("missing field '") + key + "'");
      return false;
    }
    const auto t = j.at(key).type();
    const bool numeric = type == json::value_t::number_float &&
                         (t == json::value_t::number_integer ||
                          t == json::value_t::number_unsigned);
    const bool integer = type == json::value_t::number_integer &&
                         t == json::value_t::number_unsigned;
    if (t != type && !numeric && !integer) {
      problems.push_back(std::string("field '") + key + "' has the wrong type");
      return false;
    }
    return true;
  };
  if (!j.is_object()) return {"report is not a JSON object"};
  if (need("format", json::value_t::string) &&
      j["format"] != "accentbn-eval-report") {
    problems.push_back("unexpected format tag");
  }
  need("system", json::value_t::string);
  if (need("duration_units", json::value_t::string) &&
      j["duration_units"] != "frames") {
    problems.push_back("duration_units must be \"frames\"");
  }
  if (need("duration_mae", json::value_t::number_float) &&
      !(j["duration_mae"].get<double>() >= 0)) {
    problems.push_back("duration_mae must be >= 0");
  }
  if (need("cosine_similarity", json::value_t::number_float)) {
    const double c = j["cosine_similarity"].get<double>();
    if (!(c >= -1.0 && c <= 1.0)) problems.push_back("cosine_similarity outside [-1, 1]");
  }
  if (need("histogram", json::value_t::object)) {
    const json& h = j["histogram"];
    if (!h.contains("densities") || !h["densities"].is_array() ||
        !h.contains("centers") || !h["centers"].is_array() ||
        !h.contains("edges") || !h["edges"].is_array()) {
      problems.push_back("histogram needs edges, centers and densities arrays");
    } else {
      double sum = 0.0;
      for (const auto& d : h["densities"]) {
        if (!d.is_number() || d.get<double>() < 0) {
          problems.push_back("histogram density is not a non-negative number");
          break;
        }
        sum += d.get<double>();
      }
      if (std::abs(sum - 1.0) > 1e-9) problems.push_back("histogram densities do not sum to 1");
      if (h["centers"].size() != h["densities"].size() ||
          h["edges"].size() != h["centers"].size() + 1) {
        problems.push_back("histogram array sizes are inconsistent");
      }
    }
  }
  if (need("utterances", json::value_t::array)) {
    for (const auto& u : j["utterances"]) {
      if (!u.is_object() || !u.contains("utt_id") || !u.contains("duration_mae") ||
          !u.contains("cosine")) {
        problems.push_back("utterance row lacks utt_id, duration_mae or cosine");
        break;
      }
    }
  }
  return problems;
}

}  // namespace accentbn::eval
