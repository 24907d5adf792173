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

#include "pipeline/workflows.h"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "augment/parallel.h"
#include "augment/synthetic.h"
#include "core/bn_extractor.h"
#include "core/error.h"
#include "core/feature_io.h"
#include "core/manifest.h"
#include "core/mel.h"
#include "core/wav.h"
#include "eval/render.h"
#include "eval/report.h"
#include "models/bn2bn.h"
#include "models/bn2mel.h"
#include "models/t2bn.h"
#include "models/vocoder.h"
#include "pipeline/staging.h"
#include "train/fit.h"

namespace accentbn::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Required(const json& c, const char* key) {
  ACCENTBN_CHECK(c.contains(key) && c[key].is_string() &&
                     !c[key].get<std::string>().empty(),
                 ErrorCode::kConfigMismatch,
                 std::string("missing required setting '") + key + "'");
  return c[key].get<std::string>();
}

template <typename T>
T Get(const json& c, const char* key, T fallback) {
  if (!c.contains(key) || c[key].is_null()) return fallback;
  try {
    return c[key].get<T>();
  } catch (const json::exception&) {
    Throw(ErrorCode::kConfigMismatch,
          std::string("setting '") + key + "' has the wrong type");
  }
}

void RequireFile(const fs::path& p, const std::string& what) {
  ACCENTBN_CHECK(fs::is_regular_file(p), ErrorCode::kIo,
                 what + " not found: " + p.string());
}

void WriteJson(const json& j, const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) Throw(ErrorCode::kIo, "cannot write " + path.string());
  os << j.dump(2) << '\n';
  if (!os) Throw(ErrorCode::kIo, "write failed: " + path.string());
}

json WithSeed(json config) {
  config["seed"] = ResolveSeed(config);
  return config;
}

void SaveStats(const NormStats& s, const fs::path& path) {
  Matrix m(2, s.mean.size());
  m.row(0) = s.mean;
  m.row(1) = s.std;
  SaveFeatures(m, path);
}

}  // namespace

uint64_t ResolveSeed(const json& config) {
  if (config.contains("seed") && !config["seed"].is_null()) {
    ACCENTBN_CHECK(config["seed"].is_number_unsigned() ||
                       (config["seed"].is_number_integer() &&
                        config["seed"].get<int64_t>() >= 0),
                   ErrorCode::kConfigMismatch,
                   "seed must be a non-negative integer");
    return config["seed"].get<uint64_t>();
  }
  if (const char* env = std::getenv("ACCENTBN_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    ACCENTBN_CHECK(*end == '\0' && errno == 0 && env[0] != '-',
                   ErrorCode::kConfigMismatch,
                   std::string("ACCENTBN_SEED is not an unsigned integer: ") + env);
    return v;
  }
  return 1;
}

json PrepareData(const json& raw) {
  const json config = WithSeed(raw);
  const fs::path manifest_path = Required(config, "manifest");
  const fs::path out = Required(config, "out");
  const auto extractor_seed = Get<uint64_t>(config, "extractor_seed", 0);
  const int tolerance = Get<int>(config, "tolerance", kDurationMismatchTolerance);
  const bool keep_bn = Get<bool>(config, "keep_existing_bn", true);
  RequireFile(manifest_path, "manifest");
  {
    const auto src = fs::weakly_canonical(manifest_path).string();
    const auto dst = fs::weakly_canonical(out).string() + "/";
    ACCENTBN_CHECK(src.rfind(dst, 0) != 0, ErrorCode::kConfigMismatch,
                   "output directory would replace the input manifest");
  }

  Manifest m = LoadManifest(manifest_path);
  m.feature_config.Validate();
  const int bn_dim = m.feature_config.bn_dim;
  const MelAnalyzer analyzer(m.feature_config);
  const ToyBNExtractor extractor(extractor_seed, bn_dim);

  // Validate every record before producing anything.
  std::vector<MelMatrix> mels;
  for (const auto& r : m.records) {
    MelMatrix mel;
    if (!r.wav_path.empty()) {
      const Waveform w = ReadWav(m.Resolve(r.wav_path));
      ACCENTBN_CHECK(w.sample_rate == m.feature_config.sample_rate,
                     ErrorCode::kConfigMismatch,
                     r.utt_id + ": sample rate " + std::to_string(w.sample_rate) +
                         " Hz, expected " +
                         std::to_string(m.feature_config.sample_rate) + " Hz");
      mel = analyzer.Compute(w.samples, w.sample_rate);
    } else {
      ACCENTBN_CHECK(!r.mel_path.empty(), ErrorCode::kValidation,
                     r.utt_id + ": record has neither wav_path nor mel_path");
      mel = LoadMel(m.Resolve(r.mel_path), m.feature_config);
    }
    if (auto gap = DurationMismatch(r, mel.frames()); gap && *gap > tolerance) {
      Throw(ErrorCode::kValidation,
            r.utt_id + ": sum(durations) = " +
                std::to_string(r.durations->Total()) + " vs " +
                std::to_string(mel.frames()) + " mel frames (tolerance " +
                std::to_string(tolerance) + ")");
    }
    mels.push_back(std::move(mel));
  }

  StagedDir stage(out);
  fs::create_directories(stage.path() / "feats");
  Manifest prepared = m;
  prepared.base_dir = stage.target();
  std::vector<Matrix> bns;
  size_t frames = 0;
  for (size_t i = 0; i < m.records.size(); ++i) {
    auto& r = prepared.records[i];
    Matrix bn;
    if (keep_bn && !r.bn_path.empty()) {
      bn = LoadFeatures(m.Resolve(r.bn_path));
      ACCENTBN_CHECK(bn.cols() == bn_dim, ErrorCode::kConfigMismatch,
                     r.utt_id + ": BN width " + std::to_string(bn.cols()) +
                         ", expected " + std::to_string(bn_dim));
    } else {
      bn = ExtractBN(mels[i], extractor, bn_dim).values;
    }
    r.mel_path = "feats/" + r.utt_id + ".mel.abnf";
    r.bn_path = "feats/" + r.utt_id + ".bn.abnf";
    r.wav_path.clear();
    SaveMel(mels[i], stage.path() / r.mel_path);
    SaveFeatures(bn, stage.path() / r.bn_path);
    frames += static_cast<size_t>(mels[i].frames());
    bns.push_back(std::move(bn));
  }
  std::vector<const Matrix*> mel_ptrs, bn_ptrs;
  for (size_t i = 0; i < mels.size(); ++i) {
    mel_ptrs.push_back(&mels[i].values);
    bn_ptrs.push_back(&bns[i]);
  }
  if (!mels.empty()) {
    fs::create_directories(stage.path() / "stats");
    SaveStats(NormStats::Compute(mel_ptrs), stage.path() / "stats" / "mel.abnf");
    SaveStats(NormStats::Compute(bn_ptrs), stage.path() / "stats" / "bn.abnf");
  }
  SaveManifest(prepared, stage.path() / "manifest.jsonl");
  WriteJson(config, stage.path() / "config.json");
  stage.Commit();
  return json{{"command", "prepare-data"},
              {"records", m.records.size()},
              {"frames", frames},
              {"manifest", (stage.target() / "manifest.jsonl").string()},
              {"out", stage.target().string()}};
}

json Train(const json& raw) {
  json config = WithSeed(raw);
  const std::string kind = Required(config, "model");
  ACCENTBN_CHECK(kind == "t2bn" || kind == "bn2bn" || kind == "bn2mel",
                 ErrorCode::kConfigMismatch,
                 "unknown model '" + kind + "' (t2bn, bn2bn or bn2mel)");
  const fs::path data = Required(config, "data");
  const fs::path out = Required(config, "out");
  RequireFile(data, kind == "bn2bn" ? "pair manifest" : "manifest");
  const uint64_t seed = config["seed"].get<uint64_t>();

  std::optional<nn::CheckpointData> resume;
  if (config.contains("resume") && !config["resume"].is_null()) {
    const fs::path p = config["resume"].get<std::string>();
    RequireFile(p, "resume checkpoint");
    resume = nn::LoadCheckpoint(p);
    ACCENTBN_CHECK(resume->kind == kind, ErrorCode::kConfigMismatch,
                   "resume checkpoint holds a " + resume->kind + " model");
  }
  json train_json = resume && resume->config.contains("train")
                        ? resume->config["train"]
                        : json{{"seed", seed}};
  if (config.contains("train")) train_json.update(config["train"]);
  const train::TrainConfig tc = train::TrainConfig::FromJson(train_json);
  tc.Validate();
  json model_json = json{{"seed", seed}};
  if (config.contains("model_config")) model_json.update(config["model_config"]);

  train::FitOptions options;
  if (resume) {
    options.resume = resume;
    const fs::path dir = fs::path(config["resume"].get<std::string>()).parent_path();
    for (const fs::path& csv : {dir / "loss.csv", dir.parent_path() / "loss.csv"}) {
      if (fs::is_regular_file(csv)) {
        options.previous = train::LossCurve::ReadCsv(csv);
        break;
      }
    }
  }

  std::unique_ptr<models::T2BNModel> t2bn;
  std::unique_ptr<models::BN2BNModel> bn2bn;
  std::unique_ptr<models::BN2MelModel> bn2mel;
  std::unique_ptr<train::Trainable> trainable;
  json effective_model;
  train::T2BNDataset t2bn_data;
  train::BN2BNDataset bn2bn_data;
  train::BN2MelDataset bn2mel_data;
  if (kind == "t2bn") {
    const Manifest m = LoadManifest(data);
    auto mc = models::T2BNConfig::FromJson(model_json);
    if (!model_json.contains("bn_dim")) mc.bn_dim = m.feature_config.bn_dim;
    t2bn = resume ? models::T2BNModel::FromCheckpoint(*resume)
                  : std::make_unique<models::T2BNModel>(mc, m.phoneme_table);
    t2bn_data = train::LoadT2BNDataset(m, t2bn->config().bn_dim);
    trainable = train::MakeTrainable(*t2bn, t2bn_data);
    effective_model = t2bn->config().ToJson();
  } else if (kind == "bn2bn") {
    const auto pm = augment::LoadPairManifest(data);
    auto mc = models::BN2BNConfig::FromJson(model_json);
    if (!model_json.contains("bn_dim")) mc.bn_dim = pm.bn_dim;
    if (!model_json.contains("accent")) mc.accent = pm.accent;
    bn2bn = resume ? models::BN2BNModel::FromCheckpoint(*resume)
                   : std::make_unique<models::BN2BNModel>(mc, pm.speaker_table);
    ACCENTBN_CHECK(bn2bn->speakers() == pm.speaker_table,
                   ErrorCode::kConfigMismatch,
                   "pair manifest speaker table differs from the checkpoint");
    bn2bn_data = train::LoadBN2BNDataset(pm);
    trainable = train::MakeTrainable(*bn2bn, bn2bn_data);
    effective_model = bn2bn->config().ToJson();
  } else {
    const Manifest m = LoadManifest(data);
    auto mc = models::BN2MelConfig::FromJson(model_json);
    if (!model_json.contains("bn_dim")) mc.bn_dim = m.feature_config.bn_dim;
    bn2mel = resume ? models::BN2MelModel::FromCheckpoint(*resume)
                    : std::make_unique<models::BN2MelModel>(mc, m.speaker_table);
    bn2mel_data = train::LoadBN2MelDataset(m, bn2mel->config().bn_dim);
    trainable = train::MakeTrainable(*bn2mel, bn2mel_data);
    effective_model = bn2mel->config().ToJson();
  }

  StagedDir stage(out);
  options.out_dir = stage.path();
  config["train"] = tc.ToJson();
  config["model_config"] = effective_model;
  WriteJson(config, stage.path() / "config.json");
  train::FitResult result;
  try {
    result = train::Fit(*trainable, tc, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumericFailure) throw;
    fs::path failed = stage.target();
    failed += ".failed";
    stage.Abandon(failed);
    Throw(ErrorCode::kNumericFailure,
          std::string(e.what()) + " (run kept in " + failed.string() + ")");
  }
  stage.Commit();
  const auto& last = result.curve.rows.back();
  return json{{"command", "train"},
              {"model", kind},
              {"steps", last.step},
              {"final_loss", last.total},
              {"checkpoint", (stage.target() / "final.ckpt").string()},
              {"loss_csv", (stage.target() / "loss.csv").string()},
              {"out", stage.target().string()}};
}

json Augment(const json& raw) {
  const json config = WithSeed(raw);
  const fs::path manifest_path = Required(config, "accent_manifest");
  const fs::path ckpt = Required(config, "t2bn_ckpt");
  const fs::path out = Required(config, "out");
  RequireFile(manifest_path, "accent manifest");
  RequireFile(ckpt, "T2BN checkpoint");
  const Manifest m = LoadManifest(manifest_path);
  const auto t2bn = models::T2BNModel::FromCheckpoint(nn::LoadCheckpoint(ckpt));
  ACCENTBN_CHECK(t2bn->config().bn_dim == m.feature_config.bn_dim,
                 ErrorCode::kConfigMismatch,
                 "T2BN bn_dim differs from the manifest feature config");
  const ToyBNExtractor extractor(Get<uint64_t>(config, "extractor_seed", 0),
                                 t2bn->config().bn_dim);
  augment::AugmentOptions options;
  options.tolerance = Get<int>(config, "tolerance", kDurationMismatchTolerance);
  if (config.contains("accent") && config["accent"].is_string()) {
    options.accent = config["accent"].get<std::string>();
  }
  StagedDir stage(out);
  const auto stats =
      augment::WriteParallelCorpus(m, *t2bn, extractor, stage.path(), options);
  WriteJson(config, stage.path() / "config.json");
  stage.Commit();
  return json{{"command", "augment"},
              {"pairs", stats.pairs},
              {"skipped", stats.skipped},
              {"warnings", stats.warnings.size()},
              {"pair_manifest", (stage.target() / "pairs.jsonl").string()},
              {"out", stage.target().string()}};
}

json Synthesize(const json& raw) {
  const json config = WithSeed(raw);
  const fs::path text_path = Required(config, "text_manifest");
  const fs::path t2bn_path = Required(config, "t2bn_ckpt");
  const fs::path bn2mel_path = Required(config, "bn2mel_ckpt");
  const fs::path out = Required(config, "out");
  const uint64_t seed = config["seed"].get<uint64_t>();
  const int iterations = Get<int>(config, "griffin_lim_iterations",
                                  models::kDefaultGriffinLimIterations);
  const std::string duration_mode = Get<std::string>(config, "durations", "predicted");
  ACCENTBN_CHECK(duration_mode == "predicted" || duration_mode == "reference",
                 ErrorCode::kConfigMismatch,
                 "durations must be 'predicted' or 'reference'");
  ACCENTBN_CHECK(iterations >= 1, ErrorCode::kConfigMismatch,
                 "griffin_lim_iterations must be >= 1");
  RequireFile(text_path, "text manifest");
  RequireFile(t2bn_path, "T2BN checkpoint");
  RequireFile(bn2mel_path, "BN2Mel checkpoint");

  const Manifest text = LoadManifest(text_path);
  const auto t2bn = models::T2BNModel::FromCheckpoint(nn::LoadCheckpoint(t2bn_path));
  const auto bn2mel =
      models::BN2MelModel::FromCheckpoint(nn::LoadCheckpoint(bn2mel_path));
  std::unique_ptr<models::BN2BNModel> bn2bn;
  int spk_ac = -1;
  if (config.contains("bn2bn_ckpt") && config["bn2bn_ckpt"].is_string() &&
      !config["bn2bn_ckpt"].get<std::string>().empty()) {
    const fs::path p = config["bn2bn_ckpt"].get<std::string>();
    RequireFile(p, "BN2BN checkpoint");
    bn2bn = models::BN2BNModel::FromCheckpoint(nn::LoadCheckpoint(p));
    ACCENTBN_CHECK(config.contains("spk_ac"), ErrorCode::kConfigMismatch,
                   "spk_ac is required with a BN2BN checkpoint");
    const json& s = config["spk_ac"];
    if (s.is_string()) {
      spk_ac = bn2bn->speakers().Index(s.get<std::string>(), "accent speaker");
    } else if (s.is_number_integer()) {
      spk_ac = s.get<int>();
      ACCENTBN_CHECK(spk_ac >= 0 && spk_ac < bn2bn->speakers().size(),
                     ErrorCode::kVocabulary,
                     "accent speaker index " + std::to_string(spk_ac) +
                         " not in the BN2BN speaker table");
    } else {
      Throw(ErrorCode::kConfigMismatch, "spk_ac must be a name or an index");
    }
  }
  int mel_speaker = 0;
  if (config.contains("bn2mel_speaker")) {
    const json& s = config["bn2mel_speaker"];
    mel_speaker = s.is_string()
                      ? bn2mel->speakers().Index(s.get<std::string>(), "speaker")
                      : s.get<int>();
  }
  ACCENTBN_CHECK(mel_speaker >= 0 && mel_speaker < bn2mel->speakers().size(),
                 ErrorCode::kVocabulary, "BN2Mel speaker not in its table");
  ACCENTBN_CHECK(bn2mel->config().bn_dim == t2bn->config().bn_dim &&
                     (!bn2bn || bn2bn->config().bn_dim == t2bn->config().bn_dim),
                 ErrorCode::kConfigMismatch,
                 "checkpoints disagree on bn_dim");
  for (const auto& r : text.records) {
    for (const auto& p : r.phonemes) t2bn->phonemes().Index(p, "phoneme");
    if (duration_mode == "reference") {
      ACCENTBN_CHECK(r.durations.has_value(), ErrorCode::kValidation,
                     r.utt_id + ": reference durations requested but absent");
    }
  }

  StagedDir stage(out);
  fs::create_directories(stage.path() / "feats");
  fs::create_directories(stage.path() / "wav");
  Manifest result = text;
  result.base_dir = stage.target();
  result.feature_config.bn_dim = t2bn->config().bn_dim;
  size_t total_frames = 0;
  for (size_t i = 0; i < result.records.size(); ++i) {
    auto& r = result.records[i];
    std::optional<DurationSequence> given;
    if (duration_mode == "reference") given = r.durations;
    models::T2BNOutput t = t2bn->Forward(r.phonemes, given);
    BNMatrix bn = std::move(t.bn);
    const Eigen::Index frames = bn.values.rows();
    if (bn2bn) {
      bn = bn2bn->Forward(bn, spk_ac);
      ACCENTBN_CHECK(bn.values.rows() == frames, ErrorCode::kValidation,
                     r.utt_id + ": BN2BN changed the frame count");
    }
    const uint64_t utt_seed = train::MixSeed(seed, i);
    const auto mel = bn2mel->Forward(bn, mel_speaker, std::nullopt, utt_seed);
    ACCENTBN_CHECK(mel.post_mel.frames() == frames, ErrorCode::kValidation,
                   r.utt_id + ": BN2Mel changed the frame count");
    ACCENTBN_CHECK(mel.post_mel.values.allFinite(), ErrorCode::kNumericFailure,
                   r.utt_id + ": synthesized mel is not finite");
    Waveform wave{models::GriffinLim(mel.post_mel, iterations, utt_seed,
                                     text.feature_config),
                  text.feature_config.sample_rate};
    r.durations = t.durations;
    r.mel_path = "feats/" + r.utt_id + ".mel.abnf";
    r.bn_path = "feats/" + r.utt_id + ".bn.abnf";
    r.wav_path = "wav/" + r.utt_id + ".wav";
    models::ExportForVocoder(mel.post_mel, stage.path() / r.mel_path);
    SaveFeatures(bn.values, stage.path() / r.bn_path);
    WriteWav(stage.path() / r.wav_path, wave);
    total_frames += static_cast<size_t>(frames);
  }
  SaveManifest(result, stage.path() / "manifest.jsonl");
  WriteJson(config, stage.path() / "config.json");
  stage.Commit();
  return json{{"command", "synthesize"},
              {"utterances", result.records.size()},
              {"frames", total_frames},
              {"bn2bn", static_cast<bool>(bn2bn)},
              {"manifest", (stage.target() / "manifest.jsonl").string()},
              {"out", stage.target().string()}};
}

json Evaluate(const json& raw) {
  const json config = WithSeed(raw);
  const fs::path system_dir = Required(config, "system_dir");
  const fs::path ref_path = Required(config, "reference_manifest");
  const fs::path out = Required(config, "out");
  const fs::path system_path = system_dir / "manifest.jsonl";
  RequireFile(system_path, "system manifest");
  RequireFile(ref_path, "reference manifest");
  const Manifest system = LoadManifest(system_path);
  const Manifest reference = LoadManifest(ref_path);
  eval::EvalOptions options;
  options.system = Get<std::string>(config, "system", system_dir.filename().string());
  options.bin_width = Get<double>(config, "bin_width", 1.0);
  const int render = Get<int>(config, "render", 3);
  const eval::ToyEmbeddingExtractor extractor(reference.feature_config.n_mels);
  const eval::EvalReport report = eval::Evaluate(system, reference, extractor, options);
  const auto problems = eval::ValidateEvalReport(report.ToJson());
  ACCENTBN_CHECK(problems.empty(), ErrorCode::kValidation,
                 "report failed validation: " +
                     (problems.empty() ? std::string() : problems.front()));

  StagedDir stage(out);
  eval::WriteEvalReport(report, stage.path());
  if (render > 0) {
    fs::create_directories(stage.path() / "plots");
    for (int i = 0; i < render && i < static_cast<int>(report.utterances.size()); ++i) {
      const std::string& id = report.utterances[i].utt_id;
      const auto* s = system.Find(id);
      const auto* r = reference.Find(id);
      if (s->mel_path.empty() || r->mel_path.empty()) continue;
      eval::RenderMelComparison(
          {LoadMel(reference.Resolve(r->mel_path), reference.feature_config),
           LoadMel(system.Resolve(s->mel_path), system.feature_config)},
          {"reference " + id, options.system + " " + id},
          stage.path() / "plots" / (id + ".png"));
    }
  }
  WriteJson(config, stage.path() / "config.json");
  stage.Commit();
  return json{{"command", "evaluate"},
              {"system", report.system},
              {"utterances", report.utterances.size()},
              {"duration_mae", report.duration_mae},
              {"duration_units", "frames"},
              {"cosine_similarity", report.cosine_similarity},
              {"report", (stage.target() / "report.json").string()},
              {"out", stage.target().string()}};
}

json GenerateSynthetic(const json& raw) {
  json config = WithSeed(raw);
  const fs::path out = Required(config, "out");
  json spec_json = config.contains("spec") ? config["spec"] : json::object();
  if (!spec_json.contains("seed")) spec_json["seed"] = config["seed"];
  const auto spec = augment::SyntheticAccentSpec::FromJson(spec_json);
  const auto corpus = augment::GenerateSyntheticCorpus(spec);
  config["spec"] = spec.ToJson();
  StagedDir stage(out);
  augment::WriteSyntheticCorpus(corpus, spec, stage.path());
  WriteJson(config, stage.path() / "config.json");
  stage.Commit();
  return json{{"command", "generate-synthetic"},
              {"target_utterances", corpus.target.records.size()},
              {"accent_utterances", corpus.accent.records.size()},
              {"speakers", corpus.accent.speaker_table.size()},
              {"target_manifest", (stage.target() / "target" / "manifest.jsonl").string()},
              {"accent_manifest", (stage.target() / "accent" / "manifest.jsonl").string()},
              {"out", stage.target().string()}};
}

}  // namespace accentbn::pipeline
