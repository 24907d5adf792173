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

#include "accentbn/accentbn.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "core/bn_extractor.h"
#include "core/error.h"
#include "core/feature_io.h"
#include "core/interpolate.h"
#include "core/manifest.h"
#include "core/mel.h"
#include "core/wav.h"
#include "eval/metrics.h"
#include "json.hpp"
#include "models/bn2bn.h"
#include "models/bn2mel.h"
#include "models/t2bn.h"
#include "models/vocoder.h"
#include "nn/checkpoint.h"
#include "pipeline/workflows.h"

struct abn_matrix {
  accentbn::Matrix m;
};
struct abn_manifest {
  accentbn::Manifest m;
};
struct abn_t2bn {
  std::unique_ptr<accentbn::models::T2BNModel> model;
};
struct abn_bn2bn {
  std::unique_ptr<accentbn::models::BN2BNModel> model;
};
struct abn_bn2mel {
  std::unique_ptr<accentbn::models::BN2MelModel> model;
};

namespace {

using accentbn::ErrorCode;
using accentbn::Matrix;

thread_local std::string g_last_error;

abn_status ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return ABN_ERR_INVALID_INPUT;
    case ErrorCode::kConfigMismatch: return ABN_ERR_CONFIG_MISMATCH;
    case ErrorCode::kValidation: return ABN_ERR_VALIDATION;
    case ErrorCode::kParse: return ABN_ERR_PARSE;
    case ErrorCode::kVocabulary: return ABN_ERR_VOCABULARY;
    case ErrorCode::kIo: return ABN_ERR_IO;
    case ErrorCode::kCorpusEmpty: return ABN_ERR_CORPUS_EMPTY;
    case ErrorCode::kNumericFailure: return ABN_ERR_NUMERIC;
  }
  return ABN_ERR_INTERNAL;
}

template <typename F>
abn_status Guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ABN_OK;
  } catch (const accentbn::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("parse error: ") + e.what();
    return ABN_ERR_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = std::string("io error: ") + e.what();
    return ABN_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ABN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return ABN_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  ACCENTBN_CHECK(p != nullptr, ErrorCode::kInvalidInput,
                 std::string(what) + " must not be NULL");
}

abn_matrix* Wrap(Matrix m) { return new abn_matrix{std::move(m)}; }

char* CopyString(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
abn_status Workflow(const char* config_json, char** summary, F&& f) {
  return Guard([&] {
    NotNull(config_json, "config_json");
    NotNull(summary, "summary_json");
    *summary = nullptr;
    nlohmann::json config;
    try {
      config = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      accentbn::Throw(ErrorCode::kParse, std::string("config: ") + e.what());
    }
    ACCENTBN_CHECK(config.is_object(), ErrorCode::kConfigMismatch,
                   "config must be a JSON object");
    *summary = CopyString(f(config).dump());
  });
}

}  // namespace

extern "C" {

const char* abn_last_error(void) { return g_last_error.c_str(); }

const char* abn_status_name(abn_status status) {
  switch (status) {
    case ABN_OK: return "ok";
    case ABN_ERR_INVALID_INPUT: return "invalid-input";
    case ABN_ERR_CONFIG_MISMATCH: return "config-mismatch";
    case ABN_ERR_VALIDATION: return "validation";
    case ABN_ERR_PARSE: return "parse";
    case ABN_ERR_VOCABULARY: return "vocabulary";
    case ABN_ERR_IO: return "io";
    case ABN_ERR_CORPUS_EMPTY: return "corpus-empty";
    case ABN_ERR_NUMERIC: return "numeric-failure";
    case ABN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* abn_version(void) { return "0.1.0"; }

abn_status abn_matrix_create(size_t rows, size_t cols, const double* data,
                             abn_matrix** out) {
  return Guard([&] {
    NotNull(out, "out");
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows),
                            static_cast<Eigen::Index>(cols));
    if (data) std::memcpy(m.data(), data, rows * cols * sizeof(double));
    *out = Wrap(std::move(m));
  });
}

abn_status abn_matrix_load(const char* path, abn_matrix** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = Wrap(accentbn::LoadFeatures(path));
  });
}

abn_status abn_matrix_save(const abn_matrix* m, const char* path) {
  return Guard([&] {
    NotNull(m, "matrix");
    NotNull(path, "path");
    accentbn::SaveFeatures(m->m, path);
  });
}

size_t abn_matrix_rows(const abn_matrix* m) { return m ? m->m.rows() : 0; }
size_t abn_matrix_cols(const abn_matrix* m) { return m ? m->m.cols() : 0; }
const double* abn_matrix_data(const abn_matrix* m) {
  return m ? m->m.data() : nullptr;
}
void abn_matrix_free(abn_matrix* m) { delete m; }

abn_status abn_compute_mel(const double* samples, size_t n, int sample_rate,
                           abn_matrix** mel) {
  return Guard([&] {
    NotNull(mel, "mel");
    ACCENTBN_CHECK(samples != nullptr || n == 0, ErrorCode::kInvalidInput,
                   "samples must not be NULL");
    std::span<const double> wave(samples, n);
    *mel = Wrap(accentbn::ComputeMel(wave, sample_rate).values);
  });
}

abn_status abn_interpolate(const abn_matrix* in, size_t frames,
                           abn_matrix** out) {
  return Guard([&] {
    NotNull(in, "input");
    NotNull(out, "out");
    *out = Wrap(accentbn::InterpolateFrames(in->m, static_cast<Eigen::Index>(frames)));
  });
}

abn_status abn_length_regulate(const abn_matrix* hidden, const int* durations,
                               size_t n, abn_matrix** out) {
  return Guard([&] {
    NotNull(hidden, "hidden");
    NotNull(out, "out");
    ACCENTBN_CHECK(durations != nullptr || n == 0, ErrorCode::kInvalidInput,
                   "durations must not be NULL");
    accentbn::DurationSequence d{std::vector<int>(durations, durations + n)};
    *out = Wrap(accentbn::models::LengthRegulate(hidden->m, d));
  });
}

abn_status abn_extract_bn(const abn_matrix* mel, uint64_t seed, int dim,
                          abn_matrix** bn) {
  return Guard([&] {
    NotNull(mel, "mel");
    NotNull(bn, "bn");
    ACCENTBN_CHECK(dim >= 1, ErrorCode::kConfigMismatch, "dim must be >= 1");
    const accentbn::ToyBNExtractor extractor(seed, dim);
    *bn = Wrap(accentbn::ExtractBN(accentbn::MakeMel(mel->m), extractor, dim).values);
  });
}

abn_status abn_griffin_lim(const abn_matrix* mel, int iterations,
                           uint64_t seed, abn_matrix** wave) {
  return Guard([&] {
    NotNull(mel, "mel");
    NotNull(wave, "wave");
    const auto samples =
        accentbn::models::GriffinLim(accentbn::MelMatrix{mel->m}, iterations, seed);
    Matrix m(static_cast<Eigen::Index>(samples.size()), 1);
    std::copy(samples.begin(), samples.end(), m.data());
    *wave = Wrap(std::move(m));
  });
}

abn_status abn_write_wav(const char* path, const double* samples, size_t n,
                         int sample_rate) {
  return Guard([&] {
    NotNull(path, "path");
    ACCENTBN_CHECK(samples != nullptr || n == 0, ErrorCode::kInvalidInput,
                   "samples must not be NULL");
    accentbn::WriteWav(path, {std::vector<double>(samples, samples + n), sample_rate});
  });
}

abn_status abn_duration_mae(const int* pred, const int* gt, size_t n,
                            double* out) {
  return Guard([&] {
    NotNull(pred, "pred");
    NotNull(gt, "gt");
    NotNull(out, "out");
    *out = accentbn::eval::DurationMae({std::vector<int>(pred, pred + n)},
                                       {std::vector<int>(gt, gt + n)});
  });
}

abn_status abn_cosine_similarity(const double* a, const double* b, size_t n,
                                 double* out) {
  return Guard([&] {
    NotNull(a, "a");
    NotNull(b, "b");
    NotNull(out, "out");
    const auto len = static_cast<Eigen::Index>(n);
    *out = accentbn::eval::CosineSimilarity(
        Eigen::Map<const accentbn::Vector>(a, len),
        Eigen::Map<const accentbn::Vector>(b, len));
  });
}

abn_status abn_manifest_load(const char* path, abn_manifest** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new abn_manifest{accentbn::LoadManifest(path)};
  });
}

size_t abn_manifest_size(const abn_manifest* m) {
  return m ? m->m.records.size() : 0;
}

const char* abn_manifest_utt_id(const abn_manifest* m, size_t i) {
  if (!m || i >= m->m.records.size()) return nullptr;
  return m->m.records[i].utt_id.c_str();
}

void abn_manifest_free(abn_manifest* m) { delete m; }

abn_status abn_t2bn_load(const char* path, abn_t2bn** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new abn_t2bn{
        accentbn::models::T2BNModel::FromCheckpoint(accentbn::nn::LoadCheckpoint(path))};
  });
}

abn_status abn_t2bn_forward(const abn_t2bn* model, const char* const* phonemes,
                            size_t n, const int* durations, abn_matrix** bn,
                            int* durations_out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(bn, "bn");
    ACCENTBN_CHECK(phonemes != nullptr && n > 0, ErrorCode::kInvalidInput,
                   "empty phoneme sequence");
    std::vector<std::string> tokens;
    for (size_t i = 0; i < n; ++i) {
      NotNull(phonemes[i], "phoneme");
      tokens.emplace_back(phonemes[i]);
    }
    std::optional<accentbn::DurationSequence> given;
    if (durations) given = accentbn::DurationSequence{std::vector<int>(durations, durations + n)};
    auto result = model->model->Forward(tokens, given);
    if (durations_out) {
      std::copy(result.durations.frames.begin(), result.durations.frames.end(),
                durations_out);
    }
    *bn = Wrap(std::move(result.bn.values));
  });
}

void abn_t2bn_free(abn_t2bn* model) { delete model; }

abn_status abn_bn2bn_load(const char* path, abn_bn2bn** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new abn_bn2bn{
        accentbn::models::BN2BNModel::FromCheckpoint(accentbn::nn::LoadCheckpoint(path))};
  });
}

abn_status abn_bn2bn_forward(const abn_bn2bn* model, const abn_matrix* bn,
                             int speaker, abn_matrix** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(bn, "bn");
    NotNull(out, "out");
    accentbn::BNMatrix in{bn->m, accentbn::Provenance::kPredicted,
                          accentbn::AccentTag::kUnaccented};
    *out = Wrap(model->model->Forward(in, speaker).values);
  });
}

void abn_bn2bn_free(abn_bn2bn* model) { delete model; }

abn_status abn_bn2mel_load(const char* path, abn_bn2mel** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new abn_bn2mel{
        accentbn::models::BN2MelModel::FromCheckpoint(accentbn::nn::LoadCheckpoint(path))};
  });
}

abn_status abn_bn2mel_forward(const abn_bn2mel* model, const abn_matrix* bn,
                              int speaker, const abn_matrix* teacher,
                              uint64_t seed, abn_matrix** pre_mel,
                              abn_matrix** post_mel) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(bn, "bn");
    NotNull(pre_mel, "pre_mel");
    NotNull(post_mel, "post_mel");
    std::optional<accentbn::MelMatrix> t;
    if (teacher) t = accentbn::MelMatrix{teacher->m};
    auto result = model->model->Forward(
        {bn->m, accentbn::Provenance::kPredicted, accentbn::AccentTag::kAccented},
        speaker, t, seed);
    *pre_mel = Wrap(std::move(result.pre_mel.values));
    *post_mel = Wrap(std::move(result.post_mel.values));
  });
}

void abn_bn2mel_free(abn_bn2mel* model) { delete model; }

abn_status abn_prepare_data(const char* config_json, char** summary_json) {
  return Workflow(config_json, summary_json, accentbn::pipeline::PrepareData);
}
abn_status abn_train(const char* config_json, char** summary_json) {
  return Workflow(config_json, summary_json, accentbn::pipeline::Train);
}
abn_status abn_augment(const char* config_json, char** summary_json) {
  return Workflow(config_json, summary_json, accentbn::pipeline::Augment);
}
abn_status abn_synthesize(const char* config_json, char** summary_json) {
  return Workflow(config_json, summary_json, accentbn::pipeline::Synthesize);
}
abn_status abn_evaluate(const char* config_json, char** summary_json) {
  return Workflow(config_json, summary_json, accentbn::pipeline::Evaluate);
}
abn_status abn_generate_synthetic(const char* config_json,
                                  char** summary_json) {
  return Workflow(config_json, summary_json,
                  accentbn::pipeline::GenerateSynthetic);
}

void abn_string_free(char* s) { delete[] s; }

}  // extern "C"
