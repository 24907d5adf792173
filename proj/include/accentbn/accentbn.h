/* Copyright (c) 2026 The accentbn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ACCENTBN_ACCENTBN_H_
#define ACCENTBN_ACCENTBN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ABN_API __declspec(dllexport)
#else
#define ABN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum abn_status {
  ABN_OK = 0,
  ABN_ERR_INVALID_INPUT = 1,
  ABN_ERR_CONFIG_MISMATCH = 2,
  ABN_ERR_VALIDATION = 3,
  ABN_ERR_PARSE = 4,
  ABN_ERR_VOCABULARY = 5,
  ABN_ERR_IO = 6,
  ABN_ERR_CORPUS_EMPTY = 7,
  ABN_ERR_NUMERIC = 8,
  ABN_ERR_INTERNAL = 9
} abn_status;

/* Message of the last failure on the calling thread ("" if none). */
ABN_API const char* abn_last_error(void);
ABN_API const char* abn_status_name(abn_status status);
ABN_API const char* abn_version(void);

/* Row-major double matrix. */
typedef struct abn_matrix abn_matrix;

/* data may be NULL for a zero matrix. */
ABN_API abn_status abn_matrix_create(size_t rows, size_t cols,
                                     const double* data, abn_matrix** out);
ABN_API abn_status abn_matrix_load(const char* path, abn_matrix** out);
/* Writes the float32 feature format. */
ABN_API abn_status abn_matrix_save(const abn_matrix* m, const char* path);
ABN_API size_t abn_matrix_rows(const abn_matrix* m);
ABN_API size_t abn_matrix_cols(const abn_matrix* m);
ABN_API const double* abn_matrix_data(const abn_matrix* m);
ABN_API void abn_matrix_free(abn_matrix* m);

/* Feature pipeline. */
ABN_API abn_status abn_compute_mel(const double* samples, size_t n,
                                   int sample_rate, abn_matrix** mel);
ABN_API abn_status abn_interpolate(const abn_matrix* in, size_t frames,
                                   abn_matrix** out);
ABN_API abn_status abn_length_regulate(const abn_matrix* hidden,
                                       const int* durations, size_t n,
                                       abn_matrix** out);
/* Toy extractor, output resampled to the mel frame count. */
ABN_API abn_status abn_extract_bn(const abn_matrix* mel, uint64_t seed,
                                  int dim, abn_matrix** bn);
/* Waveform as an N x 1 matrix, N = frames * 200. */
ABN_API abn_status abn_griffin_lim(const abn_matrix* mel, int iterations,
                                   uint64_t seed, abn_matrix** wave);
ABN_API abn_status abn_write_wav(const char* path, const double* samples,
                                 size_t n, int sample_rate);

/* Metrics. */
ABN_API abn_status abn_duration_mae(const int* pred, const int* gt, size_t n,
                                    double* out);
ABN_API abn_status abn_cosine_similarity(const double* a, const double* b,
                                         size_t n, double* out);

/* Manifests. */
typedef struct abn_manifest abn_manifest;
ABN_API abn_status abn_manifest_load(const char* path, abn_manifest** out);
ABN_API size_t abn_manifest_size(const abn_manifest* m);
ABN_API const char* abn_manifest_utt_id(const abn_manifest* m, size_t i);
ABN_API void abn_manifest_free(abn_manifest* m);

/* Trained models, loaded from checkpoints. Frozen models are safe to share
 * between threads. */
typedef struct abn_t2bn abn_t2bn;
typedef struct abn_bn2bn abn_bn2bn;
typedef struct abn_bn2mel abn_bn2mel;

ABN_API abn_status abn_t2bn_load(const char* path, abn_t2bn** out);
/* durations may be NULL (predicted). durations_out, when not NULL, receives
 * n entries with the durations actually used. */
ABN_API abn_status abn_t2bn_forward(const abn_t2bn* model,
                                    const char* const* phonemes, size_t n,
                                    const int* durations, abn_matrix** bn,
                                    int* durations_out);
ABN_API void abn_t2bn_free(abn_t2bn* model);

ABN_API abn_status abn_bn2bn_load(const char* path, abn_bn2bn** out);
ABN_API abn_status abn_bn2bn_forward(const abn_bn2bn* model,
                                     const abn_matrix* bn, int speaker,
                                     abn_matrix** out);
ABN_API void abn_bn2bn_free(abn_bn2bn* model);

ABN_API abn_status abn_bn2mel_load(const char* path, abn_bn2mel** out);
/* teacher may be NULL for free-running decoding. */
ABN_API abn_status abn_bn2mel_forward(const abn_bn2mel* model,
                                      const abn_matrix* bn, int speaker,
                                      const abn_matrix* teacher, uint64_t seed,
                                      abn_matrix** pre_mel,
                                      abn_matrix** post_mel);
ABN_API void abn_bn2mel_free(abn_bn2mel* model);

/* Workflows. config_json is a JSON object; on success *summary_json holds a
 * JSON summary to be released with abn_string_free. */
ABN_API abn_status abn_prepare_data(const char* config_json,
                                    char** summary_json);
ABN_API abn_status abn_train(const char* config_json, char** summary_json);
ABN_API abn_status abn_augment(const char* config_json, char** summary_json);
ABN_API abn_status abn_synthesize(const char* config_json,
                                  char** summary_json);
ABN_API abn_status abn_evaluate(const char* config_json, char** summary_json);
ABN_API abn_status abn_generate_synthetic(const char* config_json,
                                          char** summary_json);
ABN_API void abn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* ACCENTBN_ACCENTBN_H_ */
