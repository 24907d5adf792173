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

#ifndef ACCENTBN_PIPELINE_WORKFLOWS_H_
#define ACCENTBN_PIPELINE_WORKFLOWS_H_

#include <cstdint>

#include "json.hpp"

namespace accentbn::pipeline {

// Each workflow validates its JSON config, builds its output in a staging
// directory, moves it into place and returns a JSON summary. The effective
// config is written to <out>/config.json.

// {manifest, out, extractor_seed?, tolerance?, keep_existing_bn?}
nlohmann::json PrepareData(const nlohmann::json& config);
// {model: t2bn|bn2bn|bn2mel, data, out, seed?, model_config?, train?, resume?}
nlohmann::json Train(const nlohmann::json& config);
// {accent_manifest, t2bn_ckpt, out, accent?, extractor_seed?, tolerance?}
nlohmann::json Augment(const nlohmann::json& config);
// {text_manifest, t2bn_ckpt, bn2bn_ckpt?, bn2mel_ckpt, spk_ac?, out, seed?,
//  griffin_lim_iterations?, durations?: predicted|reference, bn2mel_speaker?}
nlohmann::json Synthesize(const nlohmann::json& config);
// {system_dir, reference_manifest, out, system?, bin_width?, render?}
nlohmann::json Evaluate(const nlohmann::json& config);
// {out, seed?, spec?}
nlohmann::json GenerateSynthetic(const nlohmann::json& config);

// config["seed"], else $ACCENTBN_SEED, else 1.
uint64_t ResolveSeed(const nlohmann::json& config);

}  // namespace accentbn::pipeline

#endif  // ACCENTBN_PIPELINE_WORKFLOWS_H_
