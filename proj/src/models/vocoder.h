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

#ifndef ACCENTBN_MODELS_VOCODER_H_
#define ACCENTBN_MODELS_VOCODER_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "core/types.h"

namespace accentbn::models {

inline constexpr int kDefaultGriffinLimIterations = 60;

// Phase reconstruction from a log-mel spectrogram. Returns frames * hop
// samples; deterministic for a given seed.
std::vector<double> GriffinLim(const MelMatrix& mel, int iterations,
                               uint64_t seed, const FeatureConfig& config = {});

// Writes the mel in the float32 feature format for an external vocoder.
void ExportForVocoder(const MelMatrix& mel, const std::filesystem::path& path);

}  // namespace accentbn::models

#endif  // ACCENTBN_MODELS_VOCODER_H_
