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

#ifndef ACCENTBN_CORE_WAV_H_
#define ACCENTBN_CORE_WAV_H_

#include <filesystem>
#include <vector>

namespace accentbn {

struct Waveform {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  int sample_rate = 0;
};

// Reads RIFF/WAVE with 16-bit PCM or 32-bit float samples. Multi-channel
// input is down-mixed by averaging.
Waveform ReadWav(const std::filesystem::path& path);

// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
void WriteWav(const std::filesystem::path& path, const Waveform& wave);

}  // namespace accentbn

#endif  // ACCENTBN_CORE_WAV_H_
