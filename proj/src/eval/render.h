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

#ifndef ACCENTBN_EVAL_RENDER_H_
#define ACCENTBN_EVAL_RENDER_H_

#include <filesystem>
#include <string>
#include <vector>

#include "core/types.h"

namespace accentbn::eval {

struct RenderOptions {
  int scale = 2;      // pixels per frame and per mel band
  int separator = 4;  // rows between panels
};

// Writes an 8-bit RGB PNG with one spectrogram panel per mel, top to bottom
// in the given order, low frequencies at the bottom of each panel. Colours
// share one value range across panels. Labels are stored as tEXt chunks.
void RenderMelComparison(const std::vector<MelMatrix>& mels,
                         const std::vector<std::string>& labels,
                         const std::filesystem::path& path,
                         const RenderOptions& options = {});

}  // namespace accentbn::eval

#endif  // ACCENTBN_EVAL_RENDER_H_
