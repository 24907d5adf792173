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

#ifndef ACCENTBN_CORE_FEATURE_IO_H_
#define ACCENTBN_CORE_FEATURE_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "core/types.h"

namespace accentbn {

// On-disk array layout, little-endian:
//   char[4] magic "ABNF" | u16 version | u32 rows | u32 cols | u16 dtype
// followed by rows*cols row-major values.
inline constexpr char kFeatureMagic[4] = {'A', 'B', 'N', 'F'};
inline constexpr uint16_t kFeatureVersion = 1;
inline constexpr size_t kFeatureHeaderBytes = 16;

enum class DType : uint16_t { kFloat32 = 1, kFloat64 = 2 };

struct FeatureHeader {
  uint16_t version = kFeatureVersion;
  uint32_t rows = 0;
  uint32_t cols = 0;
  DType dtype = DType::kFloat32;
};

void WriteArray(std::ostream& os, const Matrix& m, DType dtype);
Matrix ReadArray(std::istream& is, FeatureHeader* header = nullptr);

// Feature files always use float32.
void SaveFeatures(const Matrix& m, const std::filesystem::path& path);
Matrix LoadFeatures(const std::filesystem::path& path);
FeatureHeader ReadFeatureHeader(const std::filesystem::path& path);

void SaveMel(const MelMatrix& mel, const std::filesystem::path& path);
MelMatrix LoadMel(const std::filesystem::path& path,
                  const FeatureConfig& config = {});

}  // namespace accentbn

#endif  // ACCENTBN_CORE_FEATURE_IO_H_
