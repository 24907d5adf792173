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

#include "core/feature_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "core/error.h"

namespace accentbn {
namespace {

static_assert(std::endian::native == std::endian::little,
              "feature I/O assumes a little-endian host");

template <typename T>
void Put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) Throw(ErrorCode::kParse, "truncated feature array");
  return v;
}

FeatureHeader ParseHeader(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kFeatureMagic, 4) != 0) {
    Throw(ErrorCode::kParse, "bad feature magic (expected ABNF)");
  }
  FeatureHeader h;
  h.version = Get<uint16_t>(is);
  h.rows = Get<uint32_t>(is);
  h.cols = Get<uint32_t>(is);
  uint16_t dtype = Get<uint16_t>(is);
  if (h.version != kFeatureVersion) {
    Throw(ErrorCode::kParse,
          "unsupported feature version " + std::to_string(h.version));
  }
  if (dtype != static_cast<uint16_t>(DType::kFloat32) &&
      dtype != static_cast<uint16_t>(DType::kFloat64)) {
    Throw(ErrorCode::kParse, "unsupported dtype code " + std::to_string(dtype));
  }
  h.dtype = static_cast<DType>(dtype);
  return h;
}

}  // namespace

void WriteArray(std::ostream& os, const Matrix& m, DType dtype) {
  os.write(kFeatureMagic, 4);
  Put<uint16_t>(os, kFeatureVersion);
  Put<uint32_t>(os, static_cast<uint32_t>(m.rows()));
  Put<uint32_t>(os, static_cast<uint32_t>(m.cols()));
  Put<uint16_t>(os, static_cast<uint16_t>(dtype));
  if (dtype == DType::kFloat32) {
    std::vector<float> buf(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      buf[i] = static_cast<float>(m.data()[i]);
    }
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(float)));
  } else {
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
}

Matrix ReadArray(std::istream& is, FeatureHeader* header) {
  FeatureHeader h = ParseHeader(is);
  Matrix m(h.rows, h.cols);
  if (h.dtype == DType::kFloat32) {
    std::vector<float> buf(m.size());
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!is) Throw(ErrorCode::kParse, "truncated feature payload");
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = buf[i];
  } else {
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!is) Throw(ErrorCode::kParse, "truncated feature payload");
  }
  if (header) *header = h;
  return m;
}

void SaveFeatures(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Throw(ErrorCode::kIo, "cannot open for writing: " + path.string());
  WriteArray(os, m, DType::kFloat32);
  if (!os) Throw(ErrorCode::kIo, "write failed: " + path.string());
}

Matrix LoadFeatures(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorCode::kIo, "cannot open: " + path.string());
  try {
    return ReadArray(is);
  } catch (const Error& e) {
    Throw(e.code(), std::string(e.what()) + " [" + path.string() + "]");
  }
}

FeatureHeader ReadFeatureHeader(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorCode::kIo, "cannot open: " + path.string());
  return ParseHeader(is);
}

void SaveMel(const MelMatrix& mel, const std::filesystem::path& path) {
  SaveFeatures(mel.values, path);
}

MelMatrix LoadMel(const std::filesystem::path& path,
                  const FeatureConfig& config) {
  return MakeMel(LoadFeatures(path), config);
}

}  // namespace accentbn
