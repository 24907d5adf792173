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

#include "nn/checkpoint.h"

#include <algorithm>
#include <fstream>

#include "core/error.h"
#include "core/feature_io.h"

namespace accentbn::nn {
namespace {

constexpr char kMagic[4] = {'A', 'B', 'N', 'C'};
constexpr uint16_t kVersion = 1;

template <typename T>
void Put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) Throw(ErrorCode::kParse, "truncated checkpoint");
  return v;
}

void PutString(std::ostream& os, const std::string& s) {
  Put<uint32_t>(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream& is) {
  const auto n = Get<uint32_t>(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) Throw(ErrorCode::kParse, "truncated checkpoint string");
  return s;
}

}  // namespace

const Matrix* CheckpointData::Find(const std::string& name) const {
  for (const auto& [n, m] : arrays) {
    if (n == name) return &m;
  }
  return nullptr;
}

const Matrix& CheckpointData::Get(const std::string& name) const {
  const Matrix* m = Find(name);
  ACCENTBN_CHECK(m != nullptr, ErrorCode::kConfigMismatch,
                 "checkpoint has no array '" + name + "'");
  return *m;
}

void CheckpointData::Put(const std::string& name, Matrix value) {
  for (auto& [n, m] : arrays) {
    if (n == name) {
      m = std::move(value);
      return;
    }
  }
  arrays.emplace_back(name, std::move(value));
}

void SaveCheckpoint(const CheckpointData& data,
                    const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) Throw(ErrorCode::kIo, "cannot write checkpoint: " + tmp.string());
    os.write(kMagic, 4);
    nn::Put<uint16_t>(os, kVersion);
    PutString(os, data.kind);
    nn::Put<int64_t>(os, data.step);
    nn::Put<uint64_t>(os, data.seed);
    PutString(os, data.config.dump());
    nn::Put<uint32_t>(os, static_cast<uint32_t>(data.arrays.size()));
    for (const auto& [name, m] : data.arrays) {
      PutString(os, name);
      WriteArray(os, m, DType::kFloat64);
    }
    if (!os) Throw(ErrorCode::kIo, "checkpoint write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    Throw(ErrorCode::kIo, "cannot move checkpoint into place: " +
                              path.string() + " (" + ec.message() + ")");
  }
}

CheckpointData LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorCode::kIo, "cannot open checkpoint: " + path.string());
  try {
    char magic[4];
    is.read(magic, 4);
    ACCENTBN_CHECK(is && std::equal(magic, magic + 4, kMagic),
                   ErrorCode::kParse, "not a checkpoint (bad magic)");
    const auto version = nn::Get<uint16_t>(is);
    ACCENTBN_CHECK(version == kVersion, ErrorCode::kParse,
                   "unsupported checkpoint version");
    CheckpointData data;
    data.kind = GetString(is);
    data.step = nn::Get<int64_t>(is);
    data.seed = nn::Get<uint64_t>(is);
    data.config = nlohmann::json::parse(GetString(is));
    const auto count = nn::Get<uint32_t>(is);
    for (uint32_t i = 0; i < count; ++i) {
      std::string name = GetString(is);
      data.arrays.emplace_back(std::move(name), ReadArray(is));
    }
    return data;
  } catch (const Error& e) {
    Throw(e.code(), std::string(e.what()) + " [" + path.string() + "]");
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kParse,
          std::string("checkpoint config: ") + e.what() + " [" + path.string() +
              "]");
  }
}

void PutParameters(CheckpointData& data, const ParameterStore& params) {
  for (size_t i = 0; i < params.size(); ++i) {
    data.Put("param/" + params[i].name, params[i].value);
  }
}

void LoadParameters(const CheckpointData& data, ParameterStore& params) {
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    const Matrix& m = data.Get("param/" + p.name);
    ACCENTBN_CHECK(m.rows() == p.value.rows() && m.cols() == p.value.cols(),
                   ErrorCode::kConfigMismatch,
                   "checkpoint shape mismatch for " + p.name);
    p.value = m;
  }
}

void PutStats(CheckpointData& data, const std::string& prefix,
              const NormStats& stats) {
  data.Put(prefix + "/mean", stats.mean);
  data.Put(prefix + "/std", stats.std);
}

NormStats GetStats(const CheckpointData& data, const std::string& prefix) {
  NormStats s;
  s.mean = data.Get(prefix + "/mean");
  s.std = data.Get(prefix + "/std");
  return s;
}

}  // namespace accentbn::nn
