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

#include "core/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/error.h"

namespace accentbn {
namespace {

template <typename T>
T ReadLe(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

template <typename T>
void WriteLe(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorCode::kIo, "cannot open wav: " + path.string());
  char riff[4], wave[4];
  is.read(riff, 4);
  ReadLe<uint32_t>(is);
  is.read(wave, 4);
  if (!is || std::memcmp(riff, "RIFF", 4) != 0 ||
      std::memcmp(wave, "WAVE", 4) != 0) {
    Throw(ErrorCode::kParse, "not a RIFF/WAVE file: " + path.string());
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  while (is) {
    char id[4];
    is.read(id, 4);
    const auto size = ReadLe<uint32_t>(is);
    if (!is) break;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = ReadLe<uint16_t>(is);
      channels = ReadLe<uint16_t>(is);
      rate = ReadLe<uint32_t>(is);
      ReadLe<uint32_t>(is);
      ReadLe<uint16_t>(is);
      bits = ReadLe<uint16_t>(is);
      is.seekg(size - 16 + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt || channels == 0) {
        Throw(ErrorCode::kParse, "wav data before fmt chunk: " + path.string());
      }
      const bool pcm16 = format == 1 && bits == 16;
      const bool f32 = format == 3 && bits == 32;
      if (!pcm16 && !f32) {
        Throw(ErrorCode::kParse,
              "unsupported wav encoding (need PCM16 or float32): " +
                  path.string());
      }
      const size_t frame_bytes = channels * bits / 8;
      const size_t frames = size / frame_bytes;
      Waveform w;
      w.sample_rate = static_cast<int>(rate);
      w.samples.resize(frames);
      for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
          acc += pcm16 ? ReadLe<int16_t>(is) / 32768.0
                       : static_cast<double>(ReadLe<float>(is));
        }
        w.samples[i] = acc / channels;
      }
      if (!is) Throw(ErrorCode::kParse, "truncated wav data: " + path.string());
      return w;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
    }
  }
  Throw(ErrorCode::kParse, "wav has no data chunk: " + path.string());
}

void WriteWav(const std::filesystem::path& path, const Waveform& wave) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Throw(ErrorCode::kIo, "cannot write wav: " + path.string());
  const auto data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  os.write("RIFF", 4);
  WriteLe<uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteLe<uint32_t>(os, 16);
  WriteLe<uint16_t>(os, 1);
  WriteLe<uint16_t>(os, 1);
  WriteLe<uint32_t>(os, static_cast<uint32_t>(wave.sample_rate));
  WriteLe<uint32_t>(os, static_cast<uint32_t>(wave.sample_rate * 2));
  WriteLe<uint16_t>(os, 2);
  WriteLe<uint16_t>(os, 16);
  os.write("data", 4);
  WriteLe<uint32_t>(os, data_bytes);
  for (double s : wave.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    WriteLe<int16_t>(os, static_cast<int16_t>(std::lround(c * 32767.0)));
  }
  if (!os) Throw(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace accentbn
