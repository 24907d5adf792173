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

#include "eval/render.h"

#include <png.h>

#include <algorithm>
#include <array>
#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "core/error.h"

namespace accentbn::eval {
namespace {

// Dark blue -> teal -> yellow ramp.
std::array<unsigned char, 3> Colour(double v) {
  static constexpr double kStops[5][3] = {{0.27, 0.00, 0.33},
                                          {0.23, 0.32, 0.55},
                                          {0.13, 0.57, 0.55},
                                          {0.37, 0.79, 0.38},
                                          {0.99, 0.91, 0.14}};
  v = std::clamp(v, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(v));
  const double f = v - i;
  std::array<unsigned char, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double x = kStops[i][c] * (1 - f) + kStops[i + 1][c] * f;
    out[c] = static_cast<unsigned char>(std::lround(255.0 * x));
  }
  return out;
}

struct FileCloser {
  void operator()(FILE* f) const { std::fclose(f); }
};

}  // namespace

void RenderMelComparison(const std::vector<MelMatrix>& mels,
                         const std::vector<std::string>& labels,
                         const std::filesystem::path& path,
                         const RenderOptions& options) {
  ACCENTBN_CHECK(!mels.empty(), ErrorCode::kInvalidInput,
                 "mel comparison needs at least one mel");
  ACCENTBN_CHECK(labels.empty() || labels.size() == mels.size(),
                 ErrorCode::kInvalidInput, "one label per mel required");
  ACCENTBN_CHECK(options.scale >= 1 && options.separator >= 0,
                 ErrorCode::kInvalidInput, "invalid render options");
  const Eigen::Index bands = mels.front().values.cols();
  Eigen::Index frames = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& m : mels) {
    ACCENTBN_CHECK(m.values.cols() == bands && m.values.rows() >= 1,
                   ErrorCode::kConfigMismatch,
                   "mel comparison inputs must share the band count");
    ACCENTBN_CHECK(m.values.allFinite(), ErrorCode::kInvalidInput,
                   "mel contains non-finite values");
    frames = std::max(frames, m.values.rows());
    lo = std::min(lo, m.values.minCoeff());
    hi = std::max(hi, m.values.maxCoeff());
  }
  const double range = hi > lo ? hi - lo : 1.0;
  const int s = options.scale;
  const auto width = static_cast<png_uint_32>(frames * s);
  const int panel = static_cast<int>(bands) * s;
  const int n = static_cast<int>(mels.size());
  const auto height =
      static_cast<png_uint_32>(n * panel + (n - 1) * options.separator);

  std::vector<unsigned char> image(static_cast<size_t>(width) * height * 3, 255);
  for (int p = 0; p < n; ++p) {
    const Matrix& m = mels[p].values;
    const int top = p * (panel + options.separator);
    for (int y = 0; y < panel; ++y) {
      const Eigen::Index band = bands - 1 - y / s;
      unsigned char* row = image.data() + static_cast<size_t>(top + y) * width * 3;
      for (Eigen::Index x = 0; x < m.rows() * s; ++x) {
        const auto c = Colour((m(x / s, band) - lo) / range);
        std::copy(c.begin(), c.end(), row + x * 3);
      }
    }
  }

  std::unique_ptr<FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) Throw(ErrorCode::kIo, "cannot write image: " + path.string());
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    Throw(ErrorCode::kIo, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    Throw(ErrorCode::kIo, "PNG encoding failed: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  std::vector<std::string> keys;
  for (size_t i = 0; i < labels.size(); ++i) {
    keys.push_back("panel" + std::to_string(i));
  }
  std::vector<png_text> text(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    text[i].compression = PNG_TEXT_COMPRESSION_NONE;
    text[i].key = keys[i].data();
    text[i].text = const_cast<char*>(labels[i].c_str());
  }
  if (!text.empty()) png_set_text(png, info, text.data(), static_cast<int>(text.size()));
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_write_row(png, image.data() + static_cast<size_t>(y) * width * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) {
    Throw(ErrorCode::kIo, "write failed: " + path.string());
  }
}

}  // namespace accentbn::eval
