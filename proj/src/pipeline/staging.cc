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

#include "pipeline/staging.h"

#include <unistd.h>

#include <string>
#include <system_error>

#include "core/error.h"

namespace accentbn::pipeline {

namespace fs = std::filesystem;

StagedDir::StagedDir(fs::path target) : target_(std::move(target)) {
  ACCENTBN_CHECK(!target_.empty(), ErrorCode::kConfigMismatch,
                 "output directory not set");
  target_ = fs::absolute(target_).lexically_normal();
  if (!target_.has_filename()) target_ = target_.parent_path();
  std::error_code ec;
  fs::create_directories(target_.parent_path(), ec);
  if (ec) {
    Throw(ErrorCode::kIo, "cannot create " + target_.parent_path().string() +
                              ": " + ec.message());
  }
  const std::string base = "." + target_.filename().string() + ".staging-" +
                           std::to_string(::getpid());
  staging_ = target_.parent_path() / base;
  fs::remove_all(staging_, ec);
  fs::create_directories(staging_, ec);
  if (ec) {
    Throw(ErrorCode::kIo,
          "cannot create staging directory " + staging_.string() + ": " +
              ec.message());
  }
}

StagedDir::~StagedDir() {
  if (!done_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void StagedDir::Commit() {
  std::error_code ec;
  fs::path old;
  if (fs::exists(target_)) {
    old = staging_;
    old += ".old";
    fs::remove_all(old, ec);
    fs::rename(target_, old, ec);
    if (ec) {
      Throw(ErrorCode::kIo, "cannot replace " + target_.string() + ": " +
                                ec.message());
    }
  }
  fs::rename(staging_, target_, ec);
  if (ec) {
    if (!old.empty()) fs::rename(old, target_);
    Throw(ErrorCode::kIo,
          "cannot move output into " + target_.string() + ": " + ec.message());
  }
  if (!old.empty()) fs::remove_all(old, ec);
  done_ = true;
}

void StagedDir::Abandon(const fs::path& dest) {
  std::error_code ec;
  fs::remove_all(dest, ec);
  fs::rename(staging_, dest, ec);
  done_ = !ec;
}

}  // namespace accentbn::pipeline
