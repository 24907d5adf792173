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

#ifndef ACCENTBN_PIPELINE_STAGING_H_
#define ACCENTBN_PIPELINE_STAGING_H_

#include <filesystem>

namespace accentbn::pipeline {

// Builds an output directory next to its final location and moves it into
// place on Commit(). Without a commit the staging directory is removed.
class StagedDir {
 public:
  explicit StagedDir(std::filesystem::path target);
  ~StagedDir();
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;

  const std::filesystem::path& path() const { return staging_; }
  const std::filesystem::path& target() const { return target_; }
  // Replaces any existing target.
  void Commit();
  // Moves the staging directory to `dest` instead (kept for inspection).
  void Abandon(const std::filesystem::path& dest);

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool done_ = false;
};

}  // namespace accentbn::pipeline

#endif  // ACCENTBN_PIPELINE_STAGING_H_
