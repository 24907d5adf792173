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

#ifndef ACCENTBN_TRAIN_BATCHER_H_
#define ACCENTBN_TRAIN_BATCHER_H_

#include <cstdint>
#include <vector>

#include "core/types.h"

namespace accentbn::train {

// Length-bucketed batches. Each epoch shuffles the examples with a seed
// derived from (seed, epoch), sorts them by length, cuts consecutive runs
// of batch_size and shuffles the batch order. The batch for a given step is
// a pure function of (seed, step).
class Batcher {
 public:
  Batcher(std::vector<Eigen::Index> lengths, int batch_size, uint64_t seed,
          bool single_batch = false);

  // step is 0-based.
  std::vector<size_t> Batch(int64_t step) const;
  int64_t batches_per_epoch() const { return batches_per_epoch_; }

 private:
  std::vector<std::vector<size_t>> Epoch(int64_t epoch) const;

  std::vector<Eigen::Index> lengths_;
  int batch_size_;
  uint64_t seed_;
  bool single_batch_;
  int64_t batches_per_epoch_;
  mutable int64_t cached_epoch_ = -1;
  mutable std::vector<std::vector<size_t>> cache_;
};

}  // namespace accentbn::train

#endif  // ACCENTBN_TRAIN_BATCHER_H_
