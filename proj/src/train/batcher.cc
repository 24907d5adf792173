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

#include "train/batcher.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "core/error.h"
#include "train/config.h"

namespace accentbn::train {

Batcher::Batcher(std::vector<Eigen::Index> lengths, int batch_size,
                 uint64_t seed, bool single_batch)
    : lengths_(std::move(lengths)),
      batch_size_(batch_size),
      seed_(seed),
      single_batch_(single_batch) {
  ACCENTBN_CHECK(!lengths_.empty(), ErrorCode::kCorpusEmpty,
                 "training set is empty");
  ACCENTBN_CHECK(batch_size_ >= 1, ErrorCode::kConfigMismatch,
                 "batch_size must be >= 1");
  batches_per_epoch_ =
      (static_cast<int64_t>(lengths_.size()) + batch_size_ - 1) / batch_size_;
}

std::vector<std::vector<size_t>> Batcher::Epoch(int64_t epoch) const {
  std::vector<size_t> order(lengths_.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(MixSeed(seed_, static_cast<uint64_t>(epoch)));
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return lengths_[a] < lengths_[b];
  });
  std::vector<std::vector<size_t>> batches;
  for (size_t i = 0; i < order.size(); i += batch_size_) {
    const size_t end = std::min(order.size(), i + batch_size_);
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

std::vector<size_t> Batcher::Batch(int64_t step) const {
  if (single_batch_) {
    std::vector<size_t> first(std::min<size_t>(batch_size_, lengths_.size()));
    std::iota(first.begin(), first.end(), 0);
    return first;
  }
  const int64_t epoch = step / batches_per_epoch_;
  if (epoch != cached_epoch_) {
    cache_ = Epoch(epoch);
    cached_epoch_ = epoch;
  }
  return cache_[step % batches_per_epoch_];
}

}  // namespace accentbn::train
