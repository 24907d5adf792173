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

#ifndef ACCENTBN_TRAIN_FIT_H_
#define ACCENTBN_TRAIN_FIT_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "models/bn2bn.h"
#include "models/bn2mel.h"
#include "models/t2bn.h"
#include "nn/checkpoint.h"
#include "train/config.h"
#include "train/datasets.h"

namespace accentbn::train {

struct LossRow {
  int64_t step = 0;
  double total = 0.0;
  std::vector<double> parts;
};

struct LossCurve {
  std::vector<std::string> parts;  // component column names
  std::vector<LossRow> rows;

  // Columns: step, loss, then one per component.
  void WriteCsv(const std::filesystem::path& path) const;
  static LossCurve ReadCsv(const std::filesystem::path& path);
};

struct FitOptions {
  // Checkpoints, loss.csv and diagnostics go here; empty keeps everything in
  // memory.
  std::filesystem::path out_dir;
  // Continue from this checkpoint; the model must already hold its weights.
  std::optional<nn::CheckpointData> resume;
  // Rows of an earlier run to keep in front of the new ones.
  LossCurve previous;
  std::function<void(const LossRow&)> on_step;
};

struct FitResult {
  nn::CheckpointData checkpoint;
  LossCurve curve;
  std::filesystem::path checkpoint_path;  // empty without out_dir
};

// Model-kind specific part of the training loop.
class Trainable {
 public:
  virtual ~Trainable() = default;
  virtual nn::ParameterStore& params() = 0;
  virtual std::vector<std::string> loss_parts() const = 0;
  virtual std::vector<Eigen::Index> lengths() const = 0;
  // Sets normalization statistics (computed from the data unless the model
  // already carries them) and caches normalized arrays.
  virtual void Prepare(bool keep_model_stats) = 0;
  // {total, parts...}
  virtual std::vector<nn::Var> Loss(nn::Tape& t,
                                    const std::vector<size_t>& batch) const = 0;
  virtual nn::CheckpointData ToCheckpoint() const = 0;
};

std::unique_ptr<Trainable> MakeTrainable(models::T2BNModel& model,
                                         const T2BNDataset& data);
std::unique_ptr<Trainable> MakeTrainable(models::BN2BNModel& model,
                                         const BN2BNDataset& data);
std::unique_ptr<Trainable> MakeTrainable(models::BN2MelModel& model,
                                         const BN2MelDataset& data);

// Adam + gradient clipping over length-bucketed batches. Throws
// kNumericFailure on a non-finite loss or parameter after writing
// out_dir/diagnostic.ckpt.
FitResult Fit(Trainable& trainable, const TrainConfig& config,
              const FitOptions& options = {});

// Adds optimizer state and the train config to a model checkpoint.
void PutOptimizerState(nn::CheckpointData& data, const nn::ParameterStore& params,
                       const nn::Adam& adam, const TrainConfig& config);

}  // namespace accentbn::train

#endif  // ACCENTBN_TRAIN_FIT_H_
