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

#include "train/fit.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.h"
#include "train/batcher.h"

namespace accentbn::train {
namespace {

std::vector<const Matrix*> Pick(const std::vector<Matrix>& all,
                                const std::vector<size_t>& batch) {
  std::vector<const Matrix*> out;
  for (size_t i : batch) out.push_back(&all[i]);
  return out;
}

class T2BNTrainable : public Trainable {
 public:
  T2BNTrainable(models::T2BNModel& model, const T2BNDataset& data)
      : model_(model), data_(data) {
    ACCENTBN_CHECK(data.phonemes == model.phonemes(), ErrorCode::kConfigMismatch,
                   "dataset phoneme table differs from the T2BN vocabulary");
  }
  nn::ParameterStore& params() override { return model_.params(); }
  std::vector<std::string> loss_parts() const override {
    return {"bn", "duration"};
  }
  std::vector<Eigen::Index> lengths() const override {
    std::vector<Eigen::Index> out;
    for (const auto& e : data_.examples) out.push_back(e.bn.rows());
    return out;
  }
  void Prepare(bool keep_model_stats) override {
    if (!keep_model_stats || model_.bn_stats().empty()) {
      std::vector<const Matrix*> all;
      for (const auto& e : data_.examples) all.push_back(&e.bn);
      model_.set_bn_stats(NormStats::Compute(all));
    }
    targets_.clear();
    for (const auto& e : data_.examples) {
      ACCENTBN_CHECK(e.bn.cols() == model_.config().bn_dim,
                     ErrorCode::kConfigMismatch,
                     e.utt_id + ": BN width does not match bn_dim");
      targets_.push_back(model_.bn_stats().Normalize(e.bn));
    }
  }
  std::vector<nn::Var> Loss(nn::Tape& t,
                            const std::vector<size_t>& batch) const override {
    models::T2BNBatch b;
    for (size_t i : batch) {
      b.phonemes.push_back(data_.examples[i].phonemes);
      b.durations.push_back(data_.examples[i].durations);
    }
    b.targets = Pick(targets_, batch);
    auto l = model_.Loss(t, b);
    return {l.total, l.bn, l.duration};
  }
  nn::CheckpointData ToCheckpoint() const override {
    return model_.ToCheckpoint();
  }

 private:
  models::T2BNModel& model_;
  const T2BNDataset& data_;
  std::vector<Matrix> targets_;
};

class BN2BNTrainable : public Trainable {
 public:
  BN2BNTrainable(models::BN2BNModel& model, const BN2BNDataset& data)
      : model_(model), data_(data) {
    for (const auto& e : data.examples) {
      ACCENTBN_CHECK(e.speaker >= 0 && e.speaker < model.speakers().size(),
                     ErrorCode::kConfigMismatch,
                     e.utt_id + ": speaker outside the BN2BN speaker table");
    }
  }
  nn::ParameterStore& params() override { return model_.params(); }
  std::vector<std::string> loss_parts() const override { return {"bn"}; }
  std::vector<Eigen::Index> lengths() const override {
    std::vector<Eigen::Index> out;
    for (const auto& e : data_.examples) out.push_back(e.bn_ua.rows());
    return out;
  }
  void Prepare(bool keep_model_stats) override {
    if (!keep_model_stats || model_.bn_stats().empty()) {
      std::vector<const Matrix*> all;
      for (const auto& e : data_.examples) {
        all.push_back(&e.bn_ua);
        all.push_back(&e.bn_ac);
      }
      model_.set_bn_stats(NormStats::Compute(all));
    }
    inputs_.clear();
    targets_.clear();
    for (const auto& e : data_.examples) {
      inputs_.push_back(model_.bn_stats().Normalize(e.bn_ua));
      targets_.push_back(model_.bn_stats().Normalize(e.bn_ac));
    }
  }
  std::vector<nn::Var> Loss(nn::Tape& t,
                            const std::vector<size_t>& batch) const override {
    models::BN2BNBatch b;
    b.inputs = Pick(inputs_, batch);
    b.targets = Pick(targets_, batch);
    for (size_t i : batch) b.speakers.push_back(data_.examples[i].speaker);
    nn::Var l = model_.Loss(t, b);
    return {l, l};
  }
  nn::CheckpointData ToCheckpoint() const override {
    return model_.ToCheckpoint();
  }

 private:
  models::BN2BNModel& model_;
  const BN2BNDataset& data_;
  std::vector<Matrix> inputs_, targets_;
};

class BN2MelTrainable : public Trainable {
 public:
  BN2MelTrainable(models::BN2MelModel& model, const BN2MelDataset& data)
      : model_(model), data_(data) {
    for (const auto& e : data.examples) {
      ACCENTBN_CHECK(e.speaker >= 0 && e.speaker < model.speakers().size(),
                     ErrorCode::kConfigMismatch,
                     e.utt_id + ": speaker outside the BN2Mel speaker table");
      ACCENTBN_CHECK(e.bn.rows() == e.mel.rows(), ErrorCode::kValidation,
                     e.utt_id + ": BN and mel frame counts differ");
    }
  }
  nn::ParameterStore& params() override { return model_.params(); }
  std::vector<std::string> loss_parts() const override {
    return {"pre_mel", "post_mel"};
  }
  std::vector<Eigen::Index> lengths() const override {
    std::vector<Eigen::Index> out;
    for (const auto& e : data_.examples) out.push_back(e.bn.rows());
    return out;
  }
  void Prepare(bool keep_model_stats) override {
    if (!keep_model_stats || model_.bn_stats().empty() ||
        model_.mel_stats().empty()) {
      std::vector<const Matrix*> bn, mel;
      for (const auto& e : data_.examples) {
        bn.push_back(&e.bn);
        mel.push_back(&e.mel);
      }
      model_.set_stats(NormStats::Compute(bn), NormStats::Compute(mel));
    }
    inputs_.clear();
    targets_.clear();
    for (const auto& e : data_.examples) {
      inputs_.push_back(model_.bn_stats().Normalize(e.bn));
      targets_.push_back(model_.mel_stats().Normalize(e.mel));
    }
  }
  std::vector<nn::Var> Loss(nn::Tape& t,
                            const std::vector<size_t>& batch) const override {
    models::BN2MelBatch b;
    b.inputs = Pick(inputs_, batch);
    b.targets = Pick(targets_, batch);
    for (size_t i : batch) b.speakers.push_back(data_.examples[i].speaker);
    auto l = model_.Loss(t, b);
    return {l.total, l.pre, l.post};
  }
  nn::CheckpointData ToCheckpoint() const override {
    return model_.ToCheckpoint();
  }

 private:
  models::BN2MelModel& model_;
  const BN2MelDataset& data_;
  std::vector<Matrix> inputs_, targets_;
};

std::string StepName(int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%07lld.ckpt",
                static_cast<long long>(step));
  return buf;
}

}  // namespace

std::unique_ptr<Trainable> MakeTrainable(models::T2BNModel& model,
                                         const T2BNDataset& data) {
  return std::make_unique<T2BNTrainable>(model, data);
}
std::unique_ptr<Trainable> MakeTrainable(models::BN2BNModel& model,
                                         const BN2BNDataset& data) {
  return std::make_unique<BN2BNTrainable>(model, data);
}
std::unique_ptr<Trainable> MakeTrainable(models::BN2MelModel& model,
                                         const BN2MelDataset& data) {
  return std::make_unique<BN2MelTrainable>(model, data);
}

void LossCurve::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) Throw(ErrorCode::kIo, "cannot write " + path.string());
  os << "step,loss";
  for (const auto& p : parts) os << ',' << p;
  os << '\n';
  char buf[64];
  for (const auto& r : rows) {
    os << r.step;
    std::snprintf(buf, sizeof(buf), ",%.17g", r.total);
    os << buf;
    for (double v : r.parts) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      os << buf;
    }
    os << '\n';
  }
  if (!os) Throw(ErrorCode::kIo, "write failed: " + path.string());
}

LossCurve LossCurve::ReadCsv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) Throw(ErrorCode::kIo, "cannot open " + path.string());
  LossCurve curve;
  std::string line;
  ACCENTBN_CHECK(static_cast<bool>(std::getline(is, line)), ErrorCode::kParse,
                 path.string() + ": empty loss file");
  {
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col++ >= 2) curve.parts.push_back(cell);
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    LossRow row;
    int col = 0;
    try {
      while (std::getline(ss, cell, ',')) {
        if (col == 0) {
          row.step = std::stoll(cell);
        } else if (col == 1) {
          row.total = std::stod(cell);
        } else {
          row.parts.push_back(std::stod(cell));
        }
        ++col;
      }
    } catch (const std::exception&) {
      Throw(ErrorCode::kParse, path.string() + ": bad row '" + line + "'");
    }
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

void PutOptimizerState(nn::CheckpointData& data,
                       const nn::ParameterStore& params, const nn::Adam& adam,
                       const TrainConfig& config) {
  data.config["train"] = config.ToJson();
  data.step = adam.steps();
  for (size_t i = 0; i < params.size(); ++i) {
    if (i < adam.first_moment().size()) {
      data.Put("adam/m/" + params[i].name, adam.first_moment()[i]);
      data.Put("adam/v/" + params[i].name, adam.second_moment()[i]);
    }
  }
}

FitResult Fit(Trainable& trainable, const TrainConfig& config,
              const FitOptions& options) {
  namespace fs = std::filesystem;
  config.Validate();
  nn::ParameterStore& params = trainable.params();
  nn::Adam adam(params, config.adam());
  int64_t start = 0;
  if (options.resume) {
    const auto& ck = *options.resume;
    start = ck.step;
    std::vector<Matrix> m, v;
    for (size_t i = 0; i < params.size(); ++i) {
      m.push_back(ck.Get("adam/m/" + params[i].name));
      v.push_back(ck.Get("adam/v/" + params[i].name));
    }
    adam.RestoreState(start, std::move(m), std::move(v));
  }
  trainable.Prepare(options.resume.has_value());

  const bool to_disk = !options.out_dir.empty();
  if (to_disk) fs::create_directories(options.out_dir / "checkpoints");

  FitResult result;
  result.curve.parts = trainable.loss_parts();
  for (const auto& r : options.previous.rows) {
    if (r.step <= start) result.curve.rows.push_back(r);
  }
  Batcher batcher(trainable.lengths(), config.batch_size, config.seed,
                  config.single_batch);

  auto snapshot = [&]() {
    nn::CheckpointData data = trainable.ToCheckpoint();
    PutOptimizerState(data, params, adam, config);
    data.seed = config.seed;
    return data;
  };
  auto fail = [&](int64_t step, const std::string& what) {
    std::string msg = what + " at step " + std::to_string(step);
    if (to_disk) {
      const fs::path diag = options.out_dir / "diagnostic.ckpt";
      nn::CheckpointData data = snapshot();
      data.config["failure"] = msg;
      nn::SaveCheckpoint(data, diag);
      result.curve.WriteCsv(options.out_dir / "loss.csv");
      msg += "; diagnostic checkpoint: " + diag.string();
    }
    Throw(ErrorCode::kNumericFailure, msg);
  };

  for (int64_t step = start + 1; step <= config.max_steps; ++step) {
    const auto batch = batcher.Batch(step - 1);
    params.ZeroGrad();
    nn::Tape tape(true, MixSeed(config.seed, static_cast<uint64_t>(step)));
    const std::vector<nn::Var> losses = trainable.Loss(tape, batch);
    LossRow row;
    row.step = step;
    row.total = losses[0].value()(0, 0);
    for (size_t i = 1; i < losses.size(); ++i) {
      row.parts.push_back(losses[i].value()(0, 0));
    }
    if (!std::isfinite(row.total)) fail(step, "non-finite loss");
    tape.Backward(losses[0]);
    if (config.clip_norm > 0) {
      const double norm = nn::ClipGradNorm(params, config.clip_norm);
      if (!std::isfinite(norm)) fail(step, "non-finite gradient");
    }
    adam.Step();
    if (!params.AllFinite()) fail(step, "non-finite parameters");
    result.curve.rows.push_back(row);
    if (options.on_step) options.on_step(row);
    if (to_disk && config.checkpoint_interval > 0 &&
        step % config.checkpoint_interval == 0 && step != config.max_steps) {
      nn::SaveCheckpoint(snapshot(), options.out_dir / "checkpoints" / StepName(step));
      result.curve.WriteCsv(options.out_dir / "loss.csv");
    }
  }
  result.checkpoint = snapshot();
  if (to_disk) {
    result.checkpoint_path = options.out_dir / "final.ckpt";
    nn::SaveCheckpoint(result.checkpoint, result.checkpoint_path);
    result.curve.WriteCsv(options.out_dir / "loss.csv");
  }
  return result;
}

}  // namespace accentbn::train
