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

#ifndef ACCENTBN_NN_TAPE_H_
#define ACCENTBN_NN_TAPE_H_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "core/types.h"

namespace accentbn::nn {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Owns every trainable array of a model, in creation order. The order is
// part of the checkpoint contract and of RNG-driven initialization.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  Parameter& Create(const std::string& name, Matrix init);
  Parameter& Get(const std::string& name);
  const Parameter& Get(const std::string& name) const;
  bool Contains(const std::string& name) const;

  void ZeroGrad();
  size_t NumScalars() const;
  bool AllFinite() const;

  size_t size() const { return params_.size(); }
  Parameter& operator[](size_t i) { return *params_[i]; }
  const Parameter& operator[](size_t i) const { return *params_[i]; }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, size_t> index_;
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  bool valid() const { return tape_ != nullptr; }
  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode autodiff tape over 2-D double matrices. Nodes are appended in
// evaluation order; Backward walks them in reverse.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  explicit Tape(bool training = false, uint64_t seed = 0)
      : training_(training), rng_(seed) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Matrix value);
  Var Param(Parameter& p);
  Var Record(Matrix value, bool requires_grad, BackwardFn backward);

  const Matrix& value(int id) const {
    const Node& n = nodes_[id];
    return n.ref ? *n.ref : n.value;
  }
  const Matrix& grad(int id) const { return nodes_[id].grad; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

  template <typename Derived>
  void Accumulate(int id, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  // Seeds d(root)/d(root) = 1; root must be 1 x 1. Parameter gradients are
  // added into Parameter::grad.
  void Backward(Var root);

  bool training() const { return training_; }
  std::mt19937_64& rng() { return rng_; }
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool training_;
  std::mt19937_64 rng_;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }

bool AnyRequiresGrad(std::initializer_list<Var> vars);

}  // namespace accentbn::nn

#endif  // ACCENTBN_NN_TAPE_H_
