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

#include "nn/tape.h"

#include "core/error.h"

namespace accentbn::nn {

Parameter& ParameterStore::Create(const std::string& name, Matrix init) {
  ACCENTBN_CHECK(!Contains(name), ErrorCode::kInvalidInput,
                 "duplicate parameter name: " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->grad = Matrix::Zero(init.rows(), init.cols());
  p->value = std::move(init);
  index_.emplace(name, params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterStore::Get(const std::string& name) {
  auto it = index_.find(name);
  ACCENTBN_CHECK(it != index_.end(), ErrorCode::kConfigMismatch,
                 "no parameter named " + name);
  return *params_[it->second];
}

const Parameter& ParameterStore::Get(const std::string& name) const {
  return const_cast<ParameterStore*>(this)->Get(name);
}

bool ParameterStore::Contains(const std::string& name) const {
  return index_.count(name) != 0;
}

void ParameterStore::ZeroGrad() {
  for (auto& p : params_) p->grad.setZero();
}

size_t ParameterStore::NumScalars() const {
  size_t n = 0;
  for (const auto& p : params_) n += static_cast<size_t>(p->value.size());
  return n;
}

bool ParameterStore::AllFinite() const {
  for (const auto& p : params_) {
    if (!p->value.allFinite()) return false;
  }
  return true;
}

Var Tape::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Param(Parameter& p) {
  Node n;
  n.ref = &p.value;
  n.requires_grad = true;
  n.param = &p;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(Matrix value, bool requires_grad, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::Backward(Var root) {
  ACCENTBN_CHECK(root.tape() == this, ErrorCode::kInvalidInput,
                 "backward root belongs to another tape");
  ACCENTBN_CHECK(root.rows() == 1 && root.cols() == 1,
                 ErrorCode::kInvalidInput, "backward root must be a scalar");
  if (!nodes_[root.id()].requires_grad) return;
  nodes_[root.id()].grad = Matrix::Ones(1, 1);
  for (int id = root.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) continue;
    if (n.param) {
      n.param->grad += n.grad;
    } else if (n.backward) {
      n.backward(*this, id);
    }
  }
}

bool AnyRequiresGrad(std::initializer_list<Var> vars) {
  for (const Var& v : vars) {
    if (v.valid() && v.tape()->requires_grad(v.id())) return true;
  }
  return false;
}

}  // namespace accentbn::nn
