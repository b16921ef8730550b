// src/base/tensor.cc

// Copyright 2026  The cltts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cltts/base/tensor.h"

#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>

#include "cltts/base/error.h"
#include "cltts/base/rng.h"

namespace cltts {

namespace {
std::atomic<std::uint64_t> next_store_id{1};
}

Tensor::Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
  std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  data.assign(n, 0.0);
}

Tensor Tensor::Scalar(double v) {
  Tensor t;
  t.data = {v};
  return t;
}

Tensor Tensor::FromVector(const std::vector<double> &v) {
  Tensor t({v.size()});
  t.data = v;
  return t;
}

std::size_t Tensor::cols() const {
  if (shape.empty()) return 1;
  if (shape.size() == 1) return shape[0];
  return data.size() / shape[0];
}

ParameterStore::ParameterStore() : id_(next_store_id.fetch_add(1)) {}

Tensor &ParameterStore::Add(const std::string &name, std::vector<std::size_t> shape) {
  auto [it, inserted] = tensors_.emplace(name, Tensor(std::move(shape)));
  if (!inserted) throw Error(ErrorCode::kInvalidArgument, "duplicate tensor " + name);
  ++generation_;
  return it->second;
}

bool ParameterStore::Contains(const std::string &name) const { return tensors_.count(name) != 0; }

const Tensor &ParameterStore::Get(const std::string &name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error(ErrorCode::kInvalidArgument, "no tensor named " + name);
  return it->second;
}

Tensor &ParameterStore::Mutable(const std::string &name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error(ErrorCode::kInvalidArgument, "no tensor named " + name);
  ++generation_;
  return it->second;
}

void ParameterStore::InitUniform(double lo, double hi, std::uint64_t seed) {
  Rng rng(seed);
  for (auto &[name, t] : tensors_)
    for (double &v : t.data) v = rng.Uniform(lo, hi);
  ++generation_;
}

ParameterStore ParameterStore::ZerosLike() const {
  ParameterStore out;
  for (const auto &[name, t] : tensors_) out.Add(name, t.shape);
  return out;
}

void ParameterStore::SetZero() {
  for (auto &[name, t] : tensors_) std::fill(t.data.begin(), t.data.end(), 0.0);
  ++generation_;
}

std::vector<std::string> ParameterStore::Names() const {
  std::vector<std::string> names;
  for (const auto &[name, t] : tensors_) names.push_back(name);
  return names;
}

std::size_t ParameterStore::NumParameters() const {
  std::size_t n = 0;
  for (const auto &[name, t] : tensors_) n += t.size();
  return n;
}

double MaxAbs(const ParameterStore &store) {
  double m = 0.0;
  for (const auto &[name, t] : store.tensors())
    for (double v : t.data) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace cltts
