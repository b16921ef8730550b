// include/cltts/base/tensor.h

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cltts {

using TensorMap = std::map<std::string, struct Tensor>;

// Row-major views used by the numeric kernels.
struct ConstMatrixView {
  const double *data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> Row(std::size_t r) const { return {data + r * cols, cols}; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct MatrixView {
  double *data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<double> Row(std::size_t r) const { return {data + r * cols, cols}; }
  double &operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  operator ConstMatrixView() const { return {data, rows, cols}; }
};

// Dense double tensor of rank 0..N. Rank-2 tensors are row-major matrices.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);

  static Tensor Scalar(double v);
  static Tensor FromVector(const std::vector<double> &v);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const { return shape.size() < 2 ? 1 : shape[0]; }
  std::size_t cols() const;

  MatrixView View() { return {data.data(), rows(), cols()}; }
  ConstMatrixView View() const { return {data.data(), rows(), cols()}; }
  std::span<double> Span() { return data; }
  std::span<const double> Span() const { return data; }

  bool operator==(const Tensor &o) const = default;
};

// Simple row-major matrix used for activations (not serialized).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> Row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> Row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  MatrixView View() { return {data_.data(), rows_, cols_}; }
  ConstMatrixView View() const { return {data_.data(), rows_, cols_}; }
  const std::vector<double> &data() const { return data_; }
  std::vector<double> &data() { return data_; }

  bool operator==(const Matrix &o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Named tensors kept in name order. Every mutable access bumps generation(),
// which lets recorded forward passes detect that parameters moved under them.
class ParameterStore {
 public:
  ParameterStore();

  Tensor &Add(const std::string &name, std::vector<std::size_t> shape);
  bool Contains(const std::string &name) const;
  const Tensor &Get(const std::string &name) const;
  Tensor &Mutable(const std::string &name);

  // Fills every tensor, in name order, with uniform(lo, hi) draws.
  void InitUniform(double lo, double hi, std::uint64_t seed);
  // Same names and shapes, all zeros.
  ParameterStore ZerosLike() const;
  void SetZero();

  std::vector<std::string> Names() const;
  std::size_t NumParameters() const;
  const std::map<std::string, Tensor> &tensors() const { return tensors_; }

  std::uint64_t id() const { return id_; }
  std::uint64_t generation() const { return generation_; }

 private:
  std::map<std::string, Tensor> tensors_;
  std::uint64_t id_;
  std::uint64_t generation_ = 0;
};

// Max-norm over all entries of all tensors.
double MaxAbs(const ParameterStore &store);

}  // namespace cltts
