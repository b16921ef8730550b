// src/kernels/kernels-scalar.cc

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

#include "cltts/kernels/kernels.h"

namespace cltts::kernels {

namespace {

double DotRef(const double *a, const double *b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double SumSquaresRef(const double *x, std::size_t n) { return DotRef(x, x, n); }

void AxpyRef(double alpha, const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void GemvRef(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += DotRef(a + r * cols, x, cols);
}

void GemvTRef(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y) {
  for (std::size_t r = 0; r < rows; ++r) AxpyRef(x[r], a + r * cols, y, cols);
}

void GerRef(double *a, std::size_t rows, std::size_t cols, double alpha, const double *x,
            const double *y) {
  for (std::size_t r = 0; r < rows; ++r) AxpyRef(alpha * x[r], y, a + r * cols, cols);
}

}  // namespace

const KernelTable &ScalarKernels() {
  static const KernelTable table{Isa::kScalar, "scalar", DotRef,   SumSquaresRef,
                                 AxpyRef,      GemvRef,  GemvTRef, GerRef};
  return table;
}

}  // namespace cltts::kernels
