// include/cltts/kernels/kernels.h

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
#include <span>

#include "cltts/base/tensor.h"

namespace cltts::kernels {

// Dense double-precision inner loops used by the embedding, dsp and model
// code. Each entry has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active table is chosen once per process from CPUID;
// setting CLTTS_ISA=scalar in the environment forces the reference path.
enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char *name;
  double (*dot)(const double *a, const double *b, std::size_t n);
  double (*sum_squares)(const double *x, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double *x, double *y, std::size_t n);
  // y += A x, A is rows x cols row-major
  void (*gemv)(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y);
  // y += A^T x
  void (*gemv_t)(const double *a, std::size_t rows, std::size_t cols, const double *x, double *y);
  // A += alpha * x y^T
  void (*ger)(double *a, std::size_t rows, std::size_t cols, double alpha, const double *x,
              const double *y);
};

const KernelTable &ScalarKernels();
// nullptr when the variant was not compiled in.
const KernelTable *Avx2Kernels();
bool IsaSupported(Isa isa);
const KernelTable &Active();

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}

inline double SumSquares(std::span<const double> x) {
  return Active().sum_squares(x.data(), x.size());
}

inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void Gemv(ConstMatrixView a, std::span<const double> x, std::span<double> y) {
  Active().gemv(a.data, a.rows, a.cols, x.data(), y.data());
}

inline void GemvT(ConstMatrixView a, std::span<const double> x, std::span<double> y) {
  Active().gemv_t(a.data, a.rows, a.cols, x.data(), y.data());
}

inline void Ger(MatrixView a, double alpha, std::span<const double> x, std::span<const double> y) {
  Active().ger(a.data, a.rows, a.cols, alpha, x.data(), y.data());
}

}  // namespace cltts::kernels
