// src/kernels/kernels-avx2.cc

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

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define CLTTS_HAVE_AVX2_KERNELS 1
#endif

namespace cltts::kernels {

#ifdef CLTTS_HAVE_AVX2_KERNELS

namespace {

#define CLTTS_AVX2 __attribute__((target("avx2,fma")))

CLTTS_AVX2 inline double HorizontalSum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

CLTTS_AVX2 double DotAvx2(const double *a, const double *b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

CLTTS_AVX2 double SumSquaresAvx2(const double *x, std::size_t n) { return DotAvx2(x, x, n); }

CLTTS_AVX2 void AxpyAvx2(double alpha, const double *x, double *y, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

CLTTS_AVX2 void GemvAvx2(const double *a, std::size_t rows, std::size_t cols, const double *x,
                         double *y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += DotAvx2(a + r * cols, x, cols);
}

CLTTS_AVX2 void GemvTAvx2(const double *a, std::size_t rows, std::size_t cols, const double *x,
                          double *y) {
  for (std::size_t r = 0; r < rows; ++r) AxpyAvx2(x[r], a + r * cols, y, cols);
}

CLTTS_AVX2 void GerAvx2(double *a, std::size_t rows, std::size_t cols, double alpha,
                        const double *x, const double *y) {
  for (std::size_t r = 0; r < rows; ++r) AxpyAvx2(alpha * x[r], y, a + r * cols, cols);
}

}  // namespace

const KernelTable *Avx2Kernels() {
  static const KernelTable table{Isa::kAvx2, "avx2",   DotAvx2,   SumSquaresAvx2,
                                 AxpyAvx2,   GemvAvx2, GemvTAvx2, GerAvx2};
  return &table;
}

#else

const KernelTable *Avx2Kernels() { return nullptr; }

#endif

}  // namespace cltts::kernels
