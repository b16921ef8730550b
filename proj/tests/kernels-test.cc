// tests/kernels-test.cc

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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "test-util.h"

using namespace cltts;
using namespace cltts::kernels;
using cltts::testing::RandomVector;

namespace {

// Naive long-double references.
double RefDot(const std::vector<double> &a, const std::vector<double> &b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

void CheckClose(const std::vector<double> &got, const std::vector<double> &want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(std::abs(got[i] - want[i]) <= tol * (1.0 + std::abs(want[i])));
}

std::vector<const KernelTable *> Tables() {
  std::vector<const KernelTable *> t{&ScalarKernels()};
  if (IsaSupported(Isa::kAvx2)) t.push_back(Avx2Kernels());
  return t;
}

}  // namespace

TEST_CASE("every kernel table matches the naive reference") {
  Rng rng(11);
  for (const KernelTable *k : Tables()) {
    CAPTURE(k->name);
    for (std::size_t n = 0; n < 70; ++n) {
      auto a = RandomVector(rng, n), b = RandomVector(rng, n);
      CHECK(k->dot(a.data(), b.data(), n) ==
            doctest::Approx(RefDot(a, b)).epsilon(1e-12).scale(1.0));
      CHECK(k->sum_squares(a.data(), n) == doctest::Approx(RefDot(a, a)).epsilon(1e-12).scale(1.0));
      auto y = b, want = b;
      k->axpy(0.75, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) want[i] += 0.75 * a[i];
      CheckClose(y, want, 1e-15);
    }
    for (std::size_t rows : {1u, 3u, 4u, 7u, 16u}) {
      for (std::size_t cols : {1u, 2u, 5u, 8u, 13u, 33u}) {
        auto A = RandomVector(rng, rows * cols), x = RandomVector(rng, cols),
             xr = RandomVector(rng, rows), y0 = RandomVector(rng, rows),
             z0 = RandomVector(rng, cols);
        auto y = y0, wy = y0;
        k->gemv(A.data(), rows, cols, x.data(), y.data());
        for (std::size_t r = 0; r < rows; ++r) {
          long double s = y0[r];
          for (std::size_t c = 0; c < cols; ++c)
            s += static_cast<long double>(A[r * cols + c]) * x[c];
          wy[r] = static_cast<double>(s);
        }
        CheckClose(y, wy, 1e-13);
        auto z = z0, wz = z0;
        k->gemv_t(A.data(), rows, cols, xr.data(), z.data());
        for (std::size_t c = 0; c < cols; ++c) {
          long double s = z0[c];
          for (std::size_t r = 0; r < rows; ++r)
            s += static_cast<long double>(A[r * cols + c]) * xr[r];
          wz[c] = static_cast<double>(s);
        }
        CheckClose(z, wz, 1e-13);
        auto G = A, wG = A;
        k->ger(G.data(), rows, cols, -0.5, xr.data(), x.data());
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < cols; ++c) wG[r * cols + c] += -0.5 * xr[r] * x[c];
        CheckClose(G, wG, 1e-15);
      }
    }
  }
}

TEST_CASE("scalar and avx2 agree to rounding on awkward lengths") {
  if (!IsaSupported(Isa::kAvx2)) {
    MESSAGE("AVX2 not available on this machine; equivalence test skipped");
    return;
  }
  const KernelTable &s = ScalarKernels();
  const KernelTable &v = *Avx2Kernels();
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = rng.Below(200);
    auto a = RandomVector(rng, n), b = RandomVector(rng, n);
    double ds = s.dot(a.data(), b.data(), n), dv = v.dot(a.data(), b.data(), n);
    double mag = std::sqrt(RefDot(a, a) * RefDot(b, b)) + 1e-300;
    CHECK(std::abs(ds - dv) / mag < 1e-14);
    std::size_t rows = 1 + rng.Below(20), cols = 1 + rng.Below(40);
    auto A = RandomVector(rng, rows * cols), x = RandomVector(rng, cols);
    std::vector<double> ys(rows, 0.0), yv(rows, 0.0);
    s.gemv(A.data(), rows, cols, x.data(), ys.data());
    v.gemv(A.data(), rows, cols, x.data(), yv.data());
    CheckClose(yv, ys, 1e-13);
  }
}

TEST_CASE("active table honours the scalar override") {
  const char *forced = std::getenv("CLTTS_ISA");
  if (forced && std::string(forced) == "scalar") {
    CHECK(Active().isa == Isa::kScalar);
  } else if (IsaSupported(Isa::kAvx2)) {
    CHECK(Active().isa == Isa::kAvx2);
  } else {
    CHECK(Active().isa == Isa::kScalar);
  }
}
