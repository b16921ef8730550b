// src/dsp/fft.cc

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

#include "fft.h"

#include <cstring>
#include <mutex>

#include "cltts/base/error.h"

namespace cltts::dsp {

namespace {
std::mutex planner_mutex;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "FFT size must be >= 2");
  std::lock_guard<std::mutex> lock(planner_mutex);
  real_ = fftw_alloc_real(n);
  spec_ = fftw_alloc_complex(n / 2 + 1);
  forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec_, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex);
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(inverse_);
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::Forward(const double *in, std::complex<double> *out) {
  std::memcpy(real_, in, n_ * sizeof(double));
  fftw_execute(forward_);
  std::memcpy(static_cast<void *>(out), spec_, (n_ / 2 + 1) * sizeof(fftw_complex));
}

void RealFft::Inverse(const std::complex<double> *in, double *out) {
  std::memcpy(spec_, in, (n_ / 2 + 1) * sizeof(fftw_complex));
  fftw_execute(inverse_);  // clobbers spec_
  std::memcpy(out, real_, n_ * sizeof(double));
}

}  // namespace cltts::dsp
