// src/dsp/fft.h

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

#include <fftw3.h>

#include <complex>
#include <cstddef>

namespace cltts::dsp {

// Real <-> half-complex transforms of one size. Forward is unnormalized;
// Inverse is the unnormalized c2r transform (callers divide by size).
// Plan creation is serialized internally; one instance must not be used from
// two threads at once.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  std::size_t size() const { return n_; }
  void Forward(const double *in, std::complex<double> *out);
  void Inverse(const std::complex<double> *in, double *out);

 private:
  std::size_t n_;
  double *real_;
  fftw_complex *spec_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

}  // namespace cltts::dsp
