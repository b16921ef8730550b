// include/cltts/base/adam.h

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

#include "cltts/base/tensor.h"

namespace cltts {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global-norm clip applied before the update; <= 0 disables.
  double clip_norm = 0.0;
};

class Adam {
 public:
  explicit Adam(AdamOptions opts) : opts_(opts) {}

  // Updates params in place from grads (same names and shapes).
  void Step(ParameterStore &params, const ParameterStore &grads);

  long steps() const { return t_; }

 private:
  AdamOptions opts_;
  long t_ = 0;
  TensorMap first_;
  TensorMap second_;
};

}  // namespace cltts
