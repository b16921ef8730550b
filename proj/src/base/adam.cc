// src/base/adam.cc

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

#include "cltts/base/adam.h"

#include <cmath>

#include "cltts/base/error.h"

namespace cltts {

void Adam::Step(ParameterStore &params, const ParameterStore &grads) {
  ++t_;
  double scale = 1.0;
  if (opts_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto &[name, g] : grads.tensors())
      for (double v : g.data) sq += v * v;
    double norm = std::sqrt(sq);
    if (norm > opts_.clip_norm) scale = opts_.clip_norm / norm;
  }
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
  for (const auto &[name, g] : grads.tensors()) {
    Tensor &p = params.Mutable(name);
    if (p.shape != g.shape) throw Error(ErrorCode::kShapeMismatch, "gradient shape for " + name);
    auto [mit, m_new] = first_.try_emplace(name, Tensor(g.shape));
    auto [vit, v_new] = second_.try_emplace(name, Tensor(g.shape));
    std::vector<double> &m = mit->second.data;
    std::vector<double> &v = vit->second.data;
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      double gi = g.data[i] * scale;
      m[i] = opts_.beta1 * m[i] + (1.0 - opts_.beta1) * gi;
      v[i] = opts_.beta2 * v[i] + (1.0 - opts_.beta2) * gi * gi;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p.data[i] -= opts_.learning_rate * mhat / (std::sqrt(vhat) + opts_.epsilon);
    }
  }
}

}  // namespace cltts
