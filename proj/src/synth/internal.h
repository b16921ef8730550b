// src/synth/internal.h

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

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cltts/synth/synthesizer.h"

namespace cltts::synth {

// Weights of one GRU cell inside a parameter store ("<prefix>.Wz" etc).
struct GruWeights {
  ConstMatrixView wz, uz, wr, ur, wn, un;
  std::span<const double> bz, br, bn;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;

  GruWeights(const ParameterStore &p, const std::string &prefix);
};

struct GruGrads {
  MatrixView wz, uz, wr, ur, wn, un;
  std::span<double> bz, br, bn;

  GruGrads(ParameterStore &g, const std::string &prefix);
};

struct GruStep {
  std::vector<double> x, h_prev, z, r, n, rh, h;
};

using ShapeList = std::vector<std::pair<std::string, std::vector<std::size_t>>>;

void AddGruShapes(ShapeList &out, const std::string &prefix, std::size_t input_dim,
                  std::size_t hidden_dim);

// Name and shape of every synthesizer parameter.
ShapeList ParameterShapes(const SynthConfig &cfg);

// z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
// n = tanh(Wn x + Un (r*h) + bn), h' = (1 - z) n + z h.
void GruForward(const GruWeights &w, std::span<const double> x, std::span<const double> h_prev,
                GruStep &step);

// Accumulates parameter gradients into g, input gradient into dx and
// previous-state gradient into dh_prev.
void GruBackward(const GruWeights &w, GruGrads &g, const GruStep &step, std::span<const double> dh,
                 std::span<double> dx, std::span<double> dh_prev);

struct StepRecord {
  std::vector<double> prev_frame;
  std::vector<double> p1, p2;        // prenet activations (after tanh)
  std::vector<double> mask1, mask2;  // inverted dropout scales; empty when off
  GruStep dec;
  std::vector<double> prev_alignment;
  Matrix loc;     // T x channels location features
  Matrix hidden;  // T x attention_dim, tanh of the attention pre-activation
  std::vector<double> alignment;
  std::vector<double> summary;
  std::vector<double> out_in;  // [decoder state | summary]
};

inline double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace cltts::synth
