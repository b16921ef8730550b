// src/synth/gru.cc

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

#include <cmath>

#include "cltts/kernels/kernels.h"
#include "internal.h"

namespace cltts::synth {

namespace {
ConstMatrixView CView(const ParameterStore &p, const std::string &name) {
  return p.Get(name).View();
}
MatrixView MView(ParameterStore &p, const std::string &name) { return p.Mutable(name).View(); }
}  // namespace

GruWeights::GruWeights(const ParameterStore &p, const std::string &prefix)
    : wz(CView(p, prefix + ".Wz")),
      uz(CView(p, prefix + ".Uz")),
      wr(CView(p, prefix + ".Wr")),
      ur(CView(p, prefix + ".Ur")),
      wn(CView(p, prefix + ".Wn")),
      un(CView(p, prefix + ".Un")),
      bz(p.Get(prefix + ".bz").Span()),
      br(p.Get(prefix + ".br").Span()),
      bn(p.Get(prefix + ".bn").Span()),
      input_dim(wz.cols),
      hidden_dim(wz.rows) {}

GruGrads::GruGrads(ParameterStore &g, const std::string &prefix)
    : wz(MView(g, prefix + ".Wz")),
      uz(MView(g, prefix + ".Uz")),
      wr(MView(g, prefix + ".Wr")),
      ur(MView(g, prefix + ".Ur")),
      wn(MView(g, prefix + ".Wn")),
      un(MView(g, prefix + ".Un")),
      bz(g.Mutable(prefix + ".bz").Span()),
      br(g.Mutable(prefix + ".br").Span()),
      bn(g.Mutable(prefix + ".bn").Span()) {}

void AddGruShapes(ShapeList &out, const std::string &prefix, std::size_t input_dim,
                  std::size_t hidden_dim) {
  for (const char *gate : {"z", "r", "n"}) {
    out.push_back({prefix + ".W" + gate, {hidden_dim, input_dim}});
    out.push_back({prefix + ".U" + gate, {hidden_dim, hidden_dim}});
    out.push_back({prefix + ".b" + gate, {hidden_dim}});
  }
}

void GruForward(const GruWeights &w, std::span<const double> x, std::span<const double> h_prev,
                GruStep &s) {
  const std::size_t H = w.hidden_dim;
  s.x.assign(x.begin(), x.end());
  s.h_prev.assign(h_prev.begin(), h_prev.end());
  s.z.assign(w.bz.begin(), w.bz.end());
  s.r.assign(w.br.begin(), w.br.end());
  s.n.assign(w.bn.begin(), w.bn.end());
  kernels::Gemv(w.wz, x, s.z);
  kernels::Gemv(w.uz, h_prev, s.z);
  kernels::Gemv(w.wr, x, s.r);
  kernels::Gemv(w.ur, h_prev, s.r);
  for (std::size_t i = 0; i < H; ++i) {
    s.z[i] = Sigmoid(s.z[i]);
    s.r[i] = Sigmoid(s.r[i]);
  }
  s.rh.resize(H);
  for (std::size_t i = 0; i < H; ++i) s.rh[i] = s.r[i] * h_prev[i];
  kernels::Gemv(w.wn, x, s.n);
  kernels::Gemv(w.un, s.rh, s.n);
  s.h.resize(H);
  for (std::size_t i = 0; i < H; ++i) {
    s.n[i] = std::tanh(s.n[i]);
    s.h[i] = (1.0 - s.z[i]) * s.n[i] + s.z[i] * h_prev[i];
  }
}

void GruBackward(const GruWeights &w, GruGrads &g, const GruStep &s, std::span<const double> dh,
                 std::span<double> dx, std::span<double> dh_prev) {
  const std::size_t H = w.hidden_dim;
  std::vector<double> dz(H), dn(H), dr(H), drh(H, 0.0);
  for (std::size_t i = 0; i < H; ++i) {
    dh_prev[i] += dh[i] * s.z[i];
    dz[i] = dh[i] * (s.h_prev[i] - s.n[i]) * s.z[i] * (1.0 - s.z[i]);
    dn[i] = dh[i] * (1.0 - s.z[i]) * (1.0 - s.n[i] * s.n[i]);
  }
  kernels::GemvT(w.un, dn, drh);
  for (std::size_t i = 0; i < H; ++i) {
    dr[i] = drh[i] * s.h_prev[i] * s.r[i] * (1.0 - s.r[i]);
    dh_prev[i] += drh[i] * s.r[i];
  }
  kernels::Ger(g.wz, 1.0, dz, s.x);
  kernels::Ger(g.uz, 1.0, dz, s.h_prev);
  kernels::Ger(g.wr, 1.0, dr, s.x);
  kernels::Ger(g.ur, 1.0, dr, s.h_prev);
  kernels::Ger(g.wn, 1.0, dn, s.x);
  kernels::Ger(g.un, 1.0, dn, s.rh);
  for (std::size_t i = 0; i < H; ++i) {
    g.bz[i] += dz[i];
    g.br[i] += dr[i];
    g.bn[i] += dn[i];
  }
  kernels::GemvT(w.wz, dz, dx);
  kernels::GemvT(w.wr, dr, dx);
  kernels::GemvT(w.wn, dn, dx);
  kernels::GemvT(w.uz, dz, dh_prev);
  kernels::GemvT(w.ur, dr, dh_prev);
}

}  // namespace cltts::synth
