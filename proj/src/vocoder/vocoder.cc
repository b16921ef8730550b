// src/vocoder/vocoder.cc

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

#include "cltts/vocoder/vocoder.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cltts/base/checkpoint.h"
#include "cltts/base/error.h"
#include "cltts/base/rng.h"
#include "cltts/kernels/kernels.h"

namespace cltts::vocoder {

struct LayerRecord {
  Matrix h_in;  // N x residual
  Matrix tf;    // tanh(filter)
  Matrix sg;    // sigmoid(gate)
  Matrix z;
};

VocoderTape::VocoderTape() = default;
VocoderTape::~VocoderTape() = default;
VocoderTape::VocoderTape(VocoderTape &&) noexcept = default;
VocoderTape &VocoderTape::operator=(VocoderTape &&) noexcept = default;

void VocoderConfig::Validate() const {
  auto need = [](bool ok, const char *what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("vocoder config: ") + what);
  };
  need(n_layers > 0, "n_layers must be positive");
  need(kernel_size > 0, "kernel_size must be positive");
  need(!dilation_cycle.empty(), "dilation_cycle is empty");
  need(n_layers % dilation_cycle.size() == 0, "n_layers must be a whole number of dilation cycles");
  for (std::size_t d : dilation_cycle) need(d > 0, "dilations must be positive");
  need(residual_channels > 0 && skip_channels > 0, "channel counts must be positive");
  need(n_classes == 256, "n_classes must be 256 (8-bit mu-law)");
  need(n_mels > 0, "n_mels must be positive");
  need(hop_length > 0, "hop_length must be positive");
  need(init_scale > 0.0, "init_scale must be positive");
}

VocoderConfig VocoderConfig::FromConfig(const Config &c) {
  VocoderConfig v;
  v.n_layers = c.Get<std::size_t>("vocoder.n_layers", v.n_layers);
  v.kernel_size = c.Get<std::size_t>("vocoder.kernel_size", v.kernel_size);
  if (auto s = c.GetString("vocoder.dilation_cycle")) {
    v.dilation_cycle.clear();
    std::string item;
    for (char ch : *s + ",") {
      if (ch == ',' || ch == ' ') {
        if (!item.empty()) v.dilation_cycle.push_back(std::stoul(item));
        item.clear();
      } else {
        item += ch;
      }
    }
  }
  v.residual_channels = c.Get<std::size_t>("vocoder.residual_channels", v.residual_channels);
  v.skip_channels = c.Get<std::size_t>("vocoder.skip_channels", v.skip_channels);
  v.n_classes = c.Get<std::size_t>("vocoder.n_classes", v.n_classes);
  v.n_mels = c.Get<std::size_t>("vocoder.n_mels", c.Get<std::size_t>("dsp.n_mels", v.n_mels));
  v.hop_length =
      c.Get<std::size_t>("vocoder.hop_length", c.Get<std::size_t>("dsp.hop_length", v.hop_length));
  v.init_scale = c.Get<double>("vocoder.init_scale", v.init_scale);
  v.init_seed = c.Get<std::uint64_t>("vocoder.init_seed", v.init_seed);
  v.Validate();
  return v;
}

void VocoderConfig::ToTensors(TensorMap &out) const {
  out["config.n_layers"] = Tensor::Scalar(static_cast<double>(n_layers));
  out["config.kernel_size"] = Tensor::Scalar(static_cast<double>(kernel_size));
  std::vector<double> cyc(dilation_cycle.begin(), dilation_cycle.end());
  out["config.dilation_cycle"] = Tensor::FromVector(cyc);
  out["config.residual_channels"] = Tensor::Scalar(static_cast<double>(residual_channels));
  out["config.skip_channels"] = Tensor::Scalar(static_cast<double>(skip_channels));
  out["config.n_classes"] = Tensor::Scalar(static_cast<double>(n_classes));
  out["config.n_mels"] = Tensor::Scalar(static_cast<double>(n_mels));
  out["config.hop_length"] = Tensor::Scalar(static_cast<double>(hop_length));
  out["config.init_scale"] = Tensor::Scalar(init_scale);
}

VocoderConfig VocoderConfig::FromTensors(const TensorMap &in) {
  auto find = [&](const std::string &name) -> const Tensor & {
    auto it = in.find("config." + name);
    if (it == in.end()) throw Error(ErrorCode::kFormat, "checkpoint lacks config." + name);
    return it->second;
  };
  auto get = [&](const std::string &name) {
    return static_cast<std::size_t>(find(name).data.at(0));
  };
  VocoderConfig v;
  v.n_layers = get("n_layers");
  v.kernel_size = get("kernel_size");
  v.dilation_cycle.clear();
  for (double d : find("dilation_cycle").data)
    v.dilation_cycle.push_back(static_cast<std::size_t>(d));
  v.residual_channels = get("residual_channels");
  v.skip_channels = get("skip_channels");
  v.n_classes = get("n_classes");
  v.n_mels = get("n_mels");
  v.hop_length = get("hop_length");
  v.init_scale = find("init_scale").data.at(0);
  v.Validate();
  return v;
}

std::size_t ReceptiveField(const VocoderConfig &cfg) {
  cfg.Validate();
  std::size_t sum = 0;
  for (std::size_t l = 0; l < cfg.n_layers; ++l) sum += cfg.Dilation(l);
  return 1 + (cfg.kernel_size - 1) * sum;
}

namespace {

std::string LayerName(std::size_t l, const std::string &what) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "layer%02zu.", l);
  return buf + what;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> ParameterShapes(
    const VocoderConfig &cfg) {
  cfg.Validate();
  const std::size_t R = cfg.residual_channels, S = cfg.skip_channels;
  const std::size_t C = cfg.n_classes, M = cfg.n_mels;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> s;
  s.push_back({"embed", {C, R}});
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    for (const char *path : {"filter", "gate"}) {
      for (std::size_t k = 0; k < cfg.kernel_size; ++k)
        s.push_back({LayerName(l, std::string(path) + ".w" + std::to_string(k)), {R, R}});
      s.push_back({LayerName(l, std::string(path) + ".b"), {R}});
      s.push_back({LayerName(l, std::string(path) + ".v"), {R, M}});
    }
    s.push_back({LayerName(l, "res.w"), {R, R}});
    s.push_back({LayerName(l, "res.b"), {R}});
    s.push_back({LayerName(l, "skip.w"), {S, R}});
    s.push_back({LayerName(l, "skip.b"), {S}});
  }
  s.push_back({"out1.w", {S, S}});
  s.push_back({"out1.b", {S}});
  s.push_back({"out2.w", {C, S}});
  s.push_back({"out2.b", {C}});
  return s;
}

void CheckParameters(const VocoderConfig &cfg, const ParameterStore &params) {
  for (const auto &[name, shape] : ParameterShapes(cfg)) {
    if (!params.Contains(name)) throw Error(ErrorCode::kShapeMismatch, "missing parameter " + name);
    if (params.Get(name).shape != shape)
      throw Error(ErrorCode::kShapeMismatch, "wrong shape for parameter " + name);
  }
}

struct LayerWeights {
  std::vector<ConstMatrixView> wf, wg;
  ConstMatrixView vf, vg, wr, ws;
  std::span<const double> bf, bg, br, bs;
  std::size_t dilation;

  LayerWeights(const ParameterStore &p, const VocoderConfig &cfg, std::size_t l)
      : vf(p.Get(LayerName(l, "filter.v")).View()),
        vg(p.Get(LayerName(l, "gate.v")).View()),
        wr(p.Get(LayerName(l, "res.w")).View()),
        ws(p.Get(LayerName(l, "skip.w")).View()),
        bf(p.Get(LayerName(l, "filter.b")).Span()),
        bg(p.Get(LayerName(l, "gate.b")).Span()),
        br(p.Get(LayerName(l, "res.b")).Span()),
        bs(p.Get(LayerName(l, "skip.b")).Span()),
        dilation(cfg.Dilation(l)) {
    for (std::size_t k = 0; k < cfg.kernel_size; ++k) {
      wf.push_back(p.Get(LayerName(l, "filter.w" + std::to_string(k))).View());
      wg.push_back(p.Get(LayerName(l, "gate.w" + std::to_string(k))).View());
    }
  }
};

struct LayerGrads {
  std::vector<MatrixView> wf, wg;
  MatrixView vf, vg, wr, ws;
  std::span<double> bf, bg, br, bs;

  LayerGrads(ParameterStore &g, const VocoderConfig &cfg, std::size_t l)
      : vf(g.Mutable(LayerName(l, "filter.v")).View()),
        vg(g.Mutable(LayerName(l, "gate.v")).View()),
        wr(g.Mutable(LayerName(l, "res.w")).View()),
        ws(g.Mutable(LayerName(l, "skip.w")).View()),
        bf(g.Mutable(LayerName(l, "filter.b")).Span()),
        bg(g.Mutable(LayerName(l, "gate.b")).Span()),
        br(g.Mutable(LayerName(l, "res.b")).Span()),
        bs(g.Mutable(LayerName(l, "skip.b")).Span()) {
    for (std::size_t k = 0; k < cfg.kernel_size; ++k) {
      wf.push_back(g.Mutable(LayerName(l, "filter.w" + std::to_string(k))).View());
      wg.push_back(g.Mutable(LayerName(l, "gate.w" + std::to_string(k))).View());
    }
  }
};

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double LogSumExp(std::span<const double> x) {
  double mx = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

void CheckCodes(std::span<const int> codes, std::size_t n_classes) {
  for (std::size_t i = 0; i < codes.size(); ++i)
    if (codes[i] < 0 || static_cast<std::size_t>(codes[i]) >= n_classes)
      throw Error(ErrorCode::kOutOfRange,
                  "code " + std::to_string(codes[i]) + " at position " + std::to_string(i));
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using ConstMapVec = Eigen::Map<const Eigen::RowVectorXd>;

MapMat Eig(Matrix &m) {
  return MapMat(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                static_cast<Eigen::Index>(m.cols()));
}
ConstMapMat Eig(const Matrix &m) {
  return ConstMapMat(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                     static_cast<Eigen::Index>(m.cols()));
}
ConstMapMat Eig(ConstMatrixView v) {
  return ConstMapMat(v.data, static_cast<Eigen::Index>(v.rows), static_cast<Eigen::Index>(v.cols));
}
MapMat Eig(MatrixView v) {
  return MapMat(v.data, static_cast<Eigen::Index>(v.rows), static_cast<Eigen::Index>(v.cols));
}
ConstMapVec EigVec(std::span<const double> s) {
  return ConstMapVec(s.data(), static_cast<Eigen::Index>(s.size()));
}
Eigen::Map<Eigen::RowVectorXd> EigVec(std::span<double> s) {
  return Eigen::Map<Eigen::RowVectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

// Per-position rows of a per-frame matrix.
RowMat ExpandFrames(const RowMat &per_frame, const ConditioningTrack &cond, std::size_t offset,
                    std::size_t n, std::size_t first_frame) {
  RowMat out(static_cast<Eigen::Index>(n), per_frame.cols());
  for (std::size_t t = 0; t < n; ++t)
    out.row(static_cast<Eigen::Index>(t)) =
        per_frame.row(static_cast<Eigen::Index>(cond.FrameOf(offset + t) - first_frame));
  return out;
}

// Runs the stack over positions [0, inputs.size()) whose conditioning rows
// start at cond_offset. Each layer is evaluated for all positions at once.
VocoderTape RunForward(std::vector<int> inputs, std::vector<int> targets, std::size_t loss_from,
                       const ConditioningTrack &cond, std::size_t cond_offset,
                       const VocoderConfig &cfg, const ParameterStore &params) {
  const std::size_t N = inputs.size(), R = cfg.residual_channels;
  const std::size_t S = cfg.skip_channels, C = cfg.n_classes;
  const auto n = static_cast<Eigen::Index>(N);
  VocoderTape tape;
  tape.params_id = params.id();
  tape.params_generation = params.generation();
  tape.cfg = cfg;
  tape.loss_from = loss_from;
  tape.cond = cond;
  tape.cond_offset = cond_offset;
  tape.skip = Matrix(N, S);
  tape.layers.resize(cfg.n_layers);

  const std::size_t frame0 = cond.FrameOf(cond_offset);
  const std::size_t nframes = cond.FrameOf(cond_offset + N - 1) - frame0 + 1;
  RowMat frames =
      Eig(cond.frames())
          .middleRows(static_cast<Eigen::Index>(frame0), static_cast<Eigen::Index>(nframes));

  Matrix h(N, R);
  const Tensor &embed = params.Get("embed");
  for (std::size_t t = 0; t < N; ++t) {
    auto row = embed.View().Row(static_cast<std::size_t>(inputs[t]));
    std::copy(row.begin(), row.end(), h.Row(t).begin());
  }

  auto skip = Eig(tape.skip);
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    LayerWeights w(params, cfg, l);
    LayerRecord &rec = tape.layers[l];
    rec.h_in = h;
    auto hin = Eig(rec.h_in);
    RowMat cf = (frames * Eig(w.vf).transpose()).rowwise() + EigVec(w.bf);
    RowMat cg = (frames * Eig(w.vg).transpose()).rowwise() + EigVec(w.bg);
    RowMat f = ExpandFrames(cf, cond, cond_offset, N, frame0);
    RowMat g = ExpandFrames(cg, cond, cond_offset, N, frame0);
    for (std::size_t k = 0; k < cfg.kernel_size; ++k) {
      auto back = static_cast<Eigen::Index>(k * w.dilation);
      if (back >= n) break;
      f.bottomRows(n - back).noalias() += hin.topRows(n - back) * Eig(w.wf[k]).transpose();
      g.bottomRows(n - back).noalias() += hin.topRows(n - back) * Eig(w.wg[k]).transpose();
    }
    rec.tf = Matrix(N, R);
    rec.sg = Matrix(N, R);
    rec.z = Matrix(N, R);
    auto tf = Eig(rec.tf), sg = Eig(rec.sg), z = Eig(rec.z);
    tf = f.array().tanh().matrix();
    sg = g.unaryExpr([](double x) { return Sigmoid(x); });
    z = tf.cwiseProduct(sg);
    auto hm = Eig(h);
    hm.noalias() += z * Eig(w.wr).transpose();
    hm.rowwise() += EigVec(w.br);
    skip.noalias() += z * Eig(w.ws).transpose();
    skip.rowwise() += EigVec(w.bs);
  }

  ConstMatrixView w1 = params.Get("out1.w").View(), w2 = params.Get("out2.w").View();
  auto b1 = params.Get("out1.b").Span(), b2 = params.Get("out2.b").Span();
  tape.hidden = Matrix(N, S);
  tape.logits = Matrix(N, C);
  auto hid = Eig(tape.hidden);
  hid = ((skip * Eig(w1).transpose()).rowwise() + EigVec(b1)).array().tanh().matrix();
  Eig(tape.logits) = (hid * Eig(w2).transpose()).rowwise() + EigVec(b2);
  tape.inputs = std::move(inputs);
  tape.targets = std::move(targets);
  return tape;
}

std::vector<int> ShiftedInputs(std::span<const int> codes, std::size_t begin, std::size_t end) {
  std::vector<int> in;
  in.reserve(end - begin);
  for (std::size_t t = begin; t < end; ++t) in.push_back(t == 0 ? kStartCode : codes[t - 1]);
  return in;
}

}  // namespace

ParameterStore InitParameters(const VocoderConfig &cfg) {
  ParameterStore p;
  for (auto &[name, shape] : ParameterShapes(cfg)) p.Add(name, shape);
  p.InitUniform(-cfg.init_scale, cfg.init_scale, cfg.init_seed);
  return p;
}

ConditioningTrack::ConditioningTrack(Matrix frames, std::size_t hop)
    : frames_(std::move(frames)), hop_(hop) {
  if (hop == 0) throw Error(ErrorCode::kInvalidArgument, "hop must be positive");
}

Matrix ConditioningTrack::Materialize() const {
  Matrix out(length(), n_mels());
  for (std::size_t t = 0; t < length(); ++t)
    std::copy(Row(t).begin(), Row(t).end(), out.Row(t).begin());
  return out;
}

ConditioningTrack UpsampleConditioning(const Matrix &mel, std::size_t hop) {
  return ConditioningTrack(mel, hop);
}

VocoderForwardResult Forward(std::span<const int> codes, const ConditioningTrack &cond,
                             const VocoderConfig &cfg, const ParameterStore &params) {
  cfg.Validate();
  CheckParameters(cfg, params);
  if (codes.size() != cond.length())
    throw Error(ErrorCode::kLengthMismatch, std::to_string(codes.size()) +
                                                " codes but conditioning covers " +
                                                std::to_string(cond.length()) + " samples");
  if (cond.n_mels() != cfg.n_mels)
    throw Error(ErrorCode::kShapeMismatch,
                "conditioning has " + std::to_string(cond.n_mels()) + " features");
  if (codes.empty()) throw Error(ErrorCode::kEmptyInput, "no codes");
  CheckCodes(codes, cfg.n_classes);
  VocoderForwardResult res;
  res.tape = RunForward(ShiftedInputs(codes, 0, codes.size()),
                        std::vector<int>(codes.begin(), codes.end()), 0, cond, 0, cfg, params);
  res.logits = res.tape.logits;
  return res;
}

double Loss(const Matrix &logits, std::span<const int> targets) {
  if (logits.rows() != targets.size() || logits.rows() == 0)
    throw Error(ErrorCode::kShapeMismatch, std::to_string(logits.rows()) + " logit rows vs " +
                                               std::to_string(targets.size()) + " targets");
  CheckCodes(targets, logits.cols());
  double total = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    auto row = logits.Row(t);
    total += LogSumExp(row) - row[static_cast<std::size_t>(targets[t])];
  }
  return total / static_cast<double>(targets.size());
}

Gradients Backward(const VocoderTape &tape, const ParameterStore &params) {
  if (tape.params_id != params.id() || tape.params_generation != params.generation())
    throw Error(ErrorCode::kStaleTape,
                "tape was recorded against different parameters; run forward again");
  const VocoderConfig &cfg = tape.cfg;
  const std::size_t N = tape.inputs.size(), R = cfg.residual_channels;
  const std::size_t C = cfg.n_classes;
  const std::size_t n_loss = N - tape.loss_from;
  const auto n = static_cast<Eigen::Index>(N);

  Gradients out;
  out.grads = params.ZerosLike();
  ParameterStore &g = out.grads;

  // Softmax cross-entropy on the loss positions.
  RowMat dlogit = RowMat::Zero(n, static_cast<Eigen::Index>(C));
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(n_loss);
  for (std::size_t t = tape.loss_from; t < N; ++t) {
    auto lg = tape.logits.Row(t);
    double lse = LogSumExp(lg);
    auto target = static_cast<std::size_t>(tape.targets[t]);
    loss += lse - lg[target];
    auto row = dlogit.row(static_cast<Eigen::Index>(t));
    for (std::size_t c = 0; c < C; ++c)
      row(static_cast<Eigen::Index>(c)) = scale * std::exp(lg[c] - lse);
    row(static_cast<Eigen::Index>(target)) -= scale;
  }
  out.loss = loss * scale;

  auto hid = Eig(tape.hidden);
  ConstMatrixView w1 = params.Get("out1.w").View(), w2 = params.Get("out2.w").View();
  Eig(g.Mutable("out2.w").View()).noalias() += dlogit.transpose() * hid;
  EigVec(g.Mutable("out2.b").Span()) += dlogit.colwise().sum();
  RowMat dhid = (dlogit * Eig(w2)).cwiseProduct((1.0 - hid.array().square()).matrix());
  Eig(g.Mutable("out1.w").View()).noalias() += dhid.transpose() * Eig(tape.skip);
  EigVec(g.Mutable("out1.b").Span()) += dhid.colwise().sum();
  RowMat dskip = dhid * Eig(w1);

  const std::size_t frame0 = tape.cond.FrameOf(tape.cond_offset);
  const std::size_t nframes = tape.cond.FrameOf(tape.cond_offset + N - 1) - frame0 + 1;
  RowMat frames =
      Eig(tape.cond.frames())
          .middleRows(static_cast<Eigen::Index>(frame0), static_cast<Eigen::Index>(nframes));
  std::vector<Eigen::Index> frame_of(N);
  for (std::size_t t = 0; t < N; ++t)
    frame_of[t] = static_cast<Eigen::Index>(tape.cond.FrameOf(tape.cond_offset + t) - frame0);

  // dres is the gradient with respect to the current layer's output.
  RowMat dres = RowMat::Zero(n, static_cast<Eigen::Index>(R));
  for (std::size_t l = cfg.n_layers; l-- > 0;) {
    LayerWeights w(params, cfg, l);
    LayerGrads gl(g, cfg, l);
    const LayerRecord &rec = tape.layers[l];
    auto z = Eig(rec.z), tf = Eig(rec.tf), sg = Eig(rec.sg), hin = Eig(rec.h_in);

    RowMat dz = dskip * Eig(w.ws) + dres * Eig(w.wr);
    Eig(gl.ws).noalias() += dskip.transpose() * z;
    EigVec(gl.bs) += dskip.colwise().sum();
    Eig(gl.wr).noalias() += dres.transpose() * z;
    EigVec(gl.br) += dres.colwise().sum();

    RowMat df = (dz.array() * sg.array() * (1.0 - tf.array().square())).matrix();
    RowMat dg = (dz.array() * tf.array() * sg.array() * (1.0 - sg.array())).matrix();

    RowMat dcf = RowMat::Zero(static_cast<Eigen::Index>(nframes), static_cast<Eigen::Index>(R));
    RowMat dcg = dcf;
    for (std::size_t t = 0; t < N; ++t) {
      dcf.row(frame_of[t]) += df.row(static_cast<Eigen::Index>(t));
      dcg.row(frame_of[t]) += dg.row(static_cast<Eigen::Index>(t));
    }
    Eig(gl.vf).noalias() += dcf.transpose() * frames;
    Eig(gl.vg).noalias() += dcg.transpose() * frames;
    EigVec(gl.bf) += dcf.colwise().sum();
    EigVec(gl.bg) += dcg.colwise().sum();

    RowMat din = dres;  // identity residual path
    for (std::size_t k = 0; k < cfg.kernel_size; ++k) {
      auto back = static_cast<Eigen::Index>(k * w.dilation);
      if (back >= n) break;
      Eig(gl.wf[k]).noalias() += df.bottomRows(n - back).transpose() * hin.topRows(n - back);
      Eig(gl.wg[k]).noalias() += dg.bottomRows(n - back).transpose() * hin.topRows(n - back);
      din.topRows(n - back).noalias() += df.bottomRows(n - back) * Eig(w.wf[k]);
      din.topRows(n - back).noalias() += dg.bottomRows(n - back) * Eig(w.wg[k]);
    }
    dres = std::move(din);
  }

  MatrixView gembed = g.Mutable("embed").View();
  for (std::size_t t = 0; t < N; ++t) {
    auto row = gembed.Row(static_cast<std::size_t>(tape.inputs[t]));
    EigVec(row) += dres.row(static_cast<Eigen::Index>(t));
  }
  return out;
}

std::vector<int> GenerateCodes(const ConditioningTrack &cond, const VocoderConfig &cfg,
                               const ParameterStore &params, const GenerateOptions &opts) {
  cfg.Validate();
  CheckParameters(cfg, params);
  if (!(opts.temperature > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  if (cond.n_mels() != cfg.n_mels)
    throw Error(ErrorCode::kShapeMismatch,
                "conditioning has " + std::to_string(cond.n_mels()) + " features");
  const std::size_t N = cond.length(), R = cfg.residual_channels;
  const std::size_t S = cfg.skip_channels, C = cfg.n_classes, L = cfg.n_layers;
  const bool greedy = opts.temperature < kArgmaxTemperature;

  std::vector<LayerWeights> layers;
  for (std::size_t l = 0; l < L; ++l) layers.emplace_back(params, cfg, l);
  // Ring buffer of each layer's past inputs, long enough for its widest tap.
  std::vector<std::size_t> span(L);
  std::vector<Matrix> hist(L);
  for (std::size_t l = 0; l < L; ++l) {
    span[l] = (cfg.kernel_size - 1) * layers[l].dilation + 1;
    hist[l] = Matrix(span[l], R);
  }
  const Tensor &embed = params.Get("embed");
  ConstMatrixView w1 = params.Get("out1.w").View(), w2 = params.Get("out2.w").View();
  auto b1 = params.Get("out1.b").Span(), b2 = params.Get("out2.b").Span();

  Rng rng(opts.seed);
  std::vector<int> codes(N);
  std::vector<double> h(R), f(R), g(R), z(R), skip(S), hid(S), logit(C), prob(C);
  std::vector<std::vector<double>> cf(L), cg(L);
  std::size_t current_frame = static_cast<std::size_t>(-1);
  int prev = kStartCode;
  for (std::size_t t = 0; t < N; ++t) {
    if (cond.FrameOf(t) != current_frame) {
      current_frame = cond.FrameOf(t);
      for (std::size_t l = 0; l < L; ++l) {
        cf[l].assign(layers[l].bf.begin(), layers[l].bf.end());
        cg[l].assign(layers[l].bg.begin(), layers[l].bg.end());
        kernels::Gemv(layers[l].vf, cond.Row(t), cf[l]);
        kernels::Gemv(layers[l].vg, cond.Row(t), cg[l]);
      }
    }
    auto er = embed.View().Row(static_cast<std::size_t>(prev));
    std::copy(er.begin(), er.end(), h.begin());
    std::fill(skip.begin(), skip.end(), 0.0);
    for (std::size_t l = 0; l < L; ++l) {
      const LayerWeights &w = layers[l];
      std::copy(h.begin(), h.end(), hist[l].Row(t % span[l]).begin());
      f = cf[l];
      g = cg[l];
      for (std::size_t k = 0; k < cfg.kernel_size; ++k) {
        std::size_t back = k * w.dilation;
        if (back > t) break;
        auto src = hist[l].Row((t - back) % span[l]);
        kernels::Gemv(w.wf[k], src, f);
        kernels::Gemv(w.wg[k], src, g);
      }
      for (std::size_t r = 0; r < R; ++r) z[r] = std::tanh(f[r]) * Sigmoid(g[r]);
      kernels::Axpy(1.0, w.br, h);
      kernels::Gemv(w.wr, z, h);
      kernels::Axpy(1.0, w.bs, skip);
      kernels::Gemv(w.ws, z, skip);
    }
    std::copy(b1.begin(), b1.end(), hid.begin());
    kernels::Gemv(w1, skip, hid);
    for (double &x : hid) x = std::tanh(x);
    std::copy(b2.begin(), b2.end(), logit.begin());
    kernels::Gemv(w2, hid, logit);

    std::size_t code = 0;
    if (greedy) {
      code = static_cast<std::size_t>(std::max_element(logit.begin(), logit.end()) - logit.begin());
    } else {
      double mx = *std::max_element(logit.begin(), logit.end());
      double sum = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        prob[c] = std::exp((logit[c] - mx) / opts.temperature);
        sum += prob[c];
      }
      double u = rng.Uniform() * sum, acc = 0.0;
      code = C - 1;
      for (std::size_t c = 0; c < C; ++c) {
        acc += prob[c];
        if (u < acc) {
          code = c;
          break;
        }
      }
    }
    codes[t] = static_cast<int>(code);
    prev = codes[t];
  }
  return codes;
}

dsp::Waveform Generate(const ConditioningTrack &cond, const VocoderConfig &cfg,
                       const ParameterStore &params, const GenerateOptions &opts, int sample_rate) {
  std::vector<int> codes = GenerateCodes(cond, cfg, params, opts);
  dsp::Waveform w;
  w.sample_rate = sample_rate;
  w.samples = dsp::MuLawDecode(codes);
  return w;
}

namespace {

std::vector<int> CodesOf(const dsp::Waveform &audio, const Matrix &mel, const VocoderConfig &cfg) {
  if (mel.cols() != cfg.n_mels)
    throw Error(ErrorCode::kShapeMismatch, "mel has " + std::to_string(mel.cols()) +
                                               " bands, config says " + std::to_string(cfg.n_mels));
  if (audio.samples.size() != mel.rows() * cfg.hop_length || audio.samples.empty())
    throw Error(ErrorCode::kLengthMismatch, "audio has " + std::to_string(audio.samples.size()) +
                                                " samples, mel covers " +
                                                std::to_string(mel.rows() * cfg.hop_length));
  std::vector<double> clipped(audio.samples);
  for (double &x : clipped) x = std::clamp(x, -1.0, 1.0);
  return dsp::MuLawEncode(clipped);
}

}  // namespace

std::vector<double> Train(const dsp::Waveform &audio, const Matrix &mel, const VocoderConfig &cfg,
                          ParameterStore &params, const TrainOptions &opts) {
  cfg.Validate();
  CheckParameters(cfg, params);
  std::vector<int> codes = CodesOf(audio, mel, cfg);
  ConditioningTrack cond(mel, cfg.hop_length);
  const std::size_t N = codes.size(), rf = ReceptiveField(cfg);
  const std::size_t chunk = (opts.chunk == 0 || opts.chunk >= N) ? N : opts.chunk;
  Adam adam(opts.adam);
  Rng rng(opts.seed);
  std::vector<double> curve;
  for (int step = 0; step < opts.steps; ++step) {
    // Offsets are drawn past both ends and clamped so every position,
    // including the first few after the start code, is covered equally often.
    std::size_t start = 0;
    if (chunk < N) {
      auto raw = static_cast<std::ptrdiff_t>(rng.Below(N + chunk - 1)) -
                 static_cast<std::ptrdiff_t>(chunk - 1);
      start = static_cast<std::size_t>(
          std::clamp<std::ptrdiff_t>(raw, 0, static_cast<std::ptrdiff_t>(N - chunk)));
    }
    std::size_t begin = start >= rf - 1 ? start - (rf - 1) : 0;
    std::size_t end = start + chunk;
    std::vector<int> inputs = ShiftedInputs(codes, begin, end);
    if (opts.input_jitter > 0 && opts.jitter_prob > 0.0) {
      const int span = 2 * opts.input_jitter + 1;
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (begin + i == 0 || rng.Uniform() >= opts.jitter_prob) continue;
        int offset =
            static_cast<int>(rng.Below(static_cast<std::uint64_t>(span))) - opts.input_jitter;
        inputs[i] = std::clamp(inputs[i] + offset, 0, static_cast<int>(cfg.n_classes) - 1);
      }
    }
    VocoderTape tape =
        RunForward(std::move(inputs),
                   std::vector<int>(codes.begin() + static_cast<std::ptrdiff_t>(begin),
                                    codes.begin() + static_cast<std::ptrdiff_t>(end)),
                   start - begin, cond, begin, cfg, params);
    Gradients gr = Backward(tape, params);
    curve.push_back(gr.loss);
    adam.Step(params, gr.grads);
  }
  return curve;
}

double Evaluate(const dsp::Waveform &audio, const Matrix &mel, const VocoderConfig &cfg,
                const ParameterStore &params) {
  std::vector<int> codes = CodesOf(audio, mel, cfg);
  auto res = Forward(codes, ConditioningTrack(mel, cfg.hop_length), cfg, params);
  return Loss(res.logits, codes);
}

void SaveCheckpoint(const std::string &path, const VocoderConfig &cfg,
                    const ParameterStore &params) {
  CheckParameters(cfg, params);
  TensorMap m = params.tensors();
  cfg.ToTensors(m);
  WriteCheckpoint(path, m);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  TensorMap m = ReadCheckpoint(path);
  Checkpoint ck;
  ck.cfg = VocoderConfig::FromTensors(m);
  for (const auto &[name, t] : m) {
    if (name.rfind("config.", 0) == 0) continue;
    ck.params.Add(name, t.shape).data = t.data;
  }
  CheckParameters(ck.cfg, ck.params);
  return ck;
}

TrainOptions TrainOptions::FromConfig(const Config &c) {
  TrainOptions o;
  o.steps = c.Get<int>("vocoder.steps", o.steps);
  o.adam.learning_rate = c.Get<double>("vocoder.learning_rate", o.adam.learning_rate);
  o.adam.clip_norm = c.Get<double>("vocoder.clip_norm", o.adam.clip_norm);
  o.seed = c.Get<std::uint64_t>("vocoder.train_seed", o.seed);
  o.chunk = c.Get<std::size_t>("vocoder.chunk", o.chunk);
  o.input_jitter = c.Get<int>("vocoder.input_jitter", o.input_jitter);
  o.jitter_prob = c.Get<double>("vocoder.jitter_prob", o.jitter_prob);
  return o;
}

}  // namespace cltts::vocoder
