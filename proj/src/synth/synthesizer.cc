// src/synth/synthesizer.cc

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

#include "cltts/synth/synthesizer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cltts/base/checkpoint.h"
#include "cltts/base/error.h"
#include "cltts/kernels/kernels.h"
#include "internal.h"

namespace cltts::synth {

using frontend::kNumMarks;

TrainingTape::TrainingTape() = default;
TrainingTape::~TrainingTape() = default;
TrainingTape::TrainingTape(TrainingTape &&) noexcept = default;
TrainingTape &TrainingTape::operator=(TrainingTape &&) noexcept = default;

void SynthConfig::Validate() const {
  auto need = [](bool ok, const char *what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("synth config: ") + what);
  };
  need(phoneme_embed_dim > 0, "phoneme_embed_dim must be positive");
  need(encoder_dim > 0 && encoder_dim % 2 == 0, "encoder_dim must be positive and even");
  need(decoder_dim > 0, "decoder_dim must be positive");
  need(attention_dim > 0, "attention_dim must be positive");
  need(prenet_dim > 0, "prenet_dim must be positive");
  need(speaker_dim > 0, "speaker_dim must be positive");
  need(language_dim > 0, "language_dim must be positive");
  need(n_mels > 0, "n_mels must be positive");
  need(location_channels > 0, "location_channels must be positive");
  need(location_kernel % 2 == 1, "location_kernel must be odd");
  need(max_decoder_steps > 0, "max_decoder_steps must be positive");
  need(stop_threshold > 0.0 && stop_threshold < 1.0, "stop_threshold must be in (0, 1)");
  need(init_scale > 0.0, "init_scale must be positive");
  need(prenet_dropout >= 0.0 && prenet_dropout < 1.0, "prenet_dropout must be in [0, 1)");
  need(guided_attention_weight >= 0.0, "guided_attention_weight must be >= 0");
  need(guided_attention_width > 0.0, "guided_attention_width must be positive");
}

#define CLTTS_SYNTH_FIELDS(X) \
  X(phoneme_embed_dim)        \
  X(encoder_dim)              \
  X(decoder_dim)              \
  X(attention_dim)            \
  X(prenet_dim)               \
  X(speaker_dim)              \
  X(language_dim)             \
  X(n_mels)                   \
  X(location_channels)        \
  X(location_kernel)          \
  X(max_decoder_steps)

SynthConfig SynthConfig::FromConfig(const Config &c) {
  SynthConfig s;
#define X(f) s.f = c.Get<std::size_t>("synth." #f, s.f);
  CLTTS_SYNTH_FIELDS(X)
#undef X
  s.stop_threshold = c.Get<double>("synth.stop_threshold", s.stop_threshold);
  s.init_scale = c.Get<double>("synth.init_scale", s.init_scale);
  s.init_seed = c.Get<std::uint64_t>("synth.init_seed", s.init_seed);
  s.prenet_dropout = c.Get<double>("synth.prenet_dropout", s.prenet_dropout);
  s.guided_attention_weight =
      c.Get<double>("synth.guided_attention_weight", s.guided_attention_weight);
  s.guided_attention_width =
      c.Get<double>("synth.guided_attention_width", s.guided_attention_width);
  s.Validate();
  return s;
}

void SynthConfig::ToTensors(TensorMap &out) const {
#define X(f) out["config." #f] = Tensor::Scalar(static_cast<double>(f));
  CLTTS_SYNTH_FIELDS(X)
#undef X
  out["config.stop_threshold"] = Tensor::Scalar(stop_threshold);
  out["config.init_scale"] = Tensor::Scalar(init_scale);
  out["config.prenet_dropout"] = Tensor::Scalar(prenet_dropout);
  out["config.guided_attention_weight"] = Tensor::Scalar(guided_attention_weight);
  out["config.guided_attention_width"] = Tensor::Scalar(guided_attention_width);
}

SynthConfig SynthConfig::FromTensors(const TensorMap &in) {
  SynthConfig s;
  auto get = [&](const std::string &name) {
    auto it = in.find("config." + name);
    if (it == in.end() || it->second.size() != 1)
      throw Error(ErrorCode::kFormat, "checkpoint lacks config." + name);
    return it->second.data[0];
  };
#define X(f) s.f = static_cast<std::size_t>(get(#f));
  CLTTS_SYNTH_FIELDS(X)
#undef X
  s.stop_threshold = get("stop_threshold");
  s.init_scale = get("init_scale");
  s.prenet_dropout = get("prenet_dropout");
  s.guided_attention_weight = get("guided_attention_weight");
  s.guided_attention_width = get("guided_attention_width");
  s.Validate();
  return s;
}

#undef CLTTS_SYNTH_FIELDS

ShapeList ParameterShapes(const SynthConfig &cfg) {
  cfg.Validate();
  const std::size_t V = frontend::PhonemeInventory::Shared().size();
  const std::size_t H = cfg.encoder_dim / 2, W = cfg.context_dim();
  const std::size_t A = cfg.attention_dim, D = cfg.decoder_dim, P = cfg.prenet_dim;
  const std::size_t M = cfg.n_mels, C = cfg.location_channels;
  ShapeList s;
  s.push_back({"embedding", {V, cfg.phoneme_embed_dim}});
  s.push_back({"language", {kNumLanguages, cfg.language_dim}});
  AddGruShapes(s, "enc_fwd", cfg.input_dim(), H);
  AddGruShapes(s, "enc_bwd", cfg.input_dim(), H);
  s.push_back({"prenet.W1", {P, M}});
  s.push_back({"prenet.b1", {P}});
  s.push_back({"prenet.W2", {P, P}});
  s.push_back({"prenet.b2", {P}});
  AddGruShapes(s, "dec", P + W, D);
  s.push_back({"attn.Wq", {A, D}});
  s.push_back({"attn.Wm", {A, W}});
  s.push_back({"attn.Wl", {A, C}});
  s.push_back({"attn.b", {A}});
  s.push_back({"attn.v", {A}});
  s.push_back({"attn.loc", {C, cfg.location_kernel}});
  s.push_back({"out.W", {M, D + W}});
  s.push_back({"out.b", {M}});
  s.push_back({"stop.w", {1, D + W}});
  s.push_back({"stop.b", {1}});
  return s;
}

ParameterStore InitParameters(const SynthConfig &cfg) {
  ParameterStore p;
  for (auto &[name, shape] : ParameterShapes(cfg)) p.Add(name, shape);
  p.InitUniform(-cfg.init_scale, cfg.init_scale, cfg.init_seed);
  return p;
}

namespace {

void CheckParameters(const SynthConfig &cfg, const ParameterStore &params) {
  for (const auto &[name, shape] : ParameterShapes(cfg)) {
    if (!params.Contains(name)) throw Error(ErrorCode::kShapeMismatch, "missing parameter " + name);
    if (params.Get(name).shape != shape)
      throw Error(ErrorCode::kShapeMismatch, "wrong shape for parameter " + name);
  }
}

struct AttnWeights {
  ConstMatrixView wq, wm, wl, loc;
  std::span<const double> b, v;
  explicit AttnWeights(const ParameterStore &p)
      : wq(p.Get("attn.Wq").View()),
        wm(p.Get("attn.Wm").View()),
        wl(p.Get("attn.Wl").View()),
        loc(p.Get("attn.loc").View()),
        b(p.Get("attn.b").Span()),
        v(p.Get("attn.v").Span()) {}
};

Matrix ProjectMemory(const Matrix &context, const ConstMatrixView &wm) {
  Matrix memory(context.rows(), wm.rows);
  for (std::size_t j = 0; j < context.rows(); ++j) kernels::Gemv(wm, context.Row(j), memory.Row(j));
  return memory;
}

// Fills rec.loc, rec.hidden, rec.alignment and rec.summary.
void AttendStep(const AttnWeights &w, std::span<const double> query, const Matrix &context,
                const Matrix &memory, std::span<const double> prev, StepRecord &rec) {
  const std::size_t T = context.rows(), A = w.wq.rows, C = w.loc.rows;
  const std::size_t K = w.loc.cols, pad = K / 2;
  std::vector<double> qa(w.b.begin(), w.b.end());
  kernels::Gemv(w.wq, query, qa);

  rec.prev_alignment.assign(prev.begin(), prev.end());
  rec.loc = Matrix(T, C);
  for (std::size_t j = 0; j < T; ++j)
    for (std::size_t c = 0; c < C; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        std::ptrdiff_t src = static_cast<std::ptrdiff_t>(j + k) - static_cast<std::ptrdiff_t>(pad);
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(T)) continue;
        acc += w.loc(c, k) * prev[static_cast<std::size_t>(src)];
      }
      rec.loc(j, c) = acc;
    }

  rec.hidden = Matrix(T, A);
  std::vector<double> energy(T);
  for (std::size_t j = 0; j < T; ++j) {
    auto h = rec.hidden.Row(j);
    for (std::size_t a = 0; a < A; ++a) h[a] = qa[a] + memory(j, a);
    kernels::Gemv(w.wl, rec.loc.Row(j), h);
    for (double &x : h) x = std::tanh(x);
    energy[j] = kernels::Dot(w.v, h);
  }
  rec.alignment = Softmax(energy);
  rec.summary.assign(context.cols(), 0.0);
  for (std::size_t j = 0; j < T; ++j) kernels::Axpy(rec.alignment[j], context.Row(j), rec.summary);
}

void ApplyDropout(std::vector<double> &x, std::vector<double> &mask, double rate, Rng &rng) {
  mask.resize(x.size());
  const double keep = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = rng.Uniform() < rate ? 0.0 : keep;
    x[i] *= mask[i];
  }
}

void CheckTeacher(const SynthConfig &cfg, const Matrix *mel, const std::vector<double> *stops) {
  if (!mel) return;
  if (mel->rows() == 0 || mel->cols() != cfg.n_mels)
    throw Error(ErrorCode::kShapeMismatch, "teacher mel must be T x " + std::to_string(cfg.n_mels));
  if (stops && stops->size() != mel->rows())
    throw Error(ErrorCode::kShapeMismatch, "stop targets do not match mel frames");
}

}  // namespace

std::vector<double> Softmax(std::span<const double> e) {
  if (e.empty()) return {};
  double mx = *std::max_element(e.begin(), e.end());
  std::vector<double> out(e.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    out[i] = std::exp(e[i] - mx);
    sum += out[i];
  }
  for (double &x : out) x /= sum;
  return out;
}

Matrix EmbedInputs(const frontend::InputSequence &seq, const ParameterStore &params) {
  const Tensor &table = params.Get("embedding");
  const std::size_t E = table.cols();
  if (seq.tokens.empty()) throw Error(ErrorCode::kEmptyInput, "empty input sequence");
  Matrix out(seq.length(), E + kNumMarks);
  for (std::size_t t = 0; t < seq.length(); ++t) {
    int id = seq.tokens[t].phoneme_id;
    if (id < 0 || static_cast<std::size_t>(id) >= table.rows())
      throw Error(ErrorCode::kIdOutOfRange,
                  "phoneme id " + std::to_string(id) + " at position " + std::to_string(t));
    auto row = out.Row(t);
    std::copy_n(table.data.begin() + static_cast<std::ptrdiff_t>(id * E), E, row.begin());
    auto mark = frontend::EncodeMark(seq.tokens[t].mark);
    std::copy(mark.begin(), mark.end(), row.begin() + static_cast<std::ptrdiff_t>(E));
  }
  return out;
}

namespace {

Matrix EncodeImpl(const Matrix &x, const SynthConfig &cfg, const ParameterStore &params,
                  std::vector<GruStep> *fwd_steps, std::vector<GruStep> *bwd_steps) {
  if (x.cols() != cfg.input_dim())
    throw Error(ErrorCode::kDimensionMismatch, "encoder input width");
  const std::size_t T = x.rows(), H = cfg.encoder_dim / 2;
  GruWeights fwd(params, "enc_fwd"), bwd(params, "enc_bwd");
  Matrix out(T, 2 * H);
  std::vector<GruStep> fs(T), bs(T);
  std::vector<double> h(H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    GruForward(fwd, x.Row(t), h, fs[t]);
    h = fs[t].h;
    std::copy(h.begin(), h.end(), out.Row(t).begin());
  }
  std::fill(h.begin(), h.end(), 0.0);
  for (std::size_t t = T; t-- > 0;) {
    GruForward(bwd, x.Row(t), h, bs[t]);
    h = bs[t].h;
    std::copy(h.begin(), h.end(), out.Row(t).begin() + static_cast<std::ptrdiff_t>(H));
  }
  if (fwd_steps) *fwd_steps = std::move(fs);
  if (bwd_steps) *bwd_steps = std::move(bs);
  return out;
}

}  // namespace

Matrix Encode(const Matrix &embedded, const SynthConfig &cfg, const ParameterStore &params) {
  return EncodeImpl(embedded, cfg, params, nullptr, nullptr);
}

Matrix Condition(const Matrix &enc, std::span<const double> speaker, int language_id,
                 const SynthConfig &cfg, const ParameterStore &params) {
  if (enc.cols() != cfg.encoder_dim)
    throw Error(ErrorCode::kDimensionMismatch, "encoder output width");
  if (speaker.size() != cfg.speaker_dim)
    throw Error(ErrorCode::kDimensionMismatch,
                "speaker embedding has " + std::to_string(speaker.size()) + " dims, expected " +
                    std::to_string(cfg.speaker_dim));
  if (language_id < 0 || static_cast<std::size_t>(language_id) >= kNumLanguages)
    throw Error(ErrorCode::kIdOutOfRange, "language id " + std::to_string(language_id));
  const Tensor &lang = params.Get("language");
  auto lrow = lang.View().Row(static_cast<std::size_t>(language_id));
  Matrix out(enc.rows(), cfg.context_dim());
  for (std::size_t t = 0; t < enc.rows(); ++t) {
    auto row = out.Row(t);
    auto it = std::copy(enc.Row(t).begin(), enc.Row(t).end(), row.begin());
    it = std::copy(speaker.begin(), speaker.end(), it);
    std::copy(lrow.begin(), lrow.end(), it);
  }
  return out;
}

AttentionResult Attend(std::span<const double> query, const Matrix &context,
                       std::span<const double> prev_alignment, const SynthConfig &cfg,
                       const ParameterStore &params) {
  if (query.size() != cfg.decoder_dim || context.cols() != cfg.context_dim() ||
      prev_alignment.size() != context.rows())
    throw Error(ErrorCode::kDimensionMismatch, "attention operand sizes");
  AttnWeights w(params);
  Matrix memory = ProjectMemory(context, w.wm);
  StepRecord rec;
  AttendStep(w, query, context, memory, prev_alignment, rec);
  return {std::move(rec.alignment), std::move(rec.summary)};
}

std::vector<double> DefaultStopTargets(std::size_t frames) {
  std::vector<double> s(frames, 0.0);
  if (frames) s.back() = 1.0;
  return s;
}

ForwardResult Forward(const frontend::InputSequence &seq, std::span<const double> speaker,
                      int language_id, const SynthConfig &cfg, const ParameterStore &params,
                      const Matrix *teacher_mel, const std::vector<double> *teacher_stops,
                      Rng *dropout_rng) {
  cfg.Validate();
  CheckParameters(cfg, params);
  CheckTeacher(cfg, teacher_mel, teacher_stops);

  ForwardResult res;
  TrainingTape &tape = res.tape;
  tape.params_id = params.id();
  tape.params_generation = params.generation();
  tape.teacher_forced = teacher_mel != nullptr;
  tape.cfg = cfg;
  tape.language_id = language_id;
  for (const auto &tok : seq.tokens) tape.phoneme_ids.push_back(tok.phoneme_id);

  tape.embedded = EmbedInputs(seq, params);
  tape.encoder_out = EncodeImpl(tape.embedded, cfg, params, &tape.enc_fwd, &tape.enc_bwd);
  tape.context = Condition(tape.encoder_out, speaker, language_id, cfg, params);
  AttnWeights aw(params);
  tape.memory = ProjectMemory(tape.context, aw.wm);

  const std::size_t T = seq.length(), M = cfg.n_mels, D = cfg.decoder_dim;
  const std::size_t W = cfg.context_dim(), P = cfg.prenet_dim;
  const std::size_t max_steps = teacher_mel ? teacher_mel->rows() : cfg.max_decoder_steps;
  ConstMatrixView pw1 = params.Get("prenet.W1").View(), pw2 = params.Get("prenet.W2").View();
  auto pb1 = params.Get("prenet.b1").Span(), pb2 = params.Get("prenet.b2").Span();
  ConstMatrixView ow = params.Get("out.W").View();
  auto ob = params.Get("out.b").Span();
  auto sw = params.Get("stop.w").Span();
  double sb = params.Get("stop.b").data[0];
  GruWeights dec(params, "dec");

  const bool dropout = dropout_rng != nullptr && cfg.prenet_dropout > 0.0;
  std::vector<double> prev_frame(M, 0.0), h(D, 0.0), summary(W, 0.0), align(T, 0.0);
  align[0] = 1.0;
  std::vector<std::vector<double>> mels, aligns;
  for (std::size_t i = 0; i < max_steps; ++i) {
    StepRecord rec;
    rec.prev_frame = prev_frame;
    rec.p1.assign(pb1.begin(), pb1.end());
    kernels::Gemv(pw1, prev_frame, rec.p1);
    for (double &x : rec.p1) x = std::tanh(x);
    if (dropout) ApplyDropout(rec.p1, rec.mask1, cfg.prenet_dropout, *dropout_rng);
    rec.p2.assign(pb2.begin(), pb2.end());
    kernels::Gemv(pw2, rec.p1, rec.p2);
    for (double &x : rec.p2) x = std::tanh(x);
    if (dropout) ApplyDropout(rec.p2, rec.mask2, cfg.prenet_dropout, *dropout_rng);

    std::vector<double> dec_in(P + W);
    std::copy(rec.p2.begin(), rec.p2.end(), dec_in.begin());
    std::copy(summary.begin(), summary.end(), dec_in.begin() + static_cast<std::ptrdiff_t>(P));
    GruForward(dec, dec_in, h, rec.dec);
    h = rec.dec.h;

    AttendStep(aw, h, tape.context, tape.memory, align, rec);
    align = rec.alignment;
    summary = rec.summary;

    rec.out_in.resize(D + W);
    std::copy(h.begin(), h.end(), rec.out_in.begin());
    std::copy(summary.begin(), summary.end(), rec.out_in.begin() + static_cast<std::ptrdiff_t>(D));
    std::vector<double> mel(ob.begin(), ob.end());
    kernels::Gemv(ow, rec.out_in, mel);
    double logit = kernels::Dot(sw, rec.out_in) + sb;
    double prob = Sigmoid(logit);

    res.output.stop_logits.push_back(logit);
    res.output.stop_probs.push_back(prob);
    mels.push_back(mel);
    aligns.push_back(align);
    tape.steps.push_back(std::move(rec));

    if (teacher_mel) {
      auto row = teacher_mel->Row(i);
      prev_frame.assign(row.begin(), row.end());
    } else {
      prev_frame = mel;
      if (prob > cfg.stop_threshold) break;
    }
  }

  res.output.mel = Matrix(mels.size(), M);
  res.output.alignments = Matrix(aligns.size(), T);
  for (std::size_t i = 0; i < mels.size(); ++i) {
    std::copy(mels[i].begin(), mels[i].end(), res.output.mel.Row(i).begin());
    std::copy(aligns[i].begin(), aligns[i].end(), res.output.alignments.Row(i).begin());
  }
  if (teacher_mel) {
    tape.target_mel = *teacher_mel;
    tape.target_stops = teacher_stops ? *teacher_stops : DefaultStopTargets(teacher_mel->rows());
  }
  tape.output = res.output;
  return res;
}

LossTerms Loss(const SynthOutput &out, const Matrix &target_mel,
               std::span<const double> target_stops) {
  if (out.mel.rows() != target_mel.rows() || out.mel.cols() != target_mel.cols() ||
      target_stops.size() != out.stop_logits.size() || target_mel.rows() == 0)
    throw Error(ErrorCode::kShapeMismatch, "prediction has " + std::to_string(out.mel.rows()) +
                                               " frames, target " +
                                               std::to_string(target_mel.rows()));
  LossTerms l;
  const auto &a = out.mel.data(), &b = target_mel.data();
  for (std::size_t i = 0; i < a.size(); ++i) l.mel_mse += (a[i] - b[i]) * (a[i] - b[i]);
  l.mel_mse /= static_cast<double>(a.size());
  for (std::size_t i = 0; i < target_stops.size(); ++i) {
    double z = out.stop_logits[i], y = target_stops[i];
    l.stop_bce += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
  }
  l.stop_bce /= static_cast<double>(target_stops.size());
  return l;
}

namespace {

double GuideWeight(std::size_t i, std::size_t j, std::size_t To, std::size_t T, double width) {
  double x = (T > 1 ? static_cast<double>(j) / static_cast<double>(T - 1) : 0.0) -
             (To > 1 ? static_cast<double>(i) / static_cast<double>(To - 1) : 0.0);
  return 1.0 - std::exp(-x * x / (2.0 * width * width));
}

// d(mask * tanh(a)) / da for a stored activation mask * tanh(a).
double TanhGrad(const std::vector<double> &act, const std::vector<double> &mask, std::size_t i) {
  if (mask.empty()) return 1.0 - act[i] * act[i];
  if (mask[i] == 0.0) return 0.0;
  double t = act[i] / mask[i];
  return mask[i] * (1.0 - t * t);
}

}  // namespace

Gradients Backward(const TrainingTape &tape, const ParameterStore &params) {
  if (tape.params_id != params.id() || tape.params_generation != params.generation())
    throw Error(ErrorCode::kStaleTape,
                "tape was recorded against different parameters; run forward again");
  if (!tape.teacher_forced)
    throw Error(ErrorCode::kInvalidArgument, "backward needs a teacher-forced tape");

  const SynthConfig &cfg = tape.cfg;
  const std::size_t T = tape.context.rows(), To = tape.steps.size();
  const std::size_t M = cfg.n_mels, D = cfg.decoder_dim, W = cfg.context_dim();
  const std::size_t P = cfg.prenet_dim, A = cfg.attention_dim, C = cfg.location_channels;
  const std::size_t K = cfg.location_kernel, pad = K / 2, H = cfg.encoder_dim / 2;

  Gradients out;
  out.grads = params.ZerosLike();
  ParameterStore &g = out.grads;
  out.loss = Loss(tape.output, tape.target_mel, tape.target_stops).total();
  const double guide = cfg.guided_attention_weight;
  const double guide_scale = guide / static_cast<double>(To * T);
  if (guide > 0.0)
    out.loss += guide * GuidedAttentionPenalty(tape.output.alignments, cfg.guided_attention_width);

  ConstMatrixView pw1 = params.Get("prenet.W1").View(), pw2 = params.Get("prenet.W2").View();
  ConstMatrixView ow = params.Get("out.W").View();
  auto sw = params.Get("stop.w").Span();
  GruWeights dec(params, "dec");
  AttnWeights aw(params);

  MatrixView g_pw1 = g.Mutable("prenet.W1").View(), g_pw2 = g.Mutable("prenet.W2").View();
  auto g_pb1 = g.Mutable("prenet.b1").Span(), g_pb2 = g.Mutable("prenet.b2").Span();
  MatrixView g_ow = g.Mutable("out.W").View();
  auto g_ob = g.Mutable("out.b").Span();
  auto g_sw = g.Mutable("stop.w").Span();
  double &g_sb = g.Mutable("stop.b").data[0];
  GruGrads g_dec(g, "dec");
  MatrixView g_wq = g.Mutable("attn.Wq").View(), g_wm = g.Mutable("attn.Wm").View();
  MatrixView g_wl = g.Mutable("attn.Wl").View(), g_loc = g.Mutable("attn.loc").View();
  auto g_ab = g.Mutable("attn.b").Span(), g_v = g.Mutable("attn.v").Span();

  const double mel_scale = 2.0 / static_cast<double>(To * M);
  const double stop_scale = 1.0 / static_cast<double>(To);

  Matrix d_context(T, W), d_memory(T, A);
  std::vector<double> dh_next(D, 0.0), ds_next(W, 0.0), dalign_next(T, 0.0);
  std::vector<double> dmel(M), dout(D + W), dh(D), ds(W), dalign(T), de(T);
  std::vector<double> dpre(A), dq_pre(A), dloc(C), dx(P + W), dh_prev(D);
  std::vector<double> dp2(P), dp1(P);

  for (std::size_t i = To; i-- > 0;) {
    const StepRecord &r = tape.steps[i];
    auto pred = tape.output.mel.Row(i), tgt = tape.target_mel.Row(i);
    for (std::size_t m = 0; m < M; ++m) dmel[m] = mel_scale * (pred[m] - tgt[m]);
    double dlogit = stop_scale * (tape.output.stop_probs[i] - tape.target_stops[i]);

    std::fill(dout.begin(), dout.end(), 0.0);
    kernels::GemvT(ow, dmel, dout);
    kernels::Axpy(dlogit, sw, dout);
    kernels::Ger(g_ow, 1.0, dmel, r.out_in);
    kernels::Axpy(1.0, dmel, g_ob);
    kernels::Axpy(dlogit, r.out_in, g_sw);
    g_sb += dlogit;

    for (std::size_t d = 0; d < D; ++d) dh[d] = dout[d] + dh_next[d];
    for (std::size_t w = 0; w < W; ++w) ds[w] = dout[D + w] + ds_next[w];

    // summary = sum_j a_j C_j
    for (std::size_t j = 0; j < T; ++j) {
      dalign[j] = dalign_next[j] + kernels::Dot(ds, tape.context.Row(j));
      if (guide > 0.0)
        dalign[j] += guide_scale * GuideWeight(i, j, To, T, cfg.guided_attention_width);
      kernels::Axpy(r.alignment[j], ds, d_context.Row(j));
    }
    double mean = 0.0;
    for (std::size_t j = 0; j < T; ++j) mean += r.alignment[j] * dalign[j];
    for (std::size_t j = 0; j < T; ++j) de[j] = r.alignment[j] * (dalign[j] - mean);

    std::fill(dq_pre.begin(), dq_pre.end(), 0.0);
    std::fill(dalign_next.begin(), dalign_next.end(), 0.0);
    for (std::size_t j = 0; j < T; ++j) {
      auto hid = r.hidden.Row(j);
      kernels::Axpy(de[j], hid, g_v);
      for (std::size_t a = 0; a < A; ++a) dpre[a] = de[j] * aw.v[a] * (1.0 - hid[a] * hid[a]);
      kernels::Axpy(1.0, dpre, dq_pre);
      kernels::Axpy(1.0, dpre, d_memory.Row(j));
      kernels::Ger(g_wl, 1.0, dpre, r.loc.Row(j));
      std::fill(dloc.begin(), dloc.end(), 0.0);
      kernels::GemvT(aw.wl, dpre, dloc);
      for (std::size_t c = 0; c < C; ++c)
        for (std::size_t k = 0; k < K; ++k) {
          std::ptrdiff_t src =
              static_cast<std::ptrdiff_t>(j + k) - static_cast<std::ptrdiff_t>(pad);
          if (src < 0 || src >= static_cast<std::ptrdiff_t>(T)) continue;
          auto s = static_cast<std::size_t>(src);
          g_loc(c, k) += dloc[c] * r.prev_alignment[s];
          dalign_next[s] += dloc[c] * aw.loc(c, k);
        }
    }
    kernels::Axpy(1.0, dq_pre, g_ab);
    kernels::Ger(g_wq, 1.0, dq_pre, r.dec.h);
    kernels::GemvT(aw.wq, dq_pre, dh);

    std::fill(dx.begin(), dx.end(), 0.0);
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    GruBackward(dec, g_dec, r.dec, dh, dx, dh_prev);
    dh_next = dh_prev;
    std::copy(dx.begin() + static_cast<std::ptrdiff_t>(P), dx.end(), ds_next.begin());

    for (std::size_t p = 0; p < P; ++p) dp2[p] = dx[p] * TanhGrad(r.p2, r.mask2, p);
    kernels::Ger(g_pw2, 1.0, dp2, r.p1);
    kernels::Axpy(1.0, dp2, g_pb2);
    std::fill(dp1.begin(), dp1.end(), 0.0);
    kernels::GemvT(pw2, dp2, dp1);
    for (std::size_t p = 0; p < P; ++p) dp1[p] *= TanhGrad(r.p1, r.mask1, p);
    kernels::Ger(g_pw1, 1.0, dp1, r.prev_frame);
    kernels::Axpy(1.0, dp1, g_pb1);
  }
  (void)pw1;

  // memory_j = Wm C_j
  for (std::size_t j = 0; j < T; ++j) {
    kernels::Ger(g_wm, 1.0, d_memory.Row(j), tape.context.Row(j));
    kernels::GemvT(aw.wm, d_memory.Row(j), d_context.Row(j));
  }

  // Context rows are [encoder | speaker | language]; the speaker vector is an
  // input, not a parameter.
  auto g_lang = g.Mutable("language").View().Row(static_cast<std::size_t>(tape.language_id));
  Matrix d_enc(T, 2 * H);
  for (std::size_t j = 0; j < T; ++j) {
    auto row = d_context.Row(j);
    std::copy_n(row.begin(), 2 * H, d_enc.Row(j).begin());
    for (std::size_t l = 0; l < cfg.language_dim; ++l)
      g_lang[l] += row[2 * H + cfg.speaker_dim + l];
  }

  GruWeights fwd(params, "enc_fwd"), bwd(params, "enc_bwd");
  GruGrads g_fwd(g, "enc_fwd"), g_bwd(g, "enc_bwd");
  Matrix d_emb(T, cfg.input_dim());
  std::vector<double> carry(H, 0.0), dhs(H), dprev(H);
  for (std::size_t t = T; t-- > 0;) {
    for (std::size_t k = 0; k < H; ++k) dhs[k] = d_enc(t, k) + carry[k];
    std::fill(dprev.begin(), dprev.end(), 0.0);
    GruBackward(fwd, g_fwd, tape.enc_fwd[t], dhs, d_emb.Row(t), dprev);
    carry = dprev;
  }
  std::fill(carry.begin(), carry.end(), 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < H; ++k) dhs[k] = d_enc(t, H + k) + carry[k];
    std::fill(dprev.begin(), dprev.end(), 0.0);
    GruBackward(bwd, g_bwd, tape.enc_bwd[t], dhs, d_emb.Row(t), dprev);
    carry = dprev;
  }

  MatrixView g_table = g.Mutable("embedding").View();
  for (std::size_t t = 0; t < T; ++t) {
    auto row = g_table.Row(static_cast<std::size_t>(tape.phoneme_ids[t]));
    for (std::size_t e = 0; e < cfg.phoneme_embed_dim; ++e) row[e] += d_emb(t, e);
  }
  return out;
}

double DatasetLoss(const std::vector<Utterance> &data, const SynthConfig &cfg,
                   const ParameterStore &params) {
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "empty training set");
  double total = 0.0;
  for (const Utterance &u : data) {
    auto stops = DefaultStopTargets(u.mel.rows());
    auto fr = Forward(u.input, u.speaker, u.language_id, cfg, params, &u.mel, &stops);
    total += Loss(fr.output, u.mel, stops).total();
  }
  return total / static_cast<double>(data.size());
}

std::vector<double> Train(const std::vector<Utterance> &data, const SynthConfig &cfg,
                          ParameterStore &params, const TrainOptions &opts) {
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "empty training set");
  Adam adam(opts.adam);
  Rng dropout_rng(opts.seed);
  std::vector<double> losses;
  const double inv = 1.0 / static_cast<double>(data.size());
  for (int step = 0; step < opts.steps; ++step) {
    ParameterStore total = params.ZerosLike();
    double loss = 0.0;
    for (const Utterance &u : data) {
      auto stops = DefaultStopTargets(u.mel.rows());
      auto fr =
          Forward(u.input, u.speaker, u.language_id, cfg, params, &u.mel, &stops, &dropout_rng);
      Gradients gr = Backward(fr.tape, params);
      loss += gr.loss * inv;
      for (const auto &[name, t] : gr.grads.tensors())
        kernels::Axpy(inv, t.Span(), total.Mutable(name).Span());
    }
    losses.push_back(loss);
    adam.Step(params, total);
  }
  return losses;
}

double GuidedAttentionPenalty(const Matrix &alignments, double width) {
  const std::size_t To = alignments.rows(), T = alignments.cols();
  if (To == 0 || T == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < To; ++i)
    for (std::size_t j = 0; j < T; ++j) total += alignments(i, j) * GuideWeight(i, j, To, T, width);
  return total / static_cast<double>(To * T);
}

double DiagonalMass(const Matrix &alignments, double radius) {
  const std::size_t To = alignments.rows(), T = alignments.cols();
  if (To == 0 || T == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < To; ++i) {
    double center =
        To > 1 ? static_cast<double>(i) * static_cast<double>(T - 1) / static_cast<double>(To - 1)
               : 0.0;
    for (std::size_t j = 0; j < T; ++j)
      if (std::abs(static_cast<double>(j) - center) <= radius) total += alignments(i, j);
  }
  return total / static_cast<double>(To);
}

void SaveCheckpoint(const std::string &path, const SynthConfig &cfg, const ParameterStore &params) {
  CheckParameters(cfg, params);
  TensorMap m = params.tensors();
  cfg.ToTensors(m);
  WriteCheckpoint(path, m);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  TensorMap m = ReadCheckpoint(path);
  Checkpoint ck;
  ck.cfg = SynthConfig::FromTensors(m);
  for (const auto &[name, t] : m) {
    if (name.rfind("config.", 0) == 0) continue;
    ck.params.Add(name, t.shape).data = t.data;
  }
  CheckParameters(ck.cfg, ck.params);
  return ck;
}

TrainOptions TrainOptions::FromConfig(const Config &c) {
  TrainOptions o;
  o.steps = c.Get<int>("synth.steps", o.steps);
  o.adam.learning_rate = c.Get<double>("synth.learning_rate", o.adam.learning_rate);
  o.adam.clip_norm = c.Get<double>("synth.clip_norm", o.adam.clip_norm);
  o.seed = c.Get<std::uint64_t>("synth.train_seed", o.seed);
  return o;
}

}  // namespace cltts::synth
