// tests/synth-test.cc

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

#include <algorithm>
#include <cmath>

#include "cltts/base/error.h"
#include "cltts/base/rng.h"
#include "cltts/frontend/phoneme.h"
#include "cltts/synth/synthesizer.h"
#include "doctest.h"
#include "test-util.h"

using namespace cltts;
using namespace cltts::synth;
using frontend::PhonemeToken;
using frontend::ToneStressMark;

namespace {

SynthConfig TinyConfig() {
  SynthConfig c;
  c.phoneme_embed_dim = 4;
  c.encoder_dim = 6;
  c.decoder_dim = 5;
  c.attention_dim = 4;
  c.prenet_dim = 3;
  c.speaker_dim = 3;
  c.language_dim = 2;
  c.n_mels = 3;
  c.location_channels = 2;
  c.location_kernel = 3;
  c.init_scale = 0.5;
  c.init_seed = 3;
  c.max_decoder_steps = 20;
  return c;
}

frontend::InputSequence RandomSequence(Rng &rng, std::size_t T, frontend::Language lang) {
  std::vector<PhonemeToken> toks;
  const auto V = frontend::PhonemeInventory::Shared().size();
  for (std::size_t t = 0; t < T; ++t)
    toks.push_back({static_cast<int>(rng.Below(V)), static_cast<ToneStressMark>(rng.Below(7))});
  return frontend::MakeInputSequence(toks, lang);
}

ErrorCode CodeOf(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

void CheckAllGradients(SynthConfig cfg, std::uint64_t seed, std::size_t T, std::size_t frames,
                       bool dropout = false) {
  Rng rng(seed);
  cfg.init_seed = seed;
  auto params = InitParameters(cfg);
  auto seq = RandomSequence(rng, T, frontend::Language::kMandarin);
  auto spk = cltts::testing::RandomVector(rng, cfg.speaker_dim, 1.0);
  Matrix mel(frames, cfg.n_mels);
  for (double &x : mel.data()) x = rng.Normal();
  std::vector<double> stops(frames);
  for (double &s : stops) s = rng.Below(2) ? 1.0 : 0.0;
  const Rng mask_rng(seed + 100);
  auto run = [&](const ParameterStore &p) {
    Rng r = mask_rng;
    return Forward(seq, spk, 1, cfg, p, &mel, &stops, dropout ? &r : nullptr);
  };
  auto fr = run(params);
  auto g = Backward(fr.tape, params);
  auto loss = [&] {
    auto out = run(params);
    LossTerms l = Loss(out.output, mel, stops);
    double extra = cfg.guided_attention_weight *
                   GuidedAttentionPenalty(out.output.alignments, cfg.guided_attention_width);
    return l.total() + extra;
  };
  CHECK(g.loss == doctest::Approx(loss()).epsilon(1e-12));
  for (const auto &r : cltts::testing::CheckGradients(params, g.grads, loss, 1e-4)) {
    INFO(r.name);
    CHECK(r.worst < 1e-4);
  }
}

std::vector<Utterance> ToyDataset(const SynthConfig &cfg, std::uint64_t seed) {
  Rng rng(seed);
  const auto V = frontend::PhonemeInventory::Shared().size();
  Matrix proto(V, cfg.n_mels);
  for (double &x : proto.data()) x = rng.Normal();
  std::vector<Utterance> data;
  for (int u = 0; u < 3; ++u) {
    std::size_t T = 3 + rng.Below(3);
    std::vector<PhonemeToken> toks;
    for (std::size_t t = 0; t < T; ++t) toks.push_back({static_cast<int>(rng.Below(V)), {}});
    Utterance utt;
    utt.input = frontend::MakeInputSequence(toks, frontend::Language::kEnglish);
    utt.speaker = cltts::testing::RandomVector(rng, cfg.speaker_dim, 0.3);
    utt.mel = Matrix(2 * T, cfg.n_mels);
    for (std::size_t t = 0; t < 2 * T; ++t)
      for (std::size_t m = 0; m < cfg.n_mels; ++m) utt.mel(t, m) = proto(toks[t / 2].phoneme_id, m);
    data.push_back(std::move(utt));
  }
  return data;
}

}  // namespace

TEST_CASE("config validation") {
  SynthConfig c;
  CHECK_NOTHROW(c.Validate());
  CHECK(c.speaker_dim == 128);
  c.stop_threshold = 1.0;
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidArgument);
  c = SynthConfig{};
  c.encoder_dim = 7;
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidArgument);
  c = SynthConfig{};
  c.n_mels = 0;
  CHECK(CodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("initialization is seeded") {
  auto cfg = TinyConfig();
  auto a = InitParameters(cfg), b = InitParameters(cfg);
  for (const auto &name : a.Names()) CHECK(a.Get(name) == b.Get(name));
  cfg.init_seed = 4;
  CHECK_FALSE(InitParameters(cfg).Get("embedding") == a.Get("embedding"));
  for (const auto &[name, t] : a.tensors())
    for (double x : t.data) CHECK(std::abs(x) <= cfg.init_scale);
}

TEST_CASE("embedded inputs") {
  SynthConfig cfg = TinyConfig();
  cfg.phoneme_embed_dim = 8;
  auto params = InitParameters(cfg);
  auto seq = frontend::MakeInputSequence(
      {{3, ToneStressMark::kTone2}, {3, ToneStressMark::kStress1}}, frontend::Language::kMandarin);
  Matrix e = EmbedInputs(seq, params);
  REQUIRE(e.cols() == 15);
  auto m0 = frontend::EncodeMark(ToneStressMark::kTone2);
  for (std::size_t k = 0; k < 7; ++k) CHECK(e(0, 8 + k) == m0[k]);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(e(0, k) == e(1, k));
    CHECK(e(0, k) == params.Get("embedding").View()(3, k));
  }
  auto bad = frontend::MakeInputSequence({{999, {}}}, frontend::Language::kEnglish);
  CHECK(CodeOf([&] { EmbedInputs(bad, params); }) == ErrorCode::kIdOutOfRange);
}

TEST_CASE("encoder with zero weights, single step and mirrored parameters") {
  auto cfg = TinyConfig();
  Rng rng(9);
  auto seq = RandomSequence(rng, 6, frontend::Language::kEnglish);
  auto zero = InitParameters(cfg);
  zero.SetZero();
  Matrix zero_out = Encode(EmbedInputs(seq, zero), cfg, zero);
  for (double x : zero_out.data()) CHECK(x == 0.0);

  auto params = InitParameters(cfg);
  auto one = RandomSequence(rng, 1, frontend::Language::kEnglish);
  Matrix e1 = Encode(EmbedInputs(one, params), cfg, params);
  CHECK(e1.rows() == 1);
  CHECK(e1.cols() == cfg.encoder_dim);

  // Swap the directions and reverse the input: rows come back reversed with
  // the halves exchanged.
  ParameterStore mirrored = params;
  for (const auto &name : params.Names()) {
    if (name.rfind("enc_fwd.", 0) == 0) {
      std::string other = "enc_bwd." + name.substr(8);
      mirrored.Mutable(name) = params.Get(other);
      mirrored.Mutable(other) = params.Get(name);
    }
  }
  Matrix emb = EmbedInputs(seq, params);
  Matrix rev(emb.rows(), emb.cols());
  for (std::size_t t = 0; t < emb.rows(); ++t)
    std::copy(emb.Row(t).begin(), emb.Row(t).end(), rev.Row(emb.rows() - 1 - t).begin());
  Matrix a = Encode(emb, cfg, params), b = Encode(rev, cfg, mirrored);
  const std::size_t H = cfg.encoder_dim / 2, T = a.rows();
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < H; ++k) {
      CHECK(b(T - 1 - t, k) == doctest::Approx(a(t, H + k)).epsilon(1e-14));
      CHECK(b(T - 1 - t, H + k) == doctest::Approx(a(t, k)).epsilon(1e-14));
    }
}

TEST_CASE("conditioning width and locality on random inputs") {
  SynthConfig cfg;
  cfg.encoder_dim = 16;
  CHECK(cfg.context_dim() == 148);
  auto params = InitParameters(cfg);
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto seq = RandomSequence(rng, 1 + rng.Below(8), frontend::Language::kEnglish);
    Matrix enc = Encode(EmbedInputs(seq, params), cfg, params);
    auto s1 = cltts::testing::RandomVector(rng, 128, 1.0);
    auto s2 = cltts::testing::RandomVector(rng, 128, 1.0);
    int lang = static_cast<int>(rng.Below(2));
    Matrix a = Condition(enc, s1, lang, cfg, params), b = Condition(enc, s2, lang, cfg, params);
    REQUIRE(a.cols() == 148);
    for (std::size_t t = 0; t < a.rows(); ++t) {
      for (std::size_t k = 0; k < 16; ++k) {
        CHECK(a(t, k) == enc(t, k));
        CHECK(b(t, k) == enc(t, k));
      }
      for (std::size_t k = 0; k < 128; ++k) {
        CHECK(a(t, 16 + k) == s1[k]);
        CHECK(b(t, 16 + k) == s2[k]);
      }
      for (std::size_t k = 0; k < 4; ++k) {
        CHECK(a(t, 144 + k) == params.Get("language").View()(lang, k));
        CHECK(a(t, 144 + k) == b(t, 144 + k));
      }
    }
  }
  std::vector<double> zero(128, 0.0), wrong(127, 0.0);
  Matrix enc(2, 16);
  Matrix z = Condition(enc, zero, 0, cfg, params);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t k = 16; k < 144; ++k) CHECK(z(t, k) == 0.0);
  CHECK(CodeOf([&] { Condition(enc, wrong, 0, cfg, params); }) == ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([&] { Condition(enc, zero, 2, cfg, params); }) == ErrorCode::kIdOutOfRange);
}

TEST_CASE("attention softmax") {
  std::vector<double> flat(7, 0.3);
  for (double a : Softmax(flat)) CHECK(a == doctest::Approx(1.0 / 7));
  std::vector<double> peak = {0.1, -0.4, 100.0, 0.2};
  auto p = Softmax(peak);
  CHECK(p[2] >= 1 - 1e-6);
  auto cfg = TinyConfig();
  auto params = InitParameters(cfg);
  Rng rng(12);
  Matrix ctx(5, cfg.context_dim());
  for (double &x : ctx.data()) x = rng.Normal();
  std::vector<double> prev(5, 0.2);
  auto q = cltts::testing::RandomVector(rng, cfg.decoder_dim, 1.0);
  auto r = Attend(q, ctx, prev, cfg, params);
  double sum = 0;
  for (double a : r.alignment) sum += a;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 0; k < ctx.cols(); ++k) {
    double s = 0;
    for (std::size_t t = 0; t < 5; ++t) s += r.alignment[t] * ctx(t, k);
    CHECK(r.summary[k] == doctest::Approx(s).epsilon(1e-12));
  }
  // A saturated energy gives exactly the corresponding row.
  ParameterStore hot = params;
  hot.SetZero();
  hot.Mutable("attn.v").data.assign(cfg.attention_dim, 0.0);
  hot.Mutable("attn.v").data[0] = 1e4;
  hot.Mutable("attn.Wm").View()(0, 0) = 1.0;
  Matrix one_hot(3, cfg.context_dim());
  one_hot(1, 0) = 1.0;
  for (std::size_t k = 1; k < cfg.context_dim(); ++k) one_hot(1, k) = 0.5 * k;
  std::vector<double> p3(3, 1.0 / 3);
  auto h = Attend(std::vector<double>(cfg.decoder_dim, 0.0), one_hot, p3, cfg, hot);
  CHECK(h.alignment[1] == 1.0);
  for (std::size_t k = 0; k < cfg.context_dim(); ++k) CHECK(h.summary[k] == one_hot(1, k));
}

TEST_CASE("forward lengths, stop bias and alignment rows") {
  auto cfg = TinyConfig();
  auto params = InitParameters(cfg);
  Rng rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    auto seq = RandomSequence(rng, 1 + rng.Below(6), frontend::Language::kEnglish);
    auto spk = cltts::testing::RandomVector(rng, cfg.speaker_dim, 1.0);
    Matrix mel(1 + rng.Below(9), cfg.n_mels);
    auto teacher = Forward(seq, spk, 0, cfg, params, &mel);
    CHECK(teacher.output.mel.rows() == mel.rows());
    CHECK(teacher.output.alignments.rows() == mel.rows());
    CHECK(teacher.output.alignments.cols() == seq.length());
    auto free = Forward(seq, spk, 0, cfg, params);
    CHECK(free.output.mel.rows() <= cfg.max_decoder_steps);
    CHECK(free.output.mel.rows() >= 1);
    for (const auto *out : {&teacher.output, &free.output}) {
      for (std::size_t i = 0; i < out->alignments.rows(); ++i) {
        double s = 0;
        for (double a : out->alignments.Row(i)) {
          CHECK(a >= 0.0);
          s += a;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
      }
      for (double p : out->stop_probs) CHECK((p > 0.0 && p < 1.0));
    }
  }
  params.Mutable("stop.b").data[0] = 10.0;
  auto seq = RandomSequence(rng, 4, frontend::Language::kEnglish);
  std::vector<double> spk(cfg.speaker_dim, 0.0);
  CHECK(Forward(seq, spk, 0, cfg, params).output.mel.rows() == 1);
  params.Mutable("stop.b").data[0] = -10.0;
  params.Mutable("stop.w").data.assign(params.Get("stop.w").size(), 0.0);
  CHECK(Forward(seq, spk, 0, cfg, params).output.mel.rows() == cfg.max_decoder_steps);
}

TEST_CASE("loss terms") {
  SynthOutput out;
  out.mel = Matrix(3, 2);
  out.stop_probs = {1e-12, 1e-12, 1 - 1e-12};
  out.stop_logits = {-27.6, -27.6, 27.6};
  Matrix target = out.mel;
  auto stops = DefaultStopTargets(3);
  CHECK(stops == std::vector<double>{0, 0, 1});
  CHECK(Loss(out, target, stops).total() < 1e-10);
  for (double &x : target.data()) x = 0.7;
  CHECK(Loss(out, target, stops).mel_mse == doctest::Approx(0.49));
  for (double &x : target.data()) x = 1.4;
  CHECK(Loss(out, target, stops).mel_mse == doctest::Approx(4 * 0.49));
  Matrix wrong(2, 2);
  CHECK(CodeOf([&] { Loss(out, wrong, stops); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("gradients match central differences") {
  SUBCASE("tiny") { CheckAllGradients(TinyConfig(), 21, 4, 5); }
  SUBCASE("single token") { CheckAllGradients(TinyConfig(), 22, 1, 3); }
  SUBCASE("full location kernel") {
    auto cfg = TinyConfig();
    cfg.location_kernel = 31;
    CheckAllGradients(cfg, 23, 5, 4);
  }
  SUBCASE("guided attention") {
    auto cfg = TinyConfig();
    cfg.guided_attention_weight = 0.7;
    CheckAllGradients(cfg, 24, 5, 5);
  }
  SUBCASE("prenet dropout") {
    auto cfg = TinyConfig();
    cfg.prenet_dropout = 0.3;
    CheckAllGradients(cfg, 25, 3, 4, true);
  }
}

TEST_CASE("unused language row gets no gradient; zero-loss point has zero gradient") {
  auto cfg = TinyConfig();
  auto params = InitParameters(cfg);
  Rng rng(30);
  auto seq = RandomSequence(rng, 3, frontend::Language::kEnglish);
  auto spk = cltts::testing::RandomVector(rng, cfg.speaker_dim, 1.0);
  Matrix mel(4, cfg.n_mels);
  for (double &x : mel.data()) x = rng.Normal();
  auto fr = Forward(seq, spk, 0, cfg, params, &mel);
  auto g = Backward(fr.tape, params);
  for (std::size_t k = 0; k < cfg.language_dim; ++k)
    CHECK(g.grads.Get("language").View()(1, k) == 0.0);

  // Mel targets equal to the prediction and stop targets at the
  // probabilities: only the stop BCE remains, at its minimum.
  ParameterStore p = params;
  p.Mutable("stop.w").data.assign(p.Get("stop.w").size(), 0.0);
  p.Mutable("stop.b").data[0] = 0.0;
  Matrix zero_mel(4, cfg.n_mels);
  auto first = Forward(seq, spk, 0, cfg, p, &zero_mel);
  // Free-run consistency: feed the model its own output as teacher frames.
  Matrix self = first.output.mel;
  for (int it = 0; it < 30; ++it) {
    Matrix prev = self;
    prev = Forward(seq, spk, 0, cfg, p, &self).output.mel;
    if (prev == self) break;
    self = prev;
  }
  std::vector<double> half(4, 0.5);
  auto fixed = Forward(seq, spk, 0, cfg, p, &self, &half);
  REQUIRE(Loss(fixed.output, self, half).mel_mse < 1e-20);
  auto gz = Backward(fixed.tape, p);
  double worst = 0;
  for (const auto &[name, t] : gz.grads.tensors())
    for (double x : t.data) worst = std::max(worst, std::abs(x));
  CHECK(worst < 1e-8);
}

TEST_CASE("stale tapes are rejected") {
  auto cfg = TinyConfig();
  auto params = InitParameters(cfg);
  Rng rng(31);
  auto seq = RandomSequence(rng, 3, frontend::Language::kEnglish);
  std::vector<double> spk(cfg.speaker_dim, 0.1);
  Matrix mel(3, cfg.n_mels);
  auto fr = Forward(seq, spk, 0, cfg, params, &mel);
  auto other = InitParameters(cfg);
  CHECK(CodeOf([&] { Backward(fr.tape, other); }) == ErrorCode::kStaleTape);
  params.Mutable("out.b").data[0] += 1.0;
  CHECK(CodeOf([&] { Backward(fr.tape, params); }) == ErrorCode::kStaleTape);
  auto free = Forward(seq, spk, 0, cfg, params);
  CHECK_THROWS_AS(Backward(free.tape, params), Error);
}

TEST_CASE("training is deterministic, lr 0 is flat, loss drops") {
  auto cfg = TinyConfig();
  cfg.init_scale = 0.1;
  auto data = ToyDataset(cfg, 40);
  TrainOptions o;
  o.steps = 60;
  o.adam.learning_rate = 1e-2;
  auto p1 = InitParameters(cfg), p2 = InitParameters(cfg);
  auto c1 = Train(data, cfg, p1, o), c2 = Train(data, cfg, p2, o);
  CHECK(c1 == c2);
  for (const auto &name : p1.Names()) CHECK(p1.Get(name) == p2.Get(name));
  CHECK(DatasetLoss(data, cfg, p1) < 0.5 * c1.front());

  TrainOptions still = o;
  still.adam.learning_rate = 0.0;
  auto p3 = InitParameters(cfg);
  auto flat = Train(data, cfg, p3, still);
  for (double l : flat) CHECK(l == flat.front());
  CHECK(flat.front() == c1.front());
  CHECK(CodeOf([&] { Train({}, cfg, p3, o); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("checkpoint round trip") {
  cltts::testing::TempDir dir("synth");
  auto cfg = TinyConfig();
  cfg.guided_attention_weight = 0.25;
  auto params = InitParameters(cfg);
  SaveCheckpoint(dir.File("a.ckpt"), cfg, params);
  auto ck = LoadCheckpoint(dir.File("a.ckpt"));
  CHECK(ck.cfg.n_mels == cfg.n_mels);
  CHECK(ck.cfg.location_kernel == cfg.location_kernel);
  CHECK(ck.cfg.guided_attention_weight == cfg.guided_attention_weight);
  CHECK(ck.cfg.stop_threshold == cfg.stop_threshold);
  CHECK(ck.params.Names() == params.Names());
  for (const auto &name : params.Names()) CHECK(ck.params.Get(name) == params.Get(name));
}
