// include/cltts/synth/synthesizer.h

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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cltts/base/adam.h"
#include "cltts/base/config.h"
#include "cltts/base/rng.h"
#include "cltts/base/tensor.h"
#include "cltts/frontend/phoneme.h"

namespace cltts::synth {

// Toy attention sequence-to-sequence synthesizer:
//
//   [phoneme embedding | 7-D mark one-hot]
//     -> bidirectional GRU encoder (encoder_dim = 2 x per-direction width)
//     -> concat speaker vector and language embedding on every row
//     -> decoder loop: 2-layer tanh prenet on the previous frame,
//        GRU cell on [prenet | previous attention summary],
//        location-sensitive additive attention,
//        linear mel and stop heads on [decoder state | summary].
struct SynthConfig {
  std::size_t phoneme_embed_dim = 16;
  std::size_t encoder_dim = 32;  // even
  std::size_t decoder_dim = 64;
  std::size_t attention_dim = 32;
  std::size_t prenet_dim = 32;
  std::size_t speaker_dim = 128;
  std::size_t language_dim = 4;
  std::size_t n_mels = 80;
  std::size_t location_channels = 8;
  std::size_t location_kernel = 31;  // odd
  std::size_t max_decoder_steps = 400;
  double stop_threshold = 0.5;
  double init_scale = 0.05;
  std::uint64_t init_seed = 0;
  // Applied to both prenet layers during training only.
  double prenet_dropout = 0.0;
  // Optional training penalty on alignment mass far from the diagonal:
  // weight * mean_ij a_ij * (1 - exp(-(j/(T-1) - i/(T_out-1))^2 / (2 width^2))).
  // Zero keeps the objective at MSE + BCE.
  double guided_attention_weight = 0.0;
  double guided_attention_width = 0.2;

  std::size_t input_dim() const { return phoneme_embed_dim + frontend::kNumMarks; }
  std::size_t context_dim() const { return encoder_dim + speaker_dim + language_dim; }
  void Validate() const;

  static SynthConfig FromConfig(const Config &c);
  // Stored under "config.*" names inside checkpoints.
  void ToTensors(TensorMap &out) const;
  static SynthConfig FromTensors(const TensorMap &in);
};

inline constexpr std::size_t kNumLanguages = 2;

// Creates every parameter tensor for cfg, uniform(-init_scale, init_scale)
// from init_seed.
ParameterStore InitParameters(const SynthConfig &cfg);

// [embedding_table[id_t] | one_hot(mark_t)] per token. Throws kIdOutOfRange.
Matrix EmbedInputs(const frontend::InputSequence &seq, const ParameterStore &params);

// T x encoder_dim; row t = [forward state_t | backward state_t].
Matrix Encode(const Matrix &embedded, const SynthConfig &cfg, const ParameterStore &params);

// T x (encoder_dim + speaker_dim + language_dim). Throws kDimensionMismatch
// or kIdOutOfRange for a bad language id.
Matrix Condition(const Matrix &encoder_out, std::span<const double> speaker, int language_id,
                 const SynthConfig &cfg, const ParameterStore &params);

struct AttentionResult {
  std::vector<double> alignment;  // T, sums to 1
  std::vector<double> summary;    // context width
};

// Location-sensitive additive attention for one decoder query.
AttentionResult Attend(std::span<const double> query, const Matrix &context,
                       std::span<const double> prev_alignment, const SynthConfig &cfg,
                       const ParameterStore &params);

// Softmax-normalized alignment for precomputed energies (exposed so the
// saturation behaviour can be tested directly).
std::vector<double> Softmax(std::span<const double> energies);

struct SynthOutput {
  Matrix mel;  // T_out x n_mels
  std::vector<double> stop_probs;
  std::vector<double> stop_logits;
  Matrix alignments;  // T_out x T_in
};

struct StepRecord;
struct GruStep;

// Forward intermediates of one teacher-forced pass, sufficient for exact
// gradients. Bound to the parameter store and generation it was recorded
// with.
struct TrainingTape {
  TrainingTape();
  ~TrainingTape();
  TrainingTape(TrainingTape &&) noexcept;
  TrainingTape &operator=(TrainingTape &&) noexcept;

  std::uint64_t params_id = 0;
  std::uint64_t params_generation = 0;
  bool teacher_forced = false;
  SynthConfig cfg;
  std::vector<int> phoneme_ids;
  int language_id = 0;
  Matrix embedded;
  Matrix encoder_out;
  Matrix context;
  Matrix memory;  // context projected by attn.Wm, T x attention_dim
  std::vector<GruStep> enc_fwd, enc_bwd;
  std::vector<StepRecord> steps;
  Matrix target_mel;
  std::vector<double> target_stops;
  SynthOutput output;
};

struct ForwardResult {
  SynthOutput output;
  TrainingTape tape;
};

// Stop targets for a T-frame utterance: 0 everywhere, 1 on the last frame.
std::vector<double> DefaultStopTargets(std::size_t frames);

// Teacher forcing when teacher_mel is given (T_out = its row count, previous
// frames taken from it); otherwise free-running until sigmoid(stop) >
// stop_threshold or max_decoder_steps. A non-null dropout_rng enables
// prenet dropout (cfg.prenet_dropout) with masks drawn from it.
ForwardResult Forward(const frontend::InputSequence &seq, std::span<const double> speaker,
                      int language_id, const SynthConfig &cfg, const ParameterStore &params,
                      const Matrix *teacher_mel = nullptr,
                      const std::vector<double> *teacher_stops = nullptr,
                      Rng *dropout_rng = nullptr);

struct LossTerms {
  double mel_mse = 0.0;
  double stop_bce = 0.0;
  double total() const { return mel_mse + stop_bce; }
};

// Mean squared mel error plus mean binary cross-entropy of the stop head.
// Throws kShapeMismatch.
LossTerms Loss(const SynthOutput &out, const Matrix &target_mel,
               std::span<const double> target_stops);

struct Gradients {
  ParameterStore grads;
  double loss = 0.0;
};

// Exact gradients of Loss() (plus the guided attention term when its weight
// is non-zero) for the tape's teacher targets. Throws kStaleTape when params
// is not the store (or generation) the tape was recorded with.
Gradients Backward(const TrainingTape &tape, const ParameterStore &params);

struct Utterance {
  frontend::InputSequence input;
  std::vector<double> speaker;
  int language_id = 0;
  Matrix mel;
};

struct TrainOptions {
  AdamOptions adam;
  int steps = 100;
  std::uint64_t seed = 0;  // prenet dropout masks

  // synth.steps, synth.learning_rate, synth.clip_norm, synth.train_seed.
  static TrainOptions FromConfig(const Config &c);
};

// Full-batch Adam: each step averages the utterance losses and gradients
// (accumulated in utterance order). Returns the loss before each update,
// measured with the dropout masks used for that update.
std::vector<double> Train(const std::vector<Utterance> &data, const SynthConfig &cfg,
                          ParameterStore &params, const TrainOptions &opts);

// Mean loss over the dataset at the current parameters.
double DatasetLoss(const std::vector<Utterance> &data, const SynthConfig &cfg,
                   const ParameterStore &params);

// The guided attention penalty for one alignment matrix.
double GuidedAttentionPenalty(const Matrix &alignments, double width);

// Mean, over frames, of the alignment mass within +-radius input positions of
// the diagonal i * (T_in - 1) / (T_out - 1).
double DiagonalMass(const Matrix &alignments, double radius = 2.0);

struct Checkpoint {
  SynthConfig cfg;
  ParameterStore params;
};

void SaveCheckpoint(const std::string &path, const SynthConfig &cfg, const ParameterStore &params);
Checkpoint LoadCheckpoint(const std::string &path);

}  // namespace cltts::synth
