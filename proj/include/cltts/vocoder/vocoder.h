// include/cltts/vocoder/vocoder.h

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
#include <span>
#include <string>
#include <vector>

#include "cltts/base/adam.h"
#include "cltts/base/config.h"
#include "cltts/base/tensor.h"
#include "cltts/dsp/audio.h"

namespace cltts::vocoder {

// Dilated causal convolution stack over 8-bit mu-law codes. Layer l uses
// dilation dilation_cycle[l % cycle length]; every layer has a gated
// activation conditioned on the mel track and feeds both the residual path
// and the summed skip output.
struct VocoderConfig {
  std::size_t n_layers = 30;
  std::size_t kernel_size = 2;
  std::vector<std::size_t> dilation_cycle = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
  std::size_t residual_channels = 32;
  std::size_t skip_channels = 64;
  std::size_t n_classes = 256;
  std::size_t n_mels = 80;
  std::size_t hop_length = 200;
  double init_scale = 0.05;
  std::uint64_t init_seed = 0;

  std::size_t Dilation(std::size_t layer) const {
    return dilation_cycle[layer % dilation_cycle.size()];
  }
  // Throws kInvalidArgument.
  void Validate() const;

  static VocoderConfig FromConfig(const Config &c);
  void ToTensors(TensorMap &out) const;
  static VocoderConfig FromTensors(const TensorMap &in);
};

// 1 + (kernel_size - 1) * sum of dilations.
std::size_t ReceptiveField(const VocoderConfig &cfg);

ParameterStore InitParameters(const VocoderConfig &cfg);

// Frame-rate features repeated hop times per frame.
class ConditioningTrack {
 public:
  ConditioningTrack() = default;
  ConditioningTrack(Matrix frames, std::size_t hop);

  std::size_t length() const { return frames_.rows() * hop_; }
  std::size_t n_mels() const { return frames_.cols(); }
  std::size_t hop() const { return hop_; }
  const Matrix &frames() const { return frames_; }
  std::size_t FrameOf(std::size_t sample) const { return sample / hop_; }
  std::span<const double> Row(std::size_t sample) const { return frames_.Row(sample / hop_); }
  // The explicit N x n_mels matrix.
  Matrix Materialize() const;

 private:
  Matrix frames_;
  std::size_t hop_ = 1;
};

ConditioningTrack UpsampleConditioning(const Matrix &mel, std::size_t hop);

// The code fed as the "previous sample" before position 0 (mu-law of 0).
inline constexpr int kStartCode = 128;

struct LayerRecord;

struct VocoderTape {
  VocoderTape();
  ~VocoderTape();
  VocoderTape(VocoderTape &&) noexcept;
  VocoderTape &operator=(VocoderTape &&) noexcept;

  std::uint64_t params_id = 0;
  std::uint64_t params_generation = 0;
  VocoderConfig cfg;
  std::vector<int> inputs;  // code fed at each position
  std::vector<int> targets;
  std::size_t loss_from = 0;
  ConditioningTrack cond;
  std::size_t cond_offset = 0;  // sample index of position 0 within cond
  std::vector<LayerRecord> layers;
  Matrix skip;    // N x skip
  Matrix hidden;  // N x skip, tanh
  Matrix logits;  // N x classes
};

struct VocoderForwardResult {
  Matrix logits;
  VocoderTape tape;
};

// Teacher-forced pass: logits at t see only codes[0..t-1] (kStartCode
// before the first). Throws kLengthMismatch when codes and cond differ in
// length, kOutOfRange for a code outside 0..n_classes-1.
VocoderForwardResult Forward(std::span<const int> codes, const ConditioningTrack &cond,
                             const VocoderConfig &cfg, const ParameterStore &params);

// Mean cross-entropy (nats) of logits against target codes. Throws
// kShapeMismatch.
double Loss(const Matrix &logits, std::span<const int> targets);

struct Gradients {
  ParameterStore grads;
  double loss = 0.0;
};

// Exact gradients of the mean cross-entropy over the tape's loss positions.
// Throws kStaleTape.
Gradients Backward(const VocoderTape &tape, const ParameterStore &params);

struct GenerateOptions {
  std::uint64_t seed = 0;
  double temperature = 1.0;  // below kArgmaxTemperature: argmax
};

inline constexpr double kArgmaxTemperature = 1e-6;

// Samples one code per conditioning sample. Throws kInvalidArgument for a
// non-positive temperature.
std::vector<int> GenerateCodes(const ConditioningTrack &cond, const VocoderConfig &cfg,
                               const ParameterStore &params, const GenerateOptions &opts);
dsp::Waveform Generate(const ConditioningTrack &cond, const VocoderConfig &cfg,
                       const ParameterStore &params, const GenerateOptions &opts,
                       int sample_rate = 16000);

struct TrainOptions {
  AdamOptions adam;
  int steps = 100;
  std::uint64_t seed = 0;
  // Loss positions per step, drawn at a seeded random offset; 0 or anything
  // >= the signal length trains on the whole signal every step.
  std::size_t chunk = 0;
  // Each fed code (not the start code) is moved by a uniform offset in
  // [-input_jitter, input_jitter] with probability jitter_prob. Targets are
  // left alone.
  int input_jitter = 0;
  double jitter_prob = 0.0;

  // vocoder.steps, vocoder.learning_rate, vocoder.clip_norm,
  // vocoder.train_seed, vocoder.chunk, vocoder.input_jitter,
  // vocoder.jitter_prob.
  static TrainOptions FromConfig(const Config &c);
};

// Teacher-forced Adam on the mu-law codes of audio. Returns the loss before
// each update. Throws kLengthMismatch unless audio length = mel frames * hop.
std::vector<double> Train(const dsp::Waveform &audio, const Matrix &mel, const VocoderConfig &cfg,
                          ParameterStore &params, const TrainOptions &opts);

// Teacher-forced mean cross-entropy over the whole signal.
double Evaluate(const dsp::Waveform &audio, const Matrix &mel, const VocoderConfig &cfg,
                const ParameterStore &params);

struct Checkpoint {
  VocoderConfig cfg;
  ParameterStore params;
};

void SaveCheckpoint(const std::string &path, const VocoderConfig &cfg,
                    const ParameterStore &params);
Checkpoint LoadCheckpoint(const std::string &path);

}  // namespace cltts::vocoder
