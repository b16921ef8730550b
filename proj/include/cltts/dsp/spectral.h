// include/cltts/dsp/spectral.h

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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cltts/base/config.h"
#include "cltts/base/tensor.h"
#include "cltts/dsp/audio.h"

namespace cltts::dsp {

struct StftParams {
  std::size_t frame_length = 800;
  std::size_t hop_length = 200;
  std::size_t fft_size = 1024;
  // Only the (periodic) Hann window is supported.

  std::size_t num_bins() const { return fft_size / 2 + 1; }
  // Throws kInvalidArgument unless 0 < hop <= frame <= fft.
  void Validate() const;
  std::size_t NumFrames(std::size_t num_samples) const;
  // Samples covered by num_frames frames.
  std::size_t SignalLength(std::size_t num_frames) const {
    return (num_frames - 1) * hop_length + frame_length;
  }
};

// Analysis defaults plus the silence segmentation settings. Every field can
// be overridden from the [dsp] section of a config file.
struct DspConfig {
  int sample_rate = 16000;
  StftParams stft;
  std::size_t n_mels = 80;
  double f_min = 50.0;
  double f_max = 7600.0;
  double mel_floor = 1e-5;
  int griffin_lim_iters = 60;
  double silence_db = -40.0;
  double min_silence_s = 0.3;
  double min_segment_s = 2.0;
  double max_segment_s = 12.0;

  static DspConfig FromConfig(const Config &c);
};

std::vector<double> HannWindow(std::size_t length);

// One-sided complex STFT, forward transform unnormalized. Frame t covers
// samples [t*hop, t*hop + frame_length), Hann-weighted and zero-padded to
// fft_size; no edge padding. Throws kTooShort.
std::vector<std::vector<std::complex<double>>> StftComplex(std::span<const double> x,
                                                           const StftParams &p);

// |StftComplex|, T x (fft_size/2 + 1).
Matrix Stft(const Waveform &w, const StftParams &p);

// Least-squares inverse: overlap-add of windowed inverse frames divided by
// the summed squared window (inverse FFT scaled by 1/fft_size). Samples no
// window touches are zero.
std::vector<double> InverseStft(const std::vector<std::vector<std::complex<double>>> &spec,
                                const StftParams &p);

class MelFilterbank {
 public:
  // Triangles with peak 1 on an HTK mel scale, n_mels centers between f_min
  // and f_max; adjacent triangles sum to one between the first and last
  // center.
  MelFilterbank(std::size_t n_mels, std::size_t fft_size, int sample_rate, double f_min,
                double f_max);

  std::size_t n_mels() const { return weights_.rows(); }
  std::size_t fft_size() const { return fft_size_; }
  int sample_rate() const { return sample_rate_; }
  const Matrix &weights() const { return weights_; }
  double center_hz(std::size_t band) const { return centers_[band + 1]; }
  double f_min() const { return centers_.front(); }
  double f_max() const { return centers_.back(); }

  // mel energies (n_mels) from a linear magnitude frame.
  std::vector<double> Apply(std::span<const double> magnitude) const;
  // Approximate inverse used for mel -> linear magnitude: each bin receives
  // the band energies divided by the band widths, weighted by the triangles.
  std::vector<double> Invert(std::span<const double> mel_energy) const;

 private:
  std::size_t fft_size_;
  int sample_rate_;
  Matrix weights_;               // n_mels x num_bins
  std::vector<double> centers_;  // n_mels + 2 edge/center frequencies
  std::vector<double> row_sums_;
};

double HzToMel(double hz);
double MelToHz(double mel);

struct MelSpectrogram {
  Matrix frames;  // T x n_mels, natural-log energies
  StftParams params;

  std::size_t num_frames() const { return frames.rows(); }
  std::size_t n_mels() const { return frames.cols(); }
};

// frames = ln(max(fb * |STFT|, floor)). Throws kMismatchedFilterbank when
// the filterbank was built for another fft size or sample rate.
MelSpectrogram ComputeMelSpectrogram(const Waveform &w, const StftParams &p,
                                     const MelFilterbank &fb, double floor = 1e-5);

// Sample-aligned variant for vocoder conditioning: the signal is zero-padded
// at the end so that there are exactly ceil(N / hop) frames, frame t starting
// at sample t * hop.
MelSpectrogram ComputeAlignedMel(const Waveform &w, const StftParams &p, const MelFilterbank &fb,
                                 double floor = 1e-5);

// Mel file: u32 T, u32 n_mels, then T*n_mels little-endian float32,
// row-major. The StftParams are not stored.
void WriteMel(const std::string &path, const Matrix &frames);
Matrix ReadMel(const std::string &path);

struct GriffinLimResult {
  Waveform waveform;
  // Spectral convergence || |STFT(x_k)| - mag ||_F / ||mag||_F after each
  // iteration k = 1..iters.
  std::vector<double> objective;
};

// Phase retrieval from a linear magnitude matrix (T x bins) starting from
// uniformly random phase. Output length is SignalLength(T).
GriffinLimResult GriffinLim(const Matrix &magnitude, const StftParams &p, int iters,
                            std::uint64_t seed, int sample_rate = 16000);

// mel (log) -> linear magnitude via MelFilterbank::Invert.
Matrix MelToLinear(const Matrix &log_mel, const MelFilterbank &fb);

// Lag (in samples) of the first autocorrelation peak after the first
// negative excursion, searched in [min_lag, max_lag]. Returns 0 if none.
std::size_t PitchLag(std::span<const double> x, std::size_t min_lag, std::size_t max_lag);

struct Segment {
  std::size_t start = 0;  // first sample
  std::size_t end = 0;    // one past the last sample
  double duration(int sample_rate) const { return static_cast<double>(end - start) / sample_rate; }
  bool operator==(const Segment &) const = default;
};

struct SegmentOptions {
  double min_silence_s = 0.3;
  double min_segment_s = 2.0;
  double max_segment_s = 12.0;
  double silence_db = -40.0;  // relative to the loudest frame
  double frame_s = 0.025;
  double hop_s = 0.010;
};

// Energy-based silence segmentation: 25 ms / 10 ms RMS frames below
// peak * 10^(silence_db/20) are silent; each interior silent run of at least
// min_silence_s becomes a cut at its midpoint. Pieces shorter than
// min_segment_s merge into the shorter neighbor when the result stays within
// max_segment_s; pieces still longer than max_segment_s are split evenly.
// Segments are contiguous and cover the input. Throws kEmptyAudio.
std::vector<Segment> SegmentOnSilence(const Waveform &w, const SegmentOptions &opts = {});

}  // namespace cltts::dsp
