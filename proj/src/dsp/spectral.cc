// src/dsp/spectral.cc

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

#include "cltts/dsp/spectral.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "cltts/base/binary-io.h"
#include "cltts/base/error.h"
#include "cltts/base/rng.h"
#include "cltts/kernels/kernels.h"
#include "fft.h"

namespace cltts::dsp {

using Spectrum = std::vector<std::vector<std::complex<double>>>;

void StftParams::Validate() const {
  if (hop_length == 0 || hop_length > frame_length || frame_length > fft_size)
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("need 0 < hop ({}) <= frame ({}) <= fft ({})", hop_length, frame_length,
                            fft_size));
}

std::size_t StftParams::NumFrames(std::size_t num_samples) const {
  if (num_samples < frame_length) return 0;
  return 1 + (num_samples - frame_length) / hop_length;
}

DspConfig DspConfig::FromConfig(const Config &c) {
  DspConfig d;
  d.sample_rate = c.Get("dsp.sample_rate", d.sample_rate);
  d.stft.frame_length = c.Get("dsp.frame_length", d.stft.frame_length);
  d.stft.hop_length = c.Get("dsp.hop_length", d.stft.hop_length);
  d.stft.fft_size = c.Get("dsp.fft_size", d.stft.fft_size);
  d.n_mels = c.Get("dsp.n_mels", d.n_mels);
  d.f_min = c.Get("dsp.f_min", d.f_min);
  d.f_max = c.Get("dsp.f_max", d.f_max);
  d.mel_floor = c.Get("dsp.mel_floor", d.mel_floor);
  d.griffin_lim_iters = c.Get("dsp.griffin_lim_iters", d.griffin_lim_iters);
  d.silence_db = c.Get("dsp.silence_db", d.silence_db);
  d.min_silence_s = c.Get("dsp.min_silence_s", d.min_silence_s);
  d.min_segment_s = c.Get("dsp.min_segment_s", d.min_segment_s);
  d.max_segment_s = c.Get("dsp.max_segment_s", d.max_segment_s);
  d.stft.Validate();
  return d;
}

std::vector<double> HannWindow(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  return w;
}

Spectrum StftComplex(std::span<const double> x, const StftParams &p) {
  p.Validate();
  if (x.size() < p.frame_length)
    throw Error(ErrorCode::kTooShort,
                fmt::format("{} samples < frame length {}", x.size(), p.frame_length));
  const std::size_t frames = p.NumFrames(x.size());
  const auto window = HannWindow(p.frame_length);
  RealFft fft(p.fft_size);
  std::vector<double> buf(p.fft_size, 0.0);
  Spectrum out(frames, std::vector<std::complex<double>>(p.num_bins()));
  for (std::size_t t = 0; t < frames; ++t) {
    const double *seg = x.data() + t * p.hop_length;
    for (std::size_t n = 0; n < p.frame_length; ++n) buf[n] = seg[n] * window[n];
    fft.Forward(buf.data(), out[t].data());
  }
  return out;
}

Matrix Stft(const Waveform &w, const StftParams &p) {
  auto spec = StftComplex(w.samples, p);
  Matrix mag(spec.size(), p.num_bins());
  for (std::size_t t = 0; t < spec.size(); ++t)
    for (std::size_t k = 0; k < p.num_bins(); ++k) mag(t, k) = std::abs(spec[t][k]);
  return mag;
}

std::vector<double> InverseStft(const Spectrum &spec, const StftParams &p) {
  p.Validate();
  if (spec.empty()) return {};
  const std::size_t len = p.SignalLength(spec.size());
  const auto window = HannWindow(p.frame_length);
  std::vector<double> out(len, 0.0), wsum(len, 0.0), frame(p.fft_size);
  RealFft fft(p.fft_size);
  const double scale = 1.0 / static_cast<double>(p.fft_size);
  for (std::size_t t = 0; t < spec.size(); ++t) {
    if (spec[t].size() != p.num_bins())
      throw Error(ErrorCode::kShapeMismatch, "spectrum frame has wrong bin count");
    fft.Inverse(spec[t].data(), frame.data());
    const std::size_t off = t * p.hop_length;
    for (std::size_t n = 0; n < p.frame_length; ++n) {
      out[off + n] += window[n] * frame[n] * scale;
      wsum[off + n] += window[n] * window[n];
    }
  }
  for (std::size_t i = 0; i < len; ++i) out[i] = wsum[i] > 1e-12 ? out[i] / wsum[i] : 0.0;
  return out;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(std::size_t n_mels, std::size_t fft_size, int sample_rate,
                             double f_min, double f_max)
    : fft_size_(fft_size), sample_rate_(sample_rate) {
  if (n_mels == 0 || fft_size < 2 || sample_rate <= 0 || !(f_min >= 0.0) || !(f_max > f_min) ||
      f_max > sample_rate / 2.0)
    throw Error(ErrorCode::kInvalidArgument, "bad mel filterbank parameters");
  const double lo = HzToMel(f_min), hi = HzToMel(f_max);
  centers_.resize(n_mels + 2);
  for (std::size_t i = 0; i < n_mels + 2; ++i)
    centers_[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) / (n_mels + 1));
  const std::size_t bins = fft_size / 2 + 1;
  weights_ = Matrix(n_mels, bins);
  row_sums_.assign(n_mels, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = centers_[m], center = centers_[m + 1], right = centers_[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      double f = static_cast<double>(k) * sample_rate / fft_size;
      double w = 0.0;
      if (f > left && f <= center)
        w = (f - left) / (center - left);
      else if (f > center && f < right)
        w = (right - f) / (right - center);
      weights_(m, k) = w;
      row_sums_[m] += w;
    }
  }
}

std::vector<double> MelFilterbank::Apply(std::span<const double> magnitude) const {
  std::vector<double> out(n_mels(), 0.0);
  kernels::Gemv(weights_.View(), magnitude, out);
  return out;
}

std::vector<double> MelFilterbank::Invert(std::span<const double> mel_energy) const {
  std::vector<double> scaled(n_mels());
  for (std::size_t m = 0; m < n_mels(); ++m)
    scaled[m] = row_sums_[m] > 0.0 ? mel_energy[m] / row_sums_[m] : 0.0;
  std::vector<double> out(weights_.cols(), 0.0);
  kernels::GemvT(weights_.View(), scaled, out);
  return out;
}

MelSpectrogram ComputeMelSpectrogram(const Waveform &w, const StftParams &p,
                                     const MelFilterbank &fb, double floor) {
  if (fb.fft_size() != p.fft_size || fb.sample_rate() != w.sample_rate)
    throw Error(ErrorCode::kMismatchedFilterbank,
                fmt::format("filterbank for fft {} @ {} Hz, input fft {} @ {} Hz", fb.fft_size(),
                            fb.sample_rate(), p.fft_size, w.sample_rate));
  if (!(floor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "mel floor must be > 0");
  Matrix mag = Stft(w, p);
  MelSpectrogram out{Matrix(mag.rows(), fb.n_mels()), p};
  for (std::size_t t = 0; t < mag.rows(); ++t) {
    auto e = fb.Apply(mag.Row(t));
    for (std::size_t m = 0; m < e.size(); ++m) out.frames(t, m) = std::log(std::max(e[m], floor));
  }
  return out;
}

MelSpectrogram ComputeAlignedMel(const Waveform &w, const StftParams &p, const MelFilterbank &fb,
                                 double floor) {
  p.Validate();
  if (w.samples.empty()) throw Error(ErrorCode::kEmptyAudio, "no samples");
  std::size_t frames = (w.samples.size() + p.hop_length - 1) / p.hop_length;
  Waveform padded = w;
  padded.samples.resize(p.SignalLength(frames), 0.0);
  return ComputeMelSpectrogram(padded, p, fb, floor);
}

void WriteMel(const std::string &path, const Matrix &frames) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  WritePod<std::uint32_t>(os, static_cast<std::uint32_t>(frames.rows()));
  WritePod<std::uint32_t>(os, static_cast<std::uint32_t>(frames.cols()));
  for (double v : frames.data()) WritePod<float>(os, static_cast<float>(v));
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path);
}

Matrix ReadMel(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path);
  auto rows = ReadPod<std::uint32_t>(is);
  auto cols = ReadPod<std::uint32_t>(is);
  if (rows == 0 || cols == 0) throw Error(ErrorCode::kFormat, "empty mel file " + path);
  Matrix m(rows, cols);
  for (double &v : m.data()) v = ReadPod<float>(is);
  return m;
}

namespace {

double SpectralConvergence(const Spectrum &spec, const Matrix &mag, double mag_norm) {
  double err = 0.0;
  for (std::size_t t = 0; t < spec.size(); ++t)
    for (std::size_t k = 0; k < spec[t].size(); ++k) {
      double d = std::abs(spec[t][k]) - mag(t, k);
      err += d * d;
    }
  return std::sqrt(err) / mag_norm;
}

}  // namespace

GriffinLimResult GriffinLim(const Matrix &magnitude, const StftParams &p, int iters,
                            std::uint64_t seed, int sample_rate) {
  p.Validate();
  if (iters < 1) throw Error(ErrorCode::kInvalidArgument, "griffin-lim needs iters >= 1");
  if (magnitude.rows() == 0 || magnitude.cols() != p.num_bins())
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("magnitude has {} bins, fft size {} needs {}", magnitude.cols(),
                            p.fft_size, p.num_bins()));
  const std::size_t frames = magnitude.rows(), bins = p.num_bins();
  const double mag_norm = std::sqrt(kernels::SumSquares(magnitude.data()));

  GriffinLimResult result;
  result.waveform.sample_rate = sample_rate;
  if (mag_norm == 0.0) {
    result.waveform.samples.assign(p.SignalLength(frames), 0.0);
    result.objective.assign(iters, 0.0);
    return result;
  }

  Rng rng(seed);
  Spectrum target(frames, std::vector<std::complex<double>>(bins));
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t k = 0; k < bins; ++k)
      target[t][k] = std::polar(magnitude(t, k), 2.0 * std::numbers::pi * rng.Uniform());

  std::vector<double> x;
  for (int it = 0; it < iters; ++it) {
    x = InverseStft(target, p);
    Spectrum est = StftComplex(x, p);
    result.objective.push_back(SpectralConvergence(est, magnitude, mag_norm));
    for (std::size_t t = 0; t < frames; ++t)
      for (std::size_t k = 0; k < bins; ++k) {
        double a = std::abs(est[t][k]);
        target[t][k] = a > 0.0 ? est[t][k] * (magnitude(t, k) / a)
                               : std::complex<double>(magnitude(t, k), 0.0);
      }
  }
  result.waveform.samples = std::move(x);
  return result;
}

Matrix MelToLinear(const Matrix &log_mel, const MelFilterbank &fb) {
  if (log_mel.cols() != fb.n_mels())
    throw Error(ErrorCode::kMismatchedFilterbank, "mel band count differs from filterbank");
  Matrix out(log_mel.rows(), fb.fft_size() / 2 + 1);
  std::vector<double> energy(fb.n_mels());
  for (std::size_t t = 0; t < log_mel.rows(); ++t) {
    for (std::size_t m = 0; m < energy.size(); ++m) energy[m] = std::exp(log_mel(t, m));
    auto lin = fb.Invert(energy);
    std::copy(lin.begin(), lin.end(), out.Row(t).begin());
  }
  return out;
}

std::size_t PitchLag(std::span<const double> x, std::size_t min_lag, std::size_t max_lag) {
  max_lag = std::min(max_lag, x.size() / 2);
  if (min_lag >= max_lag) return 0;
  std::vector<double> r(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    const std::size_t n = x.size() - lag;
    r[lag] = kernels::Dot(x.subspan(0, n), x.subspan(lag, n)) / n;
  }
  // First positive lobe after the first negative excursion.
  std::size_t lag = 1;
  while (lag <= max_lag && r[lag] >= 0.0) ++lag;
  while (lag <= max_lag && r[lag] < 0.0) ++lag;
  if (lag > max_lag) return 0;
  std::size_t best = lag;
  for (; lag <= max_lag && r[lag] >= 0.0; ++lag)
    if (r[lag] > r[best]) best = lag;
  return best >= min_lag ? best : 0;
}

std::vector<Segment> SegmentOnSilence(const Waveform &w, const SegmentOptions &opts) {
  if (w.samples.empty()) throw Error(ErrorCode::kEmptyAudio, "no samples");
  if (w.sample_rate <= 0 || !(opts.min_silence_s > 0) || !(opts.min_segment_s > 0) ||
      !(opts.max_segment_s >= opts.min_segment_s) || !(opts.frame_s > 0) || !(opts.hop_s > 0))
    throw Error(ErrorCode::kInvalidArgument, "bad segmentation thresholds");
  const std::size_t n = w.samples.size();
  const auto sr = static_cast<double>(w.sample_rate);
  const std::size_t frame = std::max<std::size_t>(1, std::lround(opts.frame_s * sr));
  const std::size_t hop = std::max<std::size_t>(1, std::lround(opts.hop_s * sr));
  const std::size_t num_frames = n < frame ? 1 : 1 + (n - frame) / hop;

  std::vector<double> rms(num_frames);
  for (std::size_t t = 0; t < num_frames; ++t) {
    std::size_t len = std::min(frame, n - t * hop);
    rms[t] = std::sqrt(kernels::SumSquares(std::span(w.samples).subspan(t * hop, len)) / len);
  }
  const double peak = *std::max_element(rms.begin(), rms.end());
  if (peak == 0.0) return {{0, n}};
  const double threshold = peak * std::pow(10.0, opts.silence_db / 20.0);

  std::vector<std::size_t> cuts;
  for (std::size_t t = 0; t < num_frames;) {
    if (rms[t] >= threshold) {
      ++t;
      continue;
    }
    std::size_t a = t;
    while (t < num_frames && rms[t] < threshold) ++t;
    std::size_t b = t - 1;
    bool interior = a > 0 && t < num_frames;
    std::size_t start = a * hop, end = std::min(n, b * hop + frame);
    if (interior && (end - start) / sr >= opts.min_silence_s) cuts.push_back((start + end) / 2);
  }

  std::vector<Segment> segs;
  std::size_t prev = 0;
  for (std::size_t c : cuts) {
    segs.push_back({prev, c});
    prev = c;
  }
  segs.push_back({prev, n});

  const auto min_len = static_cast<std::size_t>(std::ceil(opts.min_segment_s * sr));
  const auto max_len = static_cast<std::size_t>(std::floor(opts.max_segment_s * sr));
  // Repeatedly fold the shortest mergeable short piece into its shorter
  // neighbor.
  for (;;) {
    std::size_t pick = segs.size();
    for (std::size_t i = 0; i < segs.size() && segs.size() > 1; ++i) {
      std::size_t len = segs[i].end - segs[i].start;
      if (len >= min_len) continue;
      bool left_ok = i > 0 && segs[i].end - segs[i - 1].start <= max_len;
      bool right_ok = i + 1 < segs.size() && segs[i + 1].end - segs[i].start <= max_len;
      if (!left_ok && !right_ok) continue;
      if (pick == segs.size() || len < segs[pick].end - segs[pick].start) pick = i;
    }
    if (pick == segs.size()) break;
    std::size_t i = pick;
    bool left_ok = i > 0 && segs[i].end - segs[i - 1].start <= max_len;
    bool right_ok = i + 1 < segs.size() && segs[i + 1].end - segs[i].start <= max_len;
    bool use_left = left_ok && (!right_ok || segs[i - 1].end - segs[i - 1].start <=
                                                 segs[i + 1].end - segs[i + 1].start);
    if (use_left) {
      segs[i - 1].end = segs[i].end;
    } else {
      segs[i + 1].start = segs[i].start;
    }
    segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
  }

  std::vector<Segment> out;
  for (const auto &s : segs) {
    std::size_t len = s.end - s.start;
    std::size_t parts = len <= max_len ? 1 : (len + max_len - 1) / max_len;
    for (std::size_t k = 0; k < parts; ++k)
      out.push_back({s.start + len * k / parts, s.start + len * (k + 1) / parts});
  }
  return out;
}

}  // namespace cltts::dsp
