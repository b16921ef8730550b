// tests/dsp-test.cc

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
#include <complex>
#include <cstring>
#include <fstream>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"
#include "cltts/dsp/audio.h"
#include "cltts/dsp/spectral.h"
#include "doctest.h"
#include "test-util.h"

using namespace cltts;
using namespace cltts::dsp;

namespace {

const double kPi = 3.14159265358979323846;

Waveform Tone(double hz, double seconds, double amp = 0.5, int sr = 16000) {
  Waveform w;
  w.sample_rate = sr;
  w.samples.resize(static_cast<std::size_t>(seconds * sr));
  for (std::size_t t = 0; t < w.samples.size(); ++t)
    w.samples[t] = amp * std::sin(2 * kPi * hz * static_cast<double>(t) / sr);
  return w;
}

// Direct formulas, written independently of the library.
int OracleEncode(double x) {
  double y = (x < 0 ? -1.0 : 1.0) * std::log1p(255.0 * std::abs(x)) / std::log1p(255.0);
  int c = static_cast<int>(std::floor((y + 1.0) / 2.0 * 256.0));
  return std::clamp(c, 0, 255);
}
double OracleDecode(int c) {
  double y = (c + 0.5) / 256.0 * 2.0 - 1.0;
  return (y < 0 ? -1.0 : 1.0) * (std::pow(256.0, std::abs(y)) - 1.0) / 255.0;
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

}  // namespace

TEST_CASE("mu-law boundary codes") {
  CHECK(MuLawEncode(-1.0) == 0);
  CHECK(MuLawEncode(1.0) == 255);
  CHECK(MuLawEncode(0.0) == 128);
  CHECK(std::abs(MuLawDecode(MuLawEncode(0.0))) < 0.005);
  CHECK(MuLawDecode(0) >= -1.0);
  CHECK(MuLawDecode(0) <= -0.95);
  CHECK(CodeOf([] { MuLawEncode(1.0001); }) == ErrorCode::kOutOfRange);
  CHECK(CodeOf([] { MuLawDecode(256); }) == ErrorCode::kOutOfRange);
  CHECK(CodeOf([] { MuLawDecode(-1); }) == ErrorCode::kOutOfRange);
}

TEST_CASE("mu-law matches the formulas, is monotone and idempotent on codes") {
  for (int c = 0; c < 256; ++c) {
    CHECK(MuLawDecode(c) == doctest::Approx(OracleDecode(c)).epsilon(1e-14));
    CHECK(MuLawEncode(MuLawDecode(c)) == c);
    if (c > 0) CHECK(MuLawDecode(c) > MuLawDecode(c - 1));
  }
  int prev = 0;
  const int n = 1000000;
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = -1.0 + 2.0 * i / n;
    int c = MuLawEncode(x);
    REQUIRE(c >= prev);
    prev = c;
    if (i % 997 == 0) CHECK(c == OracleEncode(x));
    worst = std::max(worst, std::abs(x - MuLawDecode(c)));
  }
  CHECK(worst <= 0.025);
}

TEST_CASE("stft frame matches a direct DFT") {
  Rng rng(1);
  StftParams p{64, 16, 128};
  Waveform w;
  w.samples = cltts::testing::RandomVector(rng, 200, 0.3);
  auto mag = Stft(w, p);
  CHECK(mag.rows() == 1 + (200 - 64) / 16);
  CHECK(mag.cols() == 65);
  auto win = HannWindow(64);
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(win[i] == doctest::Approx(0.5 - 0.5 * std::cos(2 * kPi * i / 64.0)));
  for (std::size_t t : {std::size_t{0}, std::size_t{5}}) {
    for (std::size_t k = 0; k < 65; ++k) {
      std::complex<double> s = 0;
      for (std::size_t n = 0; n < 64; ++n)
        s += win[n] * w.samples[t * 16 + n] * std::polar(1.0, -2 * kPi * double(k * n) / 128.0);
      CHECK(mag(t, k) == doctest::Approx(std::abs(s)).epsilon(1e-9));
    }
  }
  Waveform shorty;
  shorty.samples.assign(63, 0.0);
  CHECK(CodeOf([&] { Stft(shorty, p); }) == ErrorCode::kTooShort);
}

TEST_CASE("stft energy and simple inputs") {
  StftParams p;
  // Bin-exact sine: bin 40 of a 1024-point FFT.
  Waveform w = Tone(40.0 * 16000 / 1024, 0.2);
  auto mag = Stft(w, p);
  for (std::size_t t = 0; t < mag.rows(); ++t) {
    auto row = mag.Row(t);
    CHECK(std::max_element(row.begin(), row.end()) - row.begin() == 40);
  }
  // With frame = fft the Hann window confines the tone to bins 39..41.
  StftParams full{1024, 256, 1024};
  auto exact = Stft(w, full);
  for (std::size_t t = 0; t < exact.rows(); ++t) {
    auto row = exact.Row(t);
    for (std::size_t k = 0; k < row.size(); ++k)
      if (k < 39 || k > 41) CHECK(row[k] <= 1e-9 * row[40]);
  }
  // Parseval with the unnormalized forward transform.
  Rng rng(2);
  Waveform noise;
  noise.samples = cltts::testing::RandomVector(rng, 2000, 0.2);
  auto win = HannWindow(p.frame_length);
  auto nm = Stft(noise, p);
  for (std::size_t t = 0; t < nm.rows(); ++t) {
    double time = 0;
    for (std::size_t n = 0; n < p.frame_length; ++n) {
      double v = win[n] * noise.samples[t * p.hop_length + n];
      time += v * v;
    }
    double freq = 0;
    for (std::size_t k = 0; k < nm.cols(); ++k) {
      double e = nm(t, k) * nm(t, k);
      freq += (k == 0 || k == nm.cols() - 1) ? e : 2 * e;
    }
    CHECK(freq / p.fft_size == doctest::Approx(time).epsilon(0.01));
  }
  Waveform zero;
  zero.samples.assign(1600, 0.0);
  auto zm = Stft(zero, p);
  for (double x : zm.data()) CHECK(x == 0.0);
  Waveform dc;
  dc.samples.assign(1600, 0.5);
  auto dm = Stft(dc, p);
  for (std::size_t t = 0; t < dm.rows(); ++t) {
    auto row = dm.Row(t);
    CHECK(std::max_element(row.begin(), row.end()) - row.begin() == 0);
  }
}

TEST_CASE("inverse stft reconstructs the covered samples") {
  Rng rng(3);
  StftParams p{400, 100, 512};
  auto x = cltts::testing::RandomVector(rng, 2000, 0.3);
  auto y = InverseStft(StftComplex(x, p), p);
  REQUIRE(y.size() == p.SignalLength(p.NumFrames(2000)));
  // Interior samples where the summed squared window is well away from zero.
  for (std::size_t n = 100; n + 100 < y.size(); ++n)
    CHECK(y[n] == doctest::Approx(x[n]).epsilon(1e-9));
}

TEST_CASE("mel filterbank shape") {
  MelFilterbank fb(80, 1024, 16000, 50.0, 7600.0);
  const auto &W = fb.weights();
  REQUIRE(W.rows() == 80);
  REQUIRE(W.cols() == 513);
  for (double x : W.data()) CHECK(x >= 0.0);
  // Partition of unity on every bin between the first and last centre.
  for (std::size_t k = 0; k < 513; ++k) {
    double hz = 16000.0 * k / 1024;
    if (hz <= fb.center_hz(0) || hz >= fb.center_hz(79)) continue;
    double s = 0;
    for (std::size_t m = 0; m < 80; ++m) s += W(m, k);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(MelToHz(HzToMel(1000.0)) == doctest::Approx(1000.0));
  CHECK(HzToMel(1000.0) == doctest::Approx(2595.0 * std::log10(1.0 + 1000.0 / 700.0)));
}

TEST_CASE("mel spectrogram cases") {
  DspConfig d;
  MelFilterbank fb(d.n_mels, d.stft.fft_size, 16000, d.f_min, d.f_max);
  Waveform silence;
  silence.samples.assign(4000, 0.0);
  auto quiet = ComputeMelSpectrogram(silence, d.stft, fb);
  for (double x : quiet.frames.data()) CHECK(x == doctest::Approx(std::log(1e-5)));
  Rng rng(4);
  Waveform noise;
  noise.samples = cltts::testing::RandomVector(rng, 4000, 0.3);
  auto loud = ComputeMelSpectrogram(noise, d.stft, fb, 1e-30);
  for (double x : loud.frames.data()) CHECK(x > std::log(1e-30));
  for (std::size_t band : {5u, 20u, 40u, 60u, 75u}) {
    auto w = Tone(fb.center_hz(band), 0.2);
    auto mel = ComputeMelSpectrogram(w, d.stft, fb).frames;
    auto row = mel.Row(mel.rows() / 2);
    CHECK(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()) == band);
  }
  MelFilterbank other(80, 512, 16000, 50, 7600);
  CHECK(CodeOf([&] { ComputeMelSpectrogram(noise, d.stft, other); }) ==
        ErrorCode::kMismatchedFilterbank);
}

TEST_CASE("aligned mel has ceil(N / hop) frames") {
  DspConfig d;
  MelFilterbank fb(d.n_mels, d.stft.fft_size, 16000, d.f_min, d.f_max);
  for (std::size_t n : {1u, 199u, 200u, 201u, 16000u}) {
    Waveform w;
    w.samples.assign(n, 0.1);
    CHECK(ComputeAlignedMel(w, d.stft, fb).num_frames() == (n + 199) / 200);
  }
}

TEST_CASE("griffin-lim") {
  DspConfig d;
  auto w = Tone(440.0, 0.5);
  auto mag = Stft(w, d.stft);
  auto r = GriffinLim(mag, d.stft, 60, 1);
  REQUIRE(r.objective.size() == 60);
  for (std::size_t i = 1; i < r.objective.size(); ++i)
    CHECK(r.objective[i] <= r.objective[i - 1] + 1e-7);
  CHECK(r.waveform.samples.size() == d.stft.SignalLength(mag.rows()));
  CHECK(std::abs(static_cast<double>(PitchLag(r.waveform.samples, 20, 60)) - 16000.0 / 440) <= 1.0);
  auto same = GriffinLim(mag, d.stft, 60, 1);
  CHECK(same.waveform.samples == r.waveform.samples);
  Matrix zero(10, d.stft.num_bins());
  auto silent = GriffinLim(zero, d.stft, 5, 1);
  for (double x : silent.waveform.samples) CHECK(x == 0.0);
}

TEST_CASE("pitch lag oracle") {
  for (double hz : {200.0, 320.0, 440.0, 500.0}) {
    auto w = Tone(hz, 0.1);
    CHECK(std::abs(static_cast<double>(PitchLag(w.samples, 20, 100)) - 16000.0 / hz) <= 1.0);
  }
}

TEST_CASE("segmentation") {
  Rng rng(5);
  const int sr = 16000;
  Waveform w;
  w.samples.resize(10 * sr);
  for (auto &x : w.samples) x = 0.3 * std::clamp(rng.Normal(), -3.0, 3.0) / 3.0;
  for (int t = static_cast<int>(4.75 * sr); t < static_cast<int>(5.25 * sr); ++t)
    w.samples[t] = 0.0;
  auto segs = SegmentOnSilence(w);
  REQUIRE(segs.size() == 2);
  CHECK(std::abs(segs[0].end / double(sr) - 5.0) <= 0.1);
  CHECK(segs[0].start == 0);
  CHECK(segs[1].start == segs[0].end);
  CHECK(segs[1].end == w.samples.size());

  Waveform silent;
  silent.samples.assign(5 * sr, 0.0);
  auto one = SegmentOnSilence(silent);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Segment{0, silent.samples.size()});

  auto tone = Tone(300, 3.0);
  auto t1 = SegmentOnSilence(tone);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0] == Segment{0, tone.samples.size()});

  // Short gap (0.2 s) does not cut.
  Waveform shortgap = w;
  for (int t = static_cast<int>(4.75 * sr); t < static_cast<int>(5.25 * sr); ++t)
    shortgap.samples[t] = 0.3 * std::sin(t * 0.1);
  for (int t = static_cast<int>(4.9 * sr); t < static_cast<int>(5.1 * sr); ++t)
    shortgap.samples[t] = 0.0;
  CHECK(SegmentOnSilence(shortgap).size() == 1);

  CHECK(CodeOf([] { SegmentOnSilence(Waveform{}); }) == ErrorCode::kEmptyAudio);
}

TEST_CASE("segmentation coverage and length bound on random layouts") {
  Rng rng(6);
  const int sr = 8000;
  for (int trial = 0; trial < 20; ++trial) {
    Waveform w;
    w.sample_rate = sr;
    double total = 5 + rng.Uniform() * 40;
    w.samples.resize(static_cast<std::size_t>(total * sr));
    for (auto &x : w.samples)
      x = 0.2 * std::sin(0.05 * (&x - w.samples.data())) + 0.05 * rng.Normal() * 0.2;
    for (auto &x : w.samples) x = std::clamp(x, -1.0, 1.0);
    int gaps = static_cast<int>(rng.Below(8));
    for (int g = 0; g < gaps; ++g) {
      std::size_t at = rng.Below(w.samples.size());
      std::size_t len = static_cast<std::size_t>((0.1 + rng.Uniform()) * sr);
      for (std::size_t t = at; t < std::min(w.samples.size(), at + len); ++t) w.samples[t] = 0.0;
    }
    auto segs = SegmentOnSilence(w);
    REQUIRE_FALSE(segs.empty());
    CHECK(segs.front().start == 0);
    CHECK(segs.back().end == w.samples.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].end > segs[i].start);
      CHECK(segs[i].duration(sr) <= 12.0 + 1e-9);
      if (i) CHECK(segs[i].start == segs[i - 1].end);
    }
  }
}

TEST_CASE("wav and mel files") {
  cltts::testing::TempDir dir("dsp");
  Waveform w = Tone(440, 0.05);
  w.samples.push_back(-1.0);
  w.samples.push_back(0.999);
  WriteWav(dir.File("a.wav"), w);
  auto back = ReadWav(dir.File("a.wav"));
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - w.samples[i]) <= 0.5 / 32768 + 1e-12);
  auto bytes = EncodeWav(w);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "RIFF");
  CHECK(bytes.size() == 44 + 2 * w.samples.size());

  Matrix m(3, 2);
  m(0, 0) = 1.5;
  m(2, 1) = -0.25;
  WriteMel(dir.File("m.mel"), m);
  auto raw = ReadTextFile(dir.File("m.mel"));
  REQUIRE(raw.size() == 8 + 6 * 4);
  std::uint32_t T, M;
  std::memcpy(&T, raw.data(), 4);
  std::memcpy(&M, raw.data() + 4, 4);
  CHECK(T == 3);
  CHECK(M == 2);
  float first;
  std::memcpy(&first, raw.data() + 8, 4);
  CHECK(first == 1.5f);
  CHECK(ReadMel(dir.File("m.mel")) == m);
}
