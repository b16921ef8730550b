// include/cltts/dsp/audio.h

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

namespace cltts::dsp {

struct Waveform {
  std::vector<double> samples;  // nominally in [-1, 1]
  int sample_rate = 16000;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// 16-bit linear PCM, mono, little-endian RIFF. Samples are scaled by 1/32768
// on read; on write they are clamped to [-1, 1) and rounded.
Waveform ReadWav(const std::string &path);
void WriteWav(const std::string &path, const Waveform &w);
std::vector<std::uint8_t> EncodeWav(const Waveform &w);
Waveform DecodeWav(std::span<const std::uint8_t> bytes);

inline constexpr int kMuLawChannels = 256;

// y = sign(x) ln(1 + mu|x|) / ln(1 + mu); code = clamp(floor((y+1)/2 * 256)).
// Throws kOutOfRange for |x| > 1.
int MuLawEncode(double x, int mu = 255);
// Bin-center inverse of MuLawEncode. Throws kOutOfRange for codes outside
// 0..255.
double MuLawDecode(int code, int mu = 255);

std::vector<int> MuLawEncode(std::span<const double> x, int mu = 255);
std::vector<double> MuLawDecode(std::span<const int> codes, int mu = 255);

}  // namespace cltts::dsp
