// src/dsp/audio.cc

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

#include "cltts/dsp/audio.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cltts/base/error.h"

namespace cltts::dsp {

namespace {

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void PutU32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutTag(std::vector<std::uint8_t> &out, const char *tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

Waveform DecodeWav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 ||
      std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::kFormat, "not a RIFF/WAVE file");
  Waveform w;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    std::uint32_t size = ReadU32(b, pos + 4);
    std::size_t body = pos + 8;
    if (body + size > b.size()) throw Error(ErrorCode::kFormat, "truncated WAV chunk");
    if (std::memcmp(b.data() + pos, "fmt ", 4) == 0) {
      if (size < 16) throw Error(ErrorCode::kFormat, "short fmt chunk");
      std::uint16_t format = ReadU16(b, body);
      std::uint16_t channels = ReadU16(b, body + 2);
      w.sample_rate = static_cast<int>(ReadU32(b, body + 4));
      std::uint16_t bits = ReadU16(b, body + 14);
      if (format != 1 || channels != 1 || bits != 16)
        throw Error(ErrorCode::kFormat, "only 16-bit PCM mono WAV is supported");
      have_fmt = true;
    } else if (std::memcmp(b.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::kFormat, "data chunk before fmt chunk");
      w.samples.resize(size / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i)
        w.samples[i] = static_cast<std::int16_t>(ReadU16(b, body + 2 * i)) / 32768.0;
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw Error(ErrorCode::kFormat, "WAV has no data chunk");
}

std::vector<std::uint8_t> EncodeWav(const Waveform &w) {
  if (w.sample_rate <= 0) throw Error(ErrorCode::kInvalidArgument, "sample rate must be > 0");
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(w.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double s : w.samples) {
    double v = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    auto q = static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
    PutU16(out, static_cast<std::uint16_t>(q));
  }
  return out;
}

Waveform ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return DecodeWav(bytes);
}

void WriteWav(const std::string &path, const Waveform &w) {
  auto bytes = EncodeWav(w);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char *>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path);
}

int MuLawEncode(double x, int mu) {
  if (!(std::abs(x) <= 1.0)) throw Error(ErrorCode::kOutOfRange, "mu-law input must be in [-1, 1]");
  double y = std::copysign(std::log1p(mu * std::abs(x)) / std::log1p(mu), x);
  int code = static_cast<int>(std::floor((y + 1.0) / 2.0 * kMuLawChannels));
  return std::clamp(code, 0, kMuLawChannels - 1);
}

double MuLawDecode(int code, int mu) {
  if (code < 0 || code >= kMuLawChannels)
    throw Error(ErrorCode::kOutOfRange, "mu-law code " + std::to_string(code));
  double y = (code + 0.5) / kMuLawChannels * 2.0 - 1.0;
  return std::copysign(std::expm1(std::abs(y) * std::log1p(mu)) / mu, y);
}

std::vector<int> MuLawEncode(std::span<const double> x, int mu) {
  std::vector<int> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = MuLawEncode(x[i], mu);
  return out;
}

std::vector<double> MuLawDecode(std::span<const int> codes, int mu) {
  std::vector<double> out(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) out[i] = MuLawDecode(codes[i], mu);
  return out;
}

}  // namespace cltts::dsp
