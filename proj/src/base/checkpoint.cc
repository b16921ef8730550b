// src/base/checkpoint.cc

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

#include "cltts/base/checkpoint.h"

#include <fstream>

#include "cltts/base/binary-io.h"
#include "cltts/base/error.h"

namespace cltts {

void WriteTensors(std::ostream &os, const TensorMap &tensors) {
  WritePod<std::uint32_t>(os, static_cast<std::uint32_t>(tensors.size()));
  for (const auto &[name, t] : tensors) {
    WritePod<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    WritePod<std::uint32_t>(os, static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t d : t.shape) WritePod<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    os.write(reinterpret_cast<const char *>(t.data.data()),
             static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (!os) throw Error(ErrorCode::kIo, "failed writing tensors");
}

TensorMap ReadTensors(std::istream &is) {
  TensorMap out;
  auto count = ReadPod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name_len = ReadPod<std::uint32_t>(is);
    if (name_len > (1u << 16)) throw Error(ErrorCode::kFormat, "tensor name too long");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    auto rank = ReadPod<std::uint32_t>(is);
    if (rank > 8) throw Error(ErrorCode::kFormat, "tensor rank too large: " + name);
    std::vector<std::size_t> shape(rank);
    for (auto &d : shape) d = ReadPod<std::uint32_t>(is);
    Tensor t(shape);
    is.read(reinterpret_cast<char *>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!is) throw Error(ErrorCode::kFormat, "truncated tensor " + name);
    if (!out.emplace(name, std::move(t)).second)
      throw Error(ErrorCode::kFormat, "duplicate tensor " + name);
  }
  return out;
}

void WriteCheckpoint(const std::string &path, const TensorMap &tensors) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  WriteTensors(os, tensors);
}

TensorMap ReadCheckpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path);
  return ReadTensors(is);
}

}  // namespace cltts
