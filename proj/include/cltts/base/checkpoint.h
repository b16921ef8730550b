// include/cltts/base/checkpoint.h

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

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "cltts/base/tensor.h"

namespace cltts {

// Named-tensor container shared by the synthesizer and the vocoder.
//
// Layout, all integers little-endian u32:
//   count
//   per tensor: name_length, name bytes, rank, dims[rank],
//               prod(dims) little-endian IEEE-754 float64 values
// Tensors are written in name order.

void WriteTensors(std::ostream &os, const TensorMap &tensors);
TensorMap ReadTensors(std::istream &is);

void WriteCheckpoint(const std::string &path, const TensorMap &tensors);
TensorMap ReadCheckpoint(const std::string &path);

}  // namespace cltts
