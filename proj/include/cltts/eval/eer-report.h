// include/cltts/eval/eer-report.h

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

#include <string>
#include <vector>

#include "cltts/embedding/embedding.h"

namespace cltts::eval {

// One system of an SV table: which embeddings and trial list to score.
struct EerSystem {
  std::string system;
  std::string train_set;
  std::string embeddings_path;
  std::string trials_path;
  embedding::NormMode norm = embedding::NormMode::kNone;
};

struct EerRow {
  std::string system;
  std::size_t dim = 0;
  std::string train_set;
  std::size_t speakers = 0;  // distinct speaker ids in the embedding file
  double eer_percent = 0.0;
};

// CSV with header system,train_set,embeddings,trials and an optional norm
// column (none, l2, whiten). Relative paths are taken relative to the
// directory of the CSV file.
std::vector<EerSystem> ReadEerSystems(const std::string &path);

// Scores the trials with cosine similarity after the requested
// normalization. I/O, parse and EER errors propagate.
EerRow EvaluateSystem(const EerSystem &system);
EerRow EvaluateSystem(const EerSystem &system, const embedding::EmbeddingSet &set,
                      const std::vector<embedding::Trial> &trials);

// Aligned table with an "EER(%)" column printed to two decimals.
std::string FormatEerTable(const std::vector<EerRow> &rows);

}  // namespace cltts::eval
