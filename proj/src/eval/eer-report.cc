// src/eval/eer-report.cc

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

#include "cltts/eval/eer-report.h"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"

namespace cltts::eval {

std::vector<EerSystem> ReadEerSystems(const std::string &path) {
  CsvTable t = ReadCsv(path);
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string &p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (dir / fp).string();
  };
  const std::size_t sys = t.Column("system"), train = t.Column("train_set"),
                    emb = t.Column("embeddings"), trials = t.Column("trials");
  const bool has_norm = std::find(t.header.begin(), t.header.end(), "norm") != t.header.end();
  std::vector<EerSystem> out;
  for (const auto &row : t.rows) {
    EerSystem s;
    s.system = row[sys];
    s.train_set = row[train];
    s.embeddings_path = resolve(row[emb]);
    s.trials_path = resolve(row[trials]);
    if (has_norm && !row[t.Column("norm")].empty())
      s.norm = embedding::ParseNormMode(row[t.Column("norm")]);
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyInput, path + " lists no systems");
  return out;
}

EerRow EvaluateSystem(const EerSystem &system, const embedding::EmbeddingSet &set,
                      const std::vector<embedding::Trial> &trials) {
  if (trials.empty())
    throw Error(ErrorCode::kEmptyInput, "system " + system.system + " has no trials");
  embedding::EmbeddingSet normed = embedding::Normalize(set, system.norm);
  auto scores = embedding::ScoreTrials(normed, trials);
  EerRow row;
  row.system = system.system;
  row.dim = set.dim();
  row.train_set = system.train_set;
  std::set<std::string> speakers;
  for (const auto &e : set.items()) speakers.insert(e.speaker_id);
  row.speakers = speakers.size();
  row.eer_percent = 100.0 * embedding::ComputeEer(scores).eer;
  return row;
}

EerRow EvaluateSystem(const EerSystem &system) {
  auto set = embedding::ReadEmbeddings(system.embeddings_path);
  auto trials = embedding::ReadTrials(system.trials_path);
  return EvaluateSystem(system, set, trials);
}

std::string FormatEerTable(const std::vector<EerRow> &rows) {
  std::size_t w_sys = 6, w_train = 9;
  for (const auto &r : rows) {
    w_sys = std::max(w_sys, r.system.size());
    w_train = std::max(w_train, r.train_set.size());
  }
  std::string out = fmt::format("{:<{}}  {:>5}  {:<{}}  {:>8}  {:>7}\n", "System", w_sys, "Dim",
                                "Train set", w_train, "Speakers", "EER(%)");
  for (const auto &r : rows)
    out += fmt::format("{:<{}}  {:>5}  {:<{}}  {:>8}  {:>7.2f}\n", r.system, w_sys, r.dim,
                       r.train_set, w_train, r.speakers, r.eer_percent);
  return out;
}

}  // namespace cltts::eval
