// src/eval/eval-set.cc

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

#include "cltts/eval/eval-set.h"

#include <algorithm>
#include <array>
#include <limits>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"
#include "cltts/base/rng.h"

namespace cltts::eval {

namespace {

constexpr std::array<const char *, 8> kConditionNames = {"GT", "Baseline", "FAE", "FNE",
                                                         "NE", "FAM",      "FNM", "NM"};
constexpr std::array<const char *, 5> kModelNames = {"none", "no-norm", "l2-norm", "whitening",
                                                     "baseline"};

bool ValidPair(Condition c, Model m) {
  switch (c) {
    case Condition::kGT:
      return m == Model::kNone;
    case Condition::kBaseline:
      return m == Model::kBaseline;
    default:
      return m == Model::kNoNorm || m == Model::kL2Norm || m == Model::kWhitening;
  }
}

// Cell index gender * 2 + (seen ? 0 : 1).
std::size_t Cell(const UtteranceEntry &e) {
  return (e.gender == Gender::kM ? 0 : 2) + (e.seen ? 0 : 1);
}

std::vector<UtteranceEntry> DrawBalanced(const Pools &pools, const PoolKey &key, std::size_t quota,
                                         Rng &rng) {
  if (quota == 0) return {};
  auto it = pools.find(key);
  if (it == pools.end() || it->second.empty())
    throw Error(ErrorCode::kInsufficientPool, "pool " + PoolName(key) + " is empty");
  const auto &pool = it->second;
  std::array<std::vector<std::size_t>, 4> cells;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto &e = pool[i];
    if (e.condition != key.first || e.model != key.second)
      throw Error(ErrorCode::kInvalidArgument, "utterance " + e.utterance_id + " is " +
                                                   PoolName({e.condition, e.model}) +
                                                   " but filed under pool " + PoolName(key));
    cells[Cell(e)].push_back(i);
  }

  // Every split with balanced gender and seen totals that the pool can
  // supply; the most even ones are kept and one of them is drawn.
  const std::size_t q = quota;
  std::vector<std::array<std::size_t, 4>> best;
  std::size_t best_spread = std::numeric_limits<std::size_t>::max();
  auto halves = [](std::size_t n) {
    std::vector<std::size_t> v{n / 2};
    if (n % 2) v.push_back(n / 2 + 1);
    return v;
  };
  for (std::size_t males : halves(q)) {
    for (std::size_t seen : halves(q)) {
      std::size_t lo = males + seen > q ? males + seen - q : 0;
      for (std::size_t x = lo; x <= std::min(males, seen); ++x) {
        std::array<std::size_t, 4> n = {x, males - x, seen - x, q - males - seen + x};
        bool ok = true;
        for (std::size_t c = 0; c < 4; ++c) ok = ok && n[c] <= cells[c].size();
        if (!ok) continue;
        auto [mn, mx] = std::minmax_element(n.begin(), n.end());
        std::size_t spread = *mx - *mn;
        if (spread < best_spread) {
          best_spread = spread;
          best.clear();
        }
        if (spread == best_spread) best.push_back(n);
      }
    }
  }
  if (best.empty())
    throw Error(ErrorCode::kInsufficientPool, "pool " + PoolName(key) + " cannot supply " +
                                                  std::to_string(q) +
                                                  " gender- and seen-balanced utterances (" +
                                                  std::to_string(pool.size()) + " available)");

  const auto &counts = best[rng.Below(best.size())];
  std::vector<UtteranceEntry> out;
  for (std::size_t c = 0; c < 4; ++c) {
    auto idx = cells[c];
    rng.Shuffle(idx.begin(), idx.end());
    for (std::size_t k = 0; k < counts[c]; ++k) out.push_back(pool[idx[k]]);
  }
  rng.Shuffle(out.begin(), out.end());
  return out;
}

}  // namespace

const char *ConditionName(Condition c) { return kConditionNames[static_cast<std::size_t>(c)]; }
const char *ModelName(Model m) { return kModelNames[static_cast<std::size_t>(m)]; }

Condition ParseCondition(const std::string &name) {
  for (std::size_t i = 0; i < kConditionNames.size(); ++i)
    if (name == kConditionNames[i]) return static_cast<Condition>(i);
  throw Error(ErrorCode::kInvalidArgument, "unknown condition '" + name + "'");
}

Model ParseModel(const std::string &name) {
  for (std::size_t i = 0; i < kModelNames.size(); ++i)
    if (name == kModelNames[i]) return static_cast<Model>(i);
  throw Error(ErrorCode::kInvalidArgument, "unknown model '" + name + "'");
}

bool IsEnglishCondition(Condition c) {
  return c == Condition::kFAE || c == Condition::kFNE || c == Condition::kNE;
}
bool IsMandarinCondition(Condition c) {
  return c == Condition::kFAM || c == Condition::kFNM || c == Condition::kNM;
}

std::string PoolName(const PoolKey &key) {
  return std::string(ConditionName(key.first)) + "/" + ModelName(key.second);
}

Pools GroupPools(const std::vector<UtteranceEntry> &entries) {
  Pools pools;
  for (const auto &e : entries) pools[{e.condition, e.model}].push_back(e);
  return pools;
}

EvalSetLayout EvalSetLayout::FromConfig(const Config &c) {
  EvalSetLayout l;
  l.ground_truth = c.Get<std::size_t>("eval.ground_truth", l.ground_truth);
  l.baseline = c.Get<std::size_t>("eval.baseline", l.baseline);
  l.per_condition = c.Get<std::size_t>("eval.per_condition", l.per_condition);
  return l;
}

EvalSet BuildEvalSet(const Pools &pools, std::uint64_t seed, const EvalSetLayout &layout) {
  for (const auto &[key, entries] : pools) {
    if (!ValidPair(key.first, key.second))
      throw Error(ErrorCode::kInvalidArgument,
                  "pool " + PoolName(key) + " mixes a condition with the wrong kind of model");
  }
  Rng rng(seed);
  EvalSet set;
  set.seed = seed;
  auto append = [&](const PoolKey &key, std::size_t quota) {
    auto drawn = DrawBalanced(pools, key, quota, rng);
    set.entries.insert(set.entries.end(), drawn.begin(), drawn.end());
  };
  append({Condition::kGT, Model::kNone}, layout.ground_truth);
  append({Condition::kBaseline, Model::kBaseline}, layout.baseline);
  for (Model m : kMultilingualModels)
    for (Condition c : kModelBlockOrder) append({c, m}, layout.per_condition);
  return set;
}

std::vector<UtteranceEntry> ParseManifest(const std::string &text) {
  CsvTable t = ParseCsv(text);
  const std::size_t id = t.Column("utterance_id"), cond = t.Column("condition"),
                    model = t.Column("model"), spk = t.Column("speaker_id"),
                    gender = t.Column("gender"), seen = t.Column("seen"), path = t.Column("path");
  std::vector<UtteranceEntry> out;
  for (const auto &row : t.rows) {
    UtteranceEntry e;
    e.utterance_id = row[id];
    e.condition = ParseCondition(row[cond]);
    e.model = ParseModel(row[model]);
    e.speaker_id = row[spk];
    if (row[gender] == "M") {
      e.gender = Gender::kM;
    } else if (row[gender] == "F") {
      e.gender = Gender::kF;
    } else {
      throw Error(ErrorCode::kFormat, "gender must be M or F, got '" + row[gender] + "'");
    }
    if (row[seen] == "1" || row[seen] == "true" || row[seen] == "seen") {
      e.seen = true;
    } else if (row[seen] == "0" || row[seen] == "false" || row[seen] == "unseen") {
      e.seen = false;
    } else {
      throw Error(ErrorCode::kFormat, "bad seen flag '" + row[seen] + "'");
    }
    e.path = row[path];
    if (!ValidPair(e.condition, e.model))
      throw Error(ErrorCode::kInvalidArgument, "utterance " + e.utterance_id + ": condition " +
                                                   ConditionName(e.condition) +
                                                   " cannot come from model " + ModelName(e.model));
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<UtteranceEntry> ReadManifest(const std::string &path) {
  return ParseManifest(ReadTextFile(path));
}

std::string FormatManifest(const std::vector<UtteranceEntry> &entries) {
  CsvTable t;
  t.header = {"utterance_id", "condition", "model", "speaker_id", "gender", "seen", "path"};
  for (const auto &e : entries)
    t.rows.push_back({e.utterance_id, ConditionName(e.condition), ModelName(e.model), e.speaker_id,
                      e.gender == Gender::kM ? "M" : "F", e.seen ? "1" : "0", e.path});
  return FormatCsv(t, {true, false, false, true, false, false, true});
}

void WriteManifest(const std::string &path, const std::vector<UtteranceEntry> &entries) {
  WriteTextFile(path, FormatManifest(entries));
}

}  // namespace cltts::eval
