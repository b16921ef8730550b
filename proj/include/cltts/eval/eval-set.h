// include/cltts/eval/eval-set.h

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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cltts/base/config.h"

namespace cltts::eval {

enum class Condition { kGT, kBaseline, kFAE, kFNE, kNE, kFAM, kFNM, kNM };
enum class Model { kNone, kNoNorm, kL2Norm, kWhitening, kBaseline };
enum class Gender { kM, kF };

// Names as used in manifests: GT, Baseline, FAE, ..., NM and none, no-norm,
// l2-norm, whitening, baseline. Parsing throws kInvalidArgument.
const char *ConditionName(Condition c);
const char *ModelName(Model m);
Condition ParseCondition(const std::string &name);
Model ParseModel(const std::string &name);

// English conditions FAE, FNE, NE; Mandarin FAM, FNM, NM.
bool IsEnglishCondition(Condition c);
bool IsMandarinCondition(Condition c);

// Presentation order inside each multilingual model block.
inline constexpr Condition kModelBlockOrder[] = {Condition::kFAE, Condition::kFNE, Condition::kNE,
                                                 Condition::kFAM, Condition::kFNM, Condition::kNM};
inline constexpr Model kMultilingualModels[] = {Model::kNoNorm, Model::kL2Norm, Model::kWhitening};

struct UtteranceEntry {
  std::string utterance_id;
  Condition condition = Condition::kGT;
  Model model = Model::kNone;
  std::string speaker_id;
  Gender gender = Gender::kM;
  bool seen = true;
  std::string path;

  bool operator==(const UtteranceEntry &) const = default;
};

using PoolKey = std::pair<Condition, Model>;
using Pools = std::map<PoolKey, std::vector<UtteranceEntry>>;

// "FAE/whitening"
std::string PoolName(const PoolKey &key);

Pools GroupPools(const std::vector<UtteranceEntry> &entries);

// Quotas; the default is 16 ground truth + 12 baseline + 3 models x 6
// conditions x 4 = 100.
struct EvalSetLayout {
  std::size_t ground_truth = 16;
  std::size_t baseline = 12;
  std::size_t per_condition = 4;

  std::size_t total() const { return ground_truth + baseline + 18 * per_condition; }
  static EvalSetLayout FromConfig(const Config &c);
};

struct EvalSet {
  std::vector<UtteranceEntry> entries;
  std::uint64_t seed = 0;
};

// Ground truth block, baseline block, then one block per multilingual model
// (no-norm, l2-norm, whitening) with conditions in kModelBlockOrder. Each
// quota is drawn without replacement from its pool so that male and female
// counts differ by at most one and so do seen and unseen counts. Throws
// kInsufficientPool naming the pool when that is impossible, and
// kInvalidArgument when an entry disagrees with the pool it is filed under
// (wrong condition or model, ground truth with a model, a Mandarin
// condition in an English pool and so on).
EvalSet BuildEvalSet(const Pools &pools, std::uint64_t seed, const EvalSetLayout &layout = {});

// Header utterance_id,condition,model,speaker_id,gender,seen,path.
std::vector<UtteranceEntry> ReadManifest(const std::string &path);
std::vector<UtteranceEntry> ParseManifest(const std::string &text);
std::string FormatManifest(const std::vector<UtteranceEntry> &entries);
void WriteManifest(const std::string &path, const std::vector<UtteranceEntry> &entries);

}  // namespace cltts::eval
