// include/cltts/eval/ratings.h

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

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cltts/eval/eval-set.h"

namespace cltts::eval {

enum class Axis { kIntelligibility, kNaturalness, kSimilarity };

// Accepts the full names and the single letters I, N, S (any case). Throws
// kUnknownAxis.
Axis ParseAxis(const std::string &name);
const char *AxisName(Axis axis);

struct RatingRecord {
  std::string rater_id;
  std::string utterance_id;
  Axis axis = Axis::kNaturalness;
  double score = 0.0;
};

// Scores live on the 1..5 scale in steps of 0.5. Throws kBadScore.
void ValidateRating(const RatingRecord &r);

struct MosSummary {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 s / sqrt(n), sample standard deviation
  std::size_t n = 0;

  // "4.47 ± 0.22"
  std::string Format() const;
};

// Throws kEmptyGroup.
MosSummary Summarize(std::span<const double> scores);

struct GroupKey {
  Condition condition;
  Model model;
  Axis axis;
  auto operator<=>(const GroupKey &) const = default;
};

// Groups ratings by the (condition, model) of their utterance in the
// manifest and by axis. Every record is validated; ratings of utterances
// absent from the manifest give kInvalidArgument.
std::map<GroupKey, MosSummary> SummarizeRatings(const std::vector<RatingRecord> &records,
                                                const std::vector<UtteranceEntry> &manifest);

// Header rater_id,utterance_id,axis,score.
std::vector<RatingRecord> ReadRatings(const std::string &path);
std::vector<RatingRecord> ParseRatings(const std::string &text);
void WriteRatings(const std::string &path, const std::vector<RatingRecord> &records);

// One line per group: condition, model, axis, then the formatted summary
// and n, tab-separated.
std::string FormatMosTable(const std::map<GroupKey, MosSummary> &table);

}  // namespace cltts::eval
