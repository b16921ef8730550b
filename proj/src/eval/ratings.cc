// src/eval/ratings.cc

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

#include "cltts/eval/ratings.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"

namespace cltts::eval {

Axis ParseAxis(const std::string &name) {
  std::string n;
  for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (n == "intelligibility" || n == "i") return Axis::kIntelligibility;
  if (n == "naturalness" || n == "n") return Axis::kNaturalness;
  if (n == "similarity" || n == "s") return Axis::kSimilarity;
  throw Error(ErrorCode::kUnknownAxis, "unknown rating axis '" + name + "'");
}

const char *AxisName(Axis axis) {
  switch (axis) {
    case Axis::kIntelligibility:
      return "Intelligibility";
    case Axis::kNaturalness:
      return "Naturalness";
    case Axis::kSimilarity:
      return "Similarity";
  }
  return "?";
}

void ValidateRating(const RatingRecord &r) {
  const double s = r.score;
  if (!std::isfinite(s) || s < 1.0 || s > 5.0)
    throw Error(ErrorCode::kBadScore,
                fmt::format("score {} from rater {} is outside 1..5", s, r.rater_id));
  if (2.0 * s != std::floor(2.0 * s))
    throw Error(ErrorCode::kBadScore,
                fmt::format("score {} from rater {} is not a multiple of 0.5", s, r.rater_id));
}

std::string MosSummary::Format() const { return fmt::format("{:.2f} ± {:.2f}", mean, ci95); }

MosSummary Summarize(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyGroup, "no ratings in group");
  MosSummary m;
  m.n = scores.size();
  double sum = 0.0;
  for (double s : scores) sum += s;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double s : scores) ss += (s - m.mean) * (s - m.mean);
    double sd = std::sqrt(ss / static_cast<double>(m.n - 1));
    m.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(m.n));
  }
  return m;
}

std::map<GroupKey, MosSummary> SummarizeRatings(const std::vector<RatingRecord> &records,
                                                const std::vector<UtteranceEntry> &manifest) {
  std::unordered_map<std::string, const UtteranceEntry *> by_id;
  for (const auto &e : manifest) by_id[e.utterance_id] = &e;
  std::map<GroupKey, std::vector<double>> groups;
  for (const auto &r : records) {
    ValidateRating(r);
    auto it = by_id.find(r.utterance_id);
    if (it == by_id.end())
      throw Error(ErrorCode::kInvalidArgument,
                  "rating for utterance " + r.utterance_id + " which is not in the manifest");
    groups[{it->second->condition, it->second->model, r.axis}].push_back(r.score);
  }
  std::map<GroupKey, MosSummary> out;
  for (const auto &[key, scores] : groups) out[key] = Summarize(scores);
  return out;
}

std::vector<RatingRecord> ParseRatings(const std::string &text) {
  CsvTable t = ParseCsv(text);
  const std::size_t rater = t.Column("rater_id"), utt = t.Column("utterance_id"),
                    axis = t.Column("axis"), score = t.Column("score");
  std::vector<RatingRecord> out;
  for (const auto &row : t.rows) {
    RatingRecord r;
    r.rater_id = row[rater];
    r.utterance_id = row[utt];
    r.axis = ParseAxis(row[axis]);
    std::size_t used = 0;
    try {
      r.score = std::stod(row[score], &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != row[score].size())
      throw Error(ErrorCode::kBadScore, "score '" + row[score] + "' is not a number");
    ValidateRating(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RatingRecord> ReadRatings(const std::string &path) {
  return ParseRatings(ReadTextFile(path));
}

void WriteRatings(const std::string &path, const std::vector<RatingRecord> &records) {
  CsvTable t;
  t.header = {"rater_id", "utterance_id", "axis", "score"};
  for (const auto &r : records)
    t.rows.push_back({r.rater_id, r.utterance_id, AxisName(r.axis), fmt::format("{}", r.score)});
  WriteCsv(path, t, {true, true, false, false});
}

std::string FormatMosTable(const std::map<GroupKey, MosSummary> &table) {
  std::string out;
  for (const auto &[key, m] : table)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", ConditionName(key.condition), ModelName(key.model),
                       AxisName(key.axis), m.Format(), m.n);
  return out;
}

}  // namespace cltts::eval
