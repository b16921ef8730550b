// src/embedding/embedding.cc

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

#include "cltts/embedding/embedding.h"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cltts/base/csv.h"
#include "cltts/base/error.h"
#include "cltts/base/rng.h"
#include "cltts/kernels/kernels.h"

namespace cltts::embedding {

EmbeddingSet::EmbeddingSet(std::vector<SpeakerEmbedding> embeddings)
    : items_(std::move(embeddings)) {
  if (items_.empty()) throw Error(ErrorCode::kDegenerateSet, "empty embedding set");
  dim_ = items_[0].vector.size();
  if (dim_ == 0) throw Error(ErrorCode::kDimensionMismatch, "zero-dimensional embedding");
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto &e : items_) {
    if (e.vector.size() != dim_)
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("{} has dim {}, expected {}", e.speaker_id, e.vector.size(), dim_));
    for (double v : e.vector)
      if (!std::isfinite(v))
        throw Error(ErrorCode::kFormat, "non-finite component in " + e.speaker_id);
    if (!seen.insert({e.speaker_id, e.dataset}).second)
      throw Error(ErrorCode::kFormat, "duplicate embedding " + e.dataset + ":" + e.speaker_id);
  }
}

const SpeakerEmbedding *EmbeddingSet::Find(const std::string &key) const {
  const SpeakerEmbedding *found = nullptr;
  for (const auto &e : items_) {
    if (e.speaker_id == key || e.dataset + ":" + e.speaker_id == key) {
      if (found != nullptr) return nullptr;
      found = &e;
    }
  }
  return found;
}

namespace {

double ParseDouble(const std::string &s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::kFormat, "bad number '" + s + "'");
  return v;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, '\t')) out.push_back(field);
  return out;
}

}  // namespace

EmbeddingSet ParseEmbeddings(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  std::size_t dim = 0;
  bool have_header = false;
  std::vector<SpeakerEmbedding> items;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line.rfind("dim=", 0) != 0)
        throw Error(ErrorCode::kFormat, "embedding file must start with dim=D");
      dim = static_cast<std::size_t>(ParseDouble(line.substr(4)));
      have_header = true;
      continue;
    }
    auto fields = SplitTabs(line);
    if (fields.size() != 3)
      throw Error(ErrorCode::kFormat,
                  fmt::format("embedding line {}: expected 3 tab-separated fields", line_no));
    SpeakerEmbedding e{fields[0], fields[1], {}};
    std::istringstream comps(fields[2]);
    std::string c;
    while (comps >> c) e.vector.push_back(ParseDouble(c));
    if (e.vector.size() != dim)
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("embedding line {}: {} components, header says {}", line_no,
                              e.vector.size(), dim));
    items.push_back(std::move(e));
  }
  if (!have_header) throw Error(ErrorCode::kFormat, "empty embedding file");
  return EmbeddingSet(std::move(items));
}

EmbeddingSet ReadEmbeddings(const std::string &path) { return ParseEmbeddings(ReadTextFile(path)); }

std::string FormatEmbeddings(const EmbeddingSet &set) {
  std::string out = fmt::format("dim={}\n", set.dim());
  for (const auto &e : set.items()) {
    out += e.speaker_id + "\t" + e.dataset + "\t";
    for (std::size_t i = 0; i < e.vector.size(); ++i) {
      if (i) out += ' ';
      out += fmt::format("{:.17g}", e.vector[i]);
    }
    out += '\n';
  }
  return out;
}

void WriteEmbeddings(const std::string &path, const EmbeddingSet &set) {
  WriteTextFile(path, FormatEmbeddings(set));
}

std::vector<double> L2Normalize(std::span<const double> v) {
  double norm = std::sqrt(kernels::SumSquares(v));
  if (!(norm > 0.0)) throw Error(ErrorCode::kZeroVector, "cannot normalize zero vector");
  std::vector<double> out(v.begin(), v.end());
  for (double &x : out) x /= norm;
  return out;
}

WhiteningTransform FitWhitening(const EmbeddingSet &set, double epsilon) {
  if (set.size() < 2)
    throw Error(ErrorCode::kDegenerateSet, "whitening needs at least 2 embeddings");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  const std::size_t n = set.size(), d = set.dim();
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = set[i].vector[j];
  Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::kNumericalFailure, "covariance eigendecomposition failed");
  Eigen::VectorXd lambda = eig.eigenvalues().array() + epsilon;
  if (lambda.minCoeff() <= 0.0)
    throw Error(ErrorCode::kNumericalFailure,
                "covariance is singular; use epsilon > 0 or more data");
  const Eigen::MatrixXd &u = eig.eigenvectors();
  Eigen::MatrixXd w = u * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();

  WhiteningTransform t;
  t.epsilon = epsilon;
  t.mean.assign(mean.data(), mean.data() + d);
  t.matrix = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) t.matrix(i, j) = 0.5 * (w(i, j) + w(j, i));
  return t;
}

std::vector<double> ApplyWhitening(const WhiteningTransform &t, std::span<const double> v) {
  if (v.size() != t.dim())
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("vector dim {} vs transform dim {}", v.size(), t.dim()));
  std::vector<double> centered(v.begin(), v.end());
  for (std::size_t i = 0; i < centered.size(); ++i) centered[i] -= t.mean[i];
  std::vector<double> out(t.dim(), 0.0);
  kernels::Gemv(t.matrix.View(), centered, out);
  return out;
}

double CosineScore(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorCode::kDimensionMismatch, "cosine of vectors with different dims");
  double nu = kernels::SumSquares(u), nv = kernels::SumSquares(v);
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error(ErrorCode::kZeroVector, "cosine of zero vector");
  double c = kernels::Dot(u, v) / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

NormMode ParseNormMode(const std::string &name) {
  if (name == "none") return NormMode::kNone;
  if (name == "l2") return NormMode::kL2;
  if (name == "whiten") return NormMode::kWhiten;
  throw Error(ErrorCode::kInvalidArgument, "mode must be none, l2 or whiten");
}

EmbeddingSet Normalize(const EmbeddingSet &set, NormMode mode, const EmbeddingSet *fit_set,
                       double epsilon) {
  std::vector<SpeakerEmbedding> out = set.items();
  switch (mode) {
    case NormMode::kNone:
      break;
    case NormMode::kL2:
      for (auto &e : out) e.vector = L2Normalize(e.vector);
      break;
    case NormMode::kWhiten: {
      auto t = FitWhitening(fit_set ? *fit_set : set, epsilon);
      for (auto &e : out) e.vector = ApplyWhitening(t, e.vector);
      break;
    }
  }
  return EmbeddingSet(std::move(out));
}

std::vector<Trial> ParseTrials(const std::string &text) {
  std::vector<Trial> trials;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f.size() != 3 || (f[2] != "target" && f[2] != "nontarget"))
      throw Error(
          ErrorCode::kFormat,
          fmt::format("trial line {}: expected enroll<TAB>test<TAB>target|nontarget", line_no));
    trials.push_back({f[0], f[1], f[2] == "target"});
  }
  return trials;
}

std::vector<Trial> ReadTrials(const std::string &path) { return ParseTrials(ReadTextFile(path)); }

std::vector<TrialScore> ScoreTrials(const EmbeddingSet &set, const std::vector<Trial> &trials) {
  std::vector<TrialScore> out;
  out.reserve(trials.size());
  for (const auto &t : trials) {
    const auto *a = set.Find(t.enroll_id);
    const auto *b = set.Find(t.test_id);
    if (!a || !b)
      throw Error(ErrorCode::kFormat,
                  "trial references unknown or ambiguous id " + (a ? t.test_id : t.enroll_id));
    out.push_back({t.enroll_id, t.test_id, CosineScore(a->vector, b->vector), t.is_target});
  }
  return out;
}

EerResult ComputeEer(std::span<const TrialScore> trials) {
  std::vector<std::pair<double, bool>> scores;
  scores.reserve(trials.size());
  std::size_t num_target = 0;
  for (const auto &t : trials) {
    if (!std::isfinite(t.score)) throw Error(ErrorCode::kInvalidArgument, "non-finite trial score");
    scores.emplace_back(t.score, t.is_target);
    num_target += t.is_target;
  }
  const std::size_t num_nontarget = scores.size() - num_target;
  if (num_target == 0 || num_nontarget == 0)
    throw Error(ErrorCode::kOneClassOnly, "need target and non-target trials");
  std::sort(scores.begin(), scores.end());

  // Operating point for each unique score threshold; a final sentinel above
  // every score rejects everything.
  struct Point {
    double threshold, frr, far;
  };
  std::vector<Point> points;
  std::size_t targets_below = 0, nontargets_below = 0;
  for (std::size_t i = 0; i < scores.size();) {
    double s = scores[i].first;
    points.push_back({s, double(targets_below) / num_target,
                      double(num_nontarget - nontargets_below) / num_nontarget});
    for (; i < scores.size() && scores[i].first == s; ++i)
      (scores[i].second ? targets_below : nontargets_below)++;
  }
  double top = points.back().threshold;
  double step = points.size() > 1 ? top - points[points.size() - 2].threshold : 1.0;
  points.push_back({top + step, 1.0, 0.0});

  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    double d0 = points[k].frr - points[k].far;
    double d1 = points[k + 1].frr - points[k + 1].far;
    if (d1 >= 0.0) {
      double w = d0 / (d0 - d1);
      return {points[k].frr + w * (points[k + 1].frr - points[k].frr),
              points[k].threshold + w * (points[k + 1].threshold - points[k].threshold)};
    }
  }
  // Unreachable: the sentinel always has frr - far = 1.
  throw Error(ErrorCode::kNumericalFailure, "no EER crossing");
}

std::vector<ProjectedPoint> Project2d(const EmbeddingSet &set) {
  if (set.dim() < 2 || set.size() < 3)
    throw Error(ErrorCode::kDegenerateSet, "projection needs D >= 2 and >= 3 points");
  const std::size_t n = set.size(), d = set.dim();
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = set[i].vector[j];
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::kNumericalFailure, "covariance eigendecomposition failed");
  // Eigenvalues ascend; the last two columns are the leading axes.
  Eigen::MatrixXd axes(d, 2);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd a = eig.eigenvectors().col(d - 1 - k);
    Eigen::Index arg;
    a.cwiseAbs().maxCoeff(&arg);
    if (a(arg) < 0) a = -a;
    axes.col(k) = a;
  }
  Eigen::MatrixXd proj = centered * axes;
  std::vector<ProjectedPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {proj(i, 0), proj(i, 1), set[i].dataset};
  return out;
}

SyntheticCorpus MakeSyntheticCorpus(const SyntheticOptions &opts) {
  Rng rng(opts.seed);
  std::vector<SpeakerEmbedding> items;
  std::vector<Trial> trials;
  for (std::size_t c = 0; c < opts.num_clusters; ++c) {
    std::string dataset = fmt::format("D{}", c);
    std::vector<double> center(opts.dim);
    for (double &v : center) v = rng.Normal(0.0, opts.cluster_spread);
    std::vector<std::string> enroll_ids;
    std::vector<std::pair<std::string, std::size_t>> utts;  // (id, speaker)
    for (std::size_t s = 0; s < opts.speakers_per_cluster; ++s) {
      std::vector<double> spk(opts.dim);
      for (std::size_t j = 0; j < opts.dim; ++j)
        spk[j] = center[j] + rng.Normal(0.0, opts.speaker_spread);
      for (std::size_t u = 0; u < opts.utterances_per_speaker; ++u) {
        SpeakerEmbedding e{fmt::format("{}-s{}-u{}", dataset, s, u), dataset, {}};
        e.vector.resize(opts.dim);
        for (std::size_t j = 0; j < opts.dim; ++j)
          e.vector[j] = spk[j] + rng.Normal(0.0, opts.utterance_noise);
        if (u == 0)
          enroll_ids.push_back(e.speaker_id);
        else
          utts.emplace_back(e.speaker_id, s);
        items.push_back(std::move(e));
      }
    }
    for (std::size_t s = 0; s < enroll_ids.size(); ++s)
      for (const auto &[id, spk] : utts) trials.push_back({enroll_ids[s], id, spk == s});
  }
  return {EmbeddingSet(std::move(items)), std::move(trials)};
}

}  // namespace cltts::embedding
