// include/cltts/embedding/embedding.h

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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cltts/base/tensor.h"

namespace cltts::embedding {

struct SpeakerEmbedding {
  std::string speaker_id;
  std::string dataset;  // corpus tag such as LS, ST, CU, AI
  std::vector<double> vector;
};

// Non-empty set of finite embeddings of one dimension, unique per
// (speaker_id, dataset).
class EmbeddingSet {
 public:
  explicit EmbeddingSet(std::vector<SpeakerEmbedding> embeddings);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return items_.size(); }
  const SpeakerEmbedding &operator[](std::size_t i) const { return items_[i]; }
  const std::vector<SpeakerEmbedding> &items() const { return items_; }

  // Lookup by speaker_id, or by "dataset:speaker_id" when ids repeat across
  // datasets. Returns nullptr when absent or ambiguous.
  const SpeakerEmbedding *Find(const std::string &key) const;

 private:
  std::vector<SpeakerEmbedding> items_;
  std::size_t dim_ = 0;
};

// Text format: "dim=D" header, then speaker_id<TAB>dataset<TAB>c1 c2 ... cD.
EmbeddingSet ParseEmbeddings(const std::string &text);
EmbeddingSet ReadEmbeddings(const std::string &path);
std::string FormatEmbeddings(const EmbeddingSet &set);
void WriteEmbeddings(const std::string &path, const EmbeddingSet &set);

std::vector<double> L2Normalize(std::span<const double> v);

struct WhiteningTransform {
  std::vector<double> mean;
  Matrix matrix;  // D x D, symmetric (ZCA)
  double epsilon = 0.0;

  std::size_t dim() const { return mean.size(); }
};

inline constexpr double kDefaultWhiteningEpsilon = 1e-5;

// ZCA whitening W = U (L + eps I)^(-1/2) U^T from the biased (1/N) sample
// covariance U L U^T of the set.
WhiteningTransform FitWhitening(const EmbeddingSet &set, double epsilon = kDefaultWhiteningEpsilon);
std::vector<double> ApplyWhitening(const WhiteningTransform &t, std::span<const double> v);

double CosineScore(std::span<const double> u, std::span<const double> v);

enum class NormMode { kNone, kL2, kWhiten };
NormMode ParseNormMode(const std::string &name);

// Applies the normalization to every embedding. Whitening is fitted on
// fit_set when given, otherwise on the set itself.
EmbeddingSet Normalize(const EmbeddingSet &set, NormMode mode,
                       const EmbeddingSet *fit_set = nullptr,
                       double epsilon = kDefaultWhiteningEpsilon);

struct TrialScore {
  std::string enroll_id;
  std::string test_id;
  double score = 0.0;
  bool is_target = false;
};

struct Trial {
  std::string enroll_id;
  std::string test_id;
  bool is_target = false;
};

// enroll_id<TAB>test_id<TAB>{target|nontarget}
std::vector<Trial> ParseTrials(const std::string &text);
std::vector<Trial> ReadTrials(const std::string &path);

// Cosine scores for each trial, in trial order.
std::vector<TrialScore> ScoreTrials(const EmbeddingSet &set, const std::vector<Trial> &trials);

struct EerResult {
  double eer = 0.0;        // proportion in [0, 1]
  double threshold = 0.0;  // score at the crossing
};

// Sweeps the sorted unique scores as thresholds (accept when score >=
// threshold), interpolating linearly where the false-reject rate first
// reaches the false-accept rate.
EerResult ComputeEer(std::span<const TrialScore> trials);

struct ProjectedPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

// PCA onto the two leading principal axes of the centered set; each axis is
// signed so its largest-magnitude loading is positive. Labels are dataset
// tags.
std::vector<ProjectedPoint> Project2d(const EmbeddingSet &set);

struct SyntheticOptions {
  std::size_t dim = 128;
  std::size_t num_clusters = 5;  // datasets
  std::size_t speakers_per_cluster = 20;
  std::size_t utterances_per_speaker = 5;
  double cluster_spread = 3.0;
  double speaker_spread = 1.0;
  double utterance_noise = 0.5;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  EmbeddingSet embeddings;
  std::vector<Trial> trials;
};

// Gaussian dataset centers, speaker means around them, utterances around the
// speaker means. Ids are "<dataset>-s<k>-u<j>"; trials pair each speaker's
// first utterance against every other utterance of its own cluster.
SyntheticCorpus MakeSyntheticCorpus(const SyntheticOptions &opts);

}  // namespace cltts::embedding
