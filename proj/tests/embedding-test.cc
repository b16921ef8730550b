// tests/embedding-test.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cltts/base/error.h"
#include "doctest.h"
#include "jacobi.h"
#include "test-util.h"

using namespace cltts;
using namespace cltts::embedding;
using cltts::testing::RandomVector;

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

EmbeddingSet MakeSet(const std::vector<Vec> &vs) {
  std::vector<SpeakerEmbedding> items;
  for (std::size_t i = 0; i < vs.size(); ++i)
    items.push_back({"s" + std::to_string(i), "T", vs[i]});
  return EmbeddingSet(std::move(items));
}

// Biased covariance and mean by direct summation.
Mat Covariance(const std::vector<Vec> &xs, Vec *mean_out = nullptr) {
  const std::size_t n = xs.size(), d = xs[0].size();
  Vec mean(d, 0.0);
  for (const auto &x : xs)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j] / static_cast<double>(n);
  Mat c(d, Vec(d, 0.0));
  for (const auto &x : xs)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        c[i][j] += (x[i] - mean[i]) * (x[j] - mean[j]) / static_cast<double>(n);
  if (mean_out) *mean_out = mean;
  return c;
}

double Norm(const Vec &v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ErrorCode CodeOf(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

// Exhaustive threshold sweep: every unique score (and one threshold above
// all of them) is tried by recounting all trials.
double OracleEer(const std::vector<TrialScore> &trials) {
  std::vector<double> th;
  for (const auto &t : trials) th.push_back(t.score);
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  double step = th.size() > 1 ? th.back() - th[th.size() - 2] : 1.0;
  th.push_back(th.back() + step);
  double nt = 0, nn = 0;
  for (const auto &t : trials) (t.is_target ? nt : nn) += 1;
  auto rates = [&](double theta) {
    double fr = 0, fa = 0;
    for (const auto &t : trials) {
      if (t.is_target && t.score < theta) fr += 1;
      if (!t.is_target && t.score >= theta) fa += 1;
    }
    return std::pair{fr / nt, fa / nn};
  };
  auto [fr0, fa0] = rates(th[0]);
  for (std::size_t k = 1; k < th.size(); ++k) {
    auto [fr1, fa1] = rates(th[k]);
    double d0 = fr0 - fa0, d1 = fr1 - fa1;
    if (d1 >= 0) return fr0 + d0 / (d0 - d1) * (fr1 - fr0);
    fr0 = fr1;
    fa0 = fa1;
  }
  return -1.0;
}

}  // namespace

TEST_CASE("l2 normalize") {
  Vec v(128, 0.0);
  v[0] = 3;
  v[1] = 4;
  auto n = L2Normalize(v);
  CHECK(n[0] == doctest::Approx(0.6));
  CHECK(n[1] == doctest::Approx(0.8));
  Vec e1(5, 0.0);
  e1[0] = 1;
  CHECK(L2Normalize(e1) == e1);
  CHECK(CodeOf([] { L2Normalize(Vec(4, 0.0)); }) == ErrorCode::kZeroVector);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    auto x = RandomVector(rng, 1 + rng.Below(64), std::exp(rng.Normal() * 3));
    auto y = L2Normalize(x);
    CHECK(std::abs(Norm(y) - 1.0) < 1e-12);
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(y[j] * Norm(x) == doctest::Approx(x[j]));
  }
}

TEST_CASE("cosine scale invariance and nearest neighbour stability") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    std::size_t d = 2 + rng.Below(127);
    auto u = RandomVector(rng, d), v = RandomVector(rng, d);
    double a = std::exp(rng.Normal() * 2), b = std::exp(rng.Normal() * 2);
    Vec au = u, bv = v;
    for (auto &x : au) x *= a;
    for (auto &x : bv) x *= b;
    double c = CosineScore(u, v);
    CHECK(std::abs(CosineScore(au, bv) - c) < 1e-9);
    CHECK(std::abs(CosineScore(L2Normalize(u), L2Normalize(v)) - c) < 1e-9);
    CHECK(c == doctest::Approx(CosineScore(v, u)));
  }
  Vec u = {1, 2, 3};
  CHECK(CosineScore(u, u) == doctest::Approx(1.0));
  CHECK(CosineScore(Vec{1, 0}, Vec{0, 1}) == doctest::Approx(0.0));
  CHECK(CodeOf([] { CosineScore(Vec{0, 0}, Vec{1, 0}); }) == ErrorCode::kZeroVector);
}

TEST_CASE("whitening of a scaled square matches the closed form") {
  // Points (+-2, +-1): covariance diag(4, 1), so W = diag(1/2, 1).
  auto set = MakeSet({{2, 1}, {-2, -1}, {2, -1}, {-2, 1}});
  auto t = FitWhitening(set, 0.0);
  CHECK(t.mean[0] == doctest::Approx(0.0));
  CHECK(t.matrix(0, 0) == doctest::Approx(0.5));
  CHECK(t.matrix(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(t.matrix(0, 1)) < 1e-12);

  // A rotated version: closed-form 2x2 eigenvalues of [[a, b], [b, c]].
  double ang = 0.4, cs = std::cos(ang), sn = std::sin(ang);
  std::vector<Vec> pts;
  for (auto p : std::vector<Vec>{{2, 1}, {-2, -1}, {2, -1}, {-2, 1}})
    pts.push_back({cs * p[0] - sn * p[1] + 3.0, sn * p[0] + cs * p[1] - 1.0});
  auto cov = Covariance(pts);
  double a = cov[0][0], b = cov[0][1], c = cov[1][1];
  double mid = (a + c) / 2, rad = std::sqrt((a - c) * (a - c) / 4 + b * b);
  CHECK(mid + rad == doctest::Approx(4.0));
  CHECK(mid - rad == doctest::Approx(1.0));
  auto tr = FitWhitening(MakeSet(pts), 0.0);
  std::vector<Vec> out;
  for (auto &p : pts) out.push_back(ApplyWhitening(tr, p));
  auto wc = Covariance(out);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(wc[i][j] - (i == j ? 1.0 : 0.0)) < 1e-9);
  CHECK(tr.matrix(0, 1) == doctest::Approx(tr.matrix(1, 0)));
}

TEST_CASE("whitening exactness on random full-rank sets") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t d = 2 + rng.Below(20), n = d + 5 + rng.Below(60);
    auto mix = cltts::testing::RandomMatrix(rng, d, d);
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < n; ++i) {
      auto z = RandomVector(rng, d);
      Vec x(d, 0.0);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t k = 0; k < d; ++k) x[r] += mix(r, k) * z[k];
      pts.push_back(x);
    }
    auto t = FitWhitening(MakeSet(pts), 0.0);
    std::vector<Vec> out;
    for (auto &p : pts) out.push_back(ApplyWhitening(t, p));
    Vec mean;
    auto c = Covariance(out, &mean);
    for (double m : mean) CHECK(std::abs(m) < 1e-9);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(c[i][j] - (i == j ? 1.0 : 0.0)) < 1e-6);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        CHECK(t.matrix(i, j) == doctest::Approx(t.matrix(j, i)).epsilon(1e-9));
  }
}

TEST_CASE("whitening matrix equals U (L + eps)^(-1/2) U^T from an independent solver") {
  Rng rng(4);
  std::vector<Vec> pts;
  for (int i = 0; i < 40; ++i) {
    auto v = RandomVector(rng, 6);
    v[1] += 2 * v[0];
    pts.push_back(v);
  }
  const double eps = 0.1;
  auto t = FitWhitening(MakeSet(pts), eps);
  auto eig = cltts::testing::JacobiEigen(Covariance(pts));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      double w = 0;
      for (std::size_t k = 0; k < 6; ++k)
        w += eig.vectors[k][i] * eig.vectors[k][j] / std::sqrt(eig.values[k] + eps);
      CHECK(t.matrix(i, j) == doctest::Approx(w).epsilon(1e-9));
    }
  }
}

TEST_CASE("whitening edge cases") {
  Rng rng(5);
  CHECK(CodeOf([] { FitWhitening(MakeSet({{1, 2}}), 0.0); }) == ErrorCode::kDegenerateSet);
  auto t = FitWhitening(MakeSet({{1, 2}, {3, 4}, {0, 1}}));
  CHECK(CodeOf([&] { ApplyWhitening(t, Vec{1, 2, 3}); }) == ErrorCode::kDimensionMismatch);
  auto at_mean = ApplyWhitening(t, t.mean);
  for (double x : at_mean) CHECK(x == doctest::Approx(0.0));
  // Data that is already white maps through a near-identity matrix.
  std::vector<Vec> white;
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0})
      for (double z : {-1.0, 1.0}) white.push_back({x, y, z});
  auto w = FitWhitening(MakeSet(white), 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(w.matrix(i, j) - (i == j ? 1.0 : 0.0)) < 1e-6);
}

TEST_CASE("eer fixed cases") {
  std::vector<TrialScore> sep, flip;
  for (int i = 0; i < 10; ++i) {
    sep.push_back({"e", "t", 1.0, true});
    sep.push_back({"e", "n", 0.0, false});
    flip.push_back({"e", "t", 0.0, true});
    flip.push_back({"e", "n", 1.0, false});
  }
  CHECK(ComputeEer(sep).eer == 0.0);
  CHECK(ComputeEer(flip).eer == doctest::Approx(1.0));
  std::vector<TrialScore> one = {{"a", "b", 0.3, true}};
  CHECK(CodeOf([&] { ComputeEer(one); }) == ErrorCode::kOneClassOnly);
}

TEST_CASE("eer equals the exhaustive sweep on randomized trial sets") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + rng.Below(400);
    double shift = rng.Uniform(-1, 4);
    bool ties = rng.Below(3) == 0;
    std::vector<TrialScore> t;
    for (std::size_t i = 0; i < n; ++i) {
      bool target = i == 0 ? true : (i == 1 ? false : rng.Below(2) == 1);
      double s = rng.Normal() + (target ? shift : 0.0);
      if (ties) s = std::round(s * 4) / 4;
      t.push_back({"e", "t", s, target});
    }
    auto r = ComputeEer(t);
    CHECK(std::abs(r.eer - OracleEer(t)) < 1e-9);
    CHECK(r.eer >= 0.0);
    CHECK(r.eer <= 1.0);
  }
}

TEST_CASE("eer of uninformative scores is near one half") {
  Rng rng(7);
  std::vector<TrialScore> t;
  for (int i = 0; i < 10000; ++i) t.push_back({"e", "t", rng.Normal(), rng.Below(2) == 1});
  CHECK(std::abs(ComputeEer(t).eer - 0.5) < 0.05);
}

TEST_CASE("2-d projection") {
  Rng rng(8);
  // 2-D input: a rotation of the centered data, variance preserved.
  std::vector<Vec> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({rng.Normal() * 3, rng.Normal()});
  auto proj = Project2d(MakeSet(pts));
  Vec mean;
  auto cov = Covariance(pts, &mean);
  double var_in = cov[0][0] + cov[1][1], var_out = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    var_out += (proj[i].x * proj[i].x + proj[i].y * proj[i].y) / pts.size();
    double din = std::hypot(pts[i][0] - mean[0], pts[i][1] - mean[1]);
    CHECK(std::hypot(proj[i].x, proj[i].y) == doctest::Approx(din));
  }
  CHECK(var_out == doctest::Approx(var_in));

  // Collinear points: all y = 0.
  std::vector<Vec> line;
  auto dir = RandomVector(rng, 10);
  for (int i = 0; i < 12; ++i) {
    Vec p(10);
    double s = rng.Normal();
    for (int j = 0; j < 10; ++j) p[j] = 1.0 + s * dir[j];
    line.push_back(p);
  }
  for (auto &p : Project2d(MakeSet(line))) CHECK(std::abs(p.y) < 1e-9);

  // 128-D: captured variance equals the top two eigenvalues.
  std::vector<Vec> big;
  for (int i = 0; i < 60; ++i) {
    auto v = RandomVector(rng, 128);
    v[3] += 4 * v[0];
    v[7] += 2 * v[1];
    big.push_back(v);
  }
  auto eig = cltts::testing::JacobiEigen(Covariance(big));
  double captured = 0;
  for (auto &p : Project2d(MakeSet(big))) captured += (p.x * p.x + p.y * p.y) / big.size();
  CHECK(captured == doctest::Approx(eig.values[0] + eig.values[1]).epsilon(1e-8));
  CHECK(CodeOf([] { Project2d(MakeSet({{1, 2}, {2, 3}})); }) == ErrorCode::kDegenerateSet);
}

TEST_CASE("embedding text format round trip and validation") {
  auto corpus = MakeSyntheticCorpus({.dim = 8,
                                     .num_clusters = 2,
                                     .speakers_per_cluster = 3,
                                     .utterances_per_speaker = 2,
                                     .seed = 9});
  auto back = ParseEmbeddings(FormatEmbeddings(corpus.embeddings));
  REQUIRE(back.size() == corpus.embeddings.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].speaker_id == corpus.embeddings[i].speaker_id);
    CHECK(back[i].vector == corpus.embeddings[i].vector);
  }
  CHECK_THROWS_AS(ParseEmbeddings("dim=2\na\tX\t1 2 3\n"), Error);
  CHECK_THROWS_AS(ParseEmbeddings("dim=2\na\tX\t1 nan\n"), Error);
  CHECK_THROWS_AS(ParseEmbeddings("dim=2\na\tX\t1 2\na\tX\t3 4\n"), Error);
  CHECK_THROWS_AS(ParseEmbeddings(""), Error);
}

TEST_CASE("normalize modes and explicit fit set") {
  Rng rng(10);
  std::vector<Vec> a, b;
  for (int i = 0; i < 30; ++i) {
    a.push_back(RandomVector(rng, 4, 2.0));
    b.push_back(RandomVector(rng, 4, 0.5));
  }
  auto sa = MakeSet(a), sb = MakeSet(b);
  auto l2 = Normalize(sa, NormMode::kL2);
  for (auto &e : l2.items()) CHECK(Norm(e.vector) == doctest::Approx(1.0));
  auto self = Normalize(sa, NormMode::kWhiten);
  auto other = Normalize(sa, NormMode::kWhiten, &sb);
  CHECK(self[0].vector != other[0].vector);
  auto expect = ApplyWhitening(FitWhitening(sb), a[0]);
  for (std::size_t j = 0; j < 4; ++j) CHECK(other[0].vector[j] == doctest::Approx(expect[j]));
  CHECK(ParseNormMode("whiten") == NormMode::kWhiten);
  CHECK_THROWS_AS(ParseNormMode("pca"), Error);
}

TEST_CASE("synthetic corpus is deterministic and separable") {
  SyntheticOptions o;
  o.seed = 11;
  auto c1 = MakeSyntheticCorpus(o), c2 = MakeSyntheticCorpus(o);
  CHECK(c1.embeddings.size() == c2.embeddings.size());
  CHECK(c1.embeddings[5].vector == c2.embeddings[5].vector);
  auto eer = ComputeEer(ScoreTrials(c1.embeddings, c1.trials)).eer;
  CHECK(eer < 0.2);
}
