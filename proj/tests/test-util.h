// tests/test-util.h

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

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cltts/base/rng.h"
#include "cltts/base/tensor.h"

namespace cltts::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cltts-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string File(const std::string &name) const { return (path_ / name).string(); }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> RandomVector(Rng &rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double &x : v) x = scale * rng.Normal();
  return v;
}

inline Matrix RandomMatrix(Rng &rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double &x : m.data()) x = scale * rng.Normal();
  return m;
}

// Largest |a - n| / max(1e-8, |a| + |n|) over one tensor, comparing the
// analytic gradient a with the central difference n of loss().
struct GradCheck {
  std::string name;
  double worst = 0.0;
};

inline std::vector<GradCheck> CheckGradients(ParameterStore &params, const ParameterStore &analytic,
                                             const std::function<double()> &loss, double h = 1e-5) {
  std::vector<GradCheck> out;
  for (const std::string &name : params.Names()) {
    GradCheck g{name, 0.0};
    const std::size_t n = params.Get(name).size();
    for (std::size_t i = 0; i < n; ++i) {
      double &w = params.Mutable(name).data[i];
      const double saved = w;
      w = saved + h;
      double up = loss();
      params.Mutable(name).data[i] = saved - h;
      double down = loss();
      params.Mutable(name).data[i] = saved;
      double numeric = (up - down) / (2.0 * h);
      double a = analytic.Get(name).data[i];
      double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      g.worst = std::max(g.worst, rel);
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace cltts::testing
