// Copyright 2026 The prae Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRAE_TESTS_TEST_UTIL_H_
#define PRAE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "prae/geometry.h"
#include "prae/tensor.h"

namespace prae::testing {

inline std::vector<Point3f> random_points(std::size_t n, std::mt19937_64& rng,
                                          float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<Point3f> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

inline PointCloud random_cloud(std::size_t n, std::mt19937_64& rng) {
  return PointCloud(random_points(n, rng));
}

template <typename T>
BasicTensor<T> random_tensor(const Shape& shape, std::mt19937_64& rng,
                             double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  BasicTensor<T> t(shape);
  for (T& v : t.values()) v = static_cast<T>(u(rng));
  return t;
}

// Largest elementwise |a - n| / max(|a|, |n|, floor) between analytic
// gradients and central differences of `loss` over every entry of
// `params`. Below the floor the comparison becomes absolute: an entry
// whose true gradient is zero (a bias feeding a train-mode batch norm)
// differs from its difference quotient only by rounding noise.
inline double finite_difference_error(const std::function<double()>& loss,
                                      std::span<double> params,
                                      std::span<const double> analytic,
                                      double h, double floor = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss();
    params[i] = saved - h;
    const double down = loss();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

// Brute-force minimum over all permutations of the mean pair cost.
inline double permutation_minimum(const std::vector<Point3f>& p,
                                  const std::vector<Point3f>& q) {
  std::vector<std::size_t> perm(p.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = INFINITY;
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      sum += squared_distance(p[i], q[perm[i]]);
    }
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(p.size());
}

// First-index brute-force nearest neighbor.
inline std::pair<std::size_t, double> naive_nearest(
    const Point3f& q, const std::vector<Point3f>& to) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t j = 0; j < to.size(); ++j) {
    const double dx = double(q[0]) - double(to[j][0]);
    const double dy = double(q[1]) - double(to[j][1]);
    const double dz = double(q[2]) - double(to[j][2]);
    const double d = dx * dx + dy * dy + dz * dz;
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return {best, best_d};
}

// Fresh, empty scratch directory under the system temp path.
inline std::string temp_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("prae_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace prae::testing

#endif  // PRAE_TESTS_TEST_UTIL_H_
