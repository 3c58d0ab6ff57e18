// Copyright 2026 The cefopt Authors. All Rights Reserved.
//
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
// =============================================================================
#include "cefopt/reference.hpp"

#include <algorithm>
#include <numeric>

namespace cefopt {

namespace {

Vector top_k(const Vector& x, std::size_t k) {
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(x[a]) > std::abs(x[b]); });
  Vector out = Vector::Zero(x.size());
  for (std::size_t j = 0; j < k; ++j) out[order[j]] = x[order[j]];
  return out;
}

}  // namespace

std::vector<Vector> ef14_reference(const ProblemInstance& problem, double gamma,
                                   std::size_t T, std::size_t k) {
  const std::size_t n = problem.workers();
  const Index d = problem.dim();
  std::vector<Vector> e(n, Vector::Zero(d));
  Vector x = problem.meta().x0;
  std::vector<Vector> out{x};
  for (std::size_t t = 0; t < T; ++t) {
    Vector v_sum = Vector::Zero(d);
    for (std::size_t i = 0; i < n; ++i) {
      const Vector u = e[i] + problem.f_subgrad(i, x);
      const Vector v = top_k(u, k);
      e[i] = u - v;
      v_sum += v;
    }
    x -= gamma * (v_sum / static_cast<double>(n));
    out.push_back(x);
  }
  return out;
}

double toy_cgd_gap(double gamma) { return 1.0 + gamma / 2.0; }

double toy_ef21_gap(double gamma, std::size_t t) {
  return 1.0 + gamma / 2.0 + static_cast<double>(t) * gamma;
}

}  // namespace cefopt
