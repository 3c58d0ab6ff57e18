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
#include "cefopt/algorithms.hpp"
#include "cefopt/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cefopt;

namespace {

ProblemInstance constrained_synthetic(std::size_t n, Index d, std::uint64_t seed) {
  SyntheticGenParams p;
  p.n = n;
  p.d = d;
  p.seed = seed;
  const SyntheticL1Data data = generate_l1_data(p);
  const HalfspaceConstraint hs = planted_halfspace(data.x_planted, n, 0.5, 0.5, seed);
  return gen_synthetic_l1(p).with_constraint(hs.functions, hs.M);
}

}  // namespace

TEST_CASE("zero noise returns the exact constraint value") {
  const ProblemInstance p = constrained_synthetic(3, 6, 1);
  RandomStream rng(0);
  StochasticConfig cfg;
  const Vector x = rng.normal_vector(6);
  for (std::size_t i = 0; i < 3; ++i) CHECK(noisy_g_value(p, i, x, cfg, rng) == p.g_value(i, x));
}

TEST_CASE("constraint noise: mean, variance, and exponential moment") {
  const ProblemInstance p = constrained_synthetic(2, 4, 2);
  const Vector x = Vector::Constant(4, 0.3);
  StochasticConfig cfg;
  cfg.sigma_fv = 0.7;
  cfg.N_fv = 5;
  RandomStream rng(123);
  const double exact = p.g_value(1, x);
  const std::size_t draws = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  double moment = 0.0;
  for (std::size_t s = 0; s < draws; ++s) {
    const double z = noisy_g_value(p, 1, x, cfg, rng) - exact;
    sum += z;
    sum_sq += z * z;
    moment += std::exp(z * z * 5.0 / (0.7 * 0.7));
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  CHECK(std::abs(mean) <= 4.0 * 0.7 / std::sqrt(5.0 * draws));
  CHECK(std::abs(var / (0.49 / 5.0) - 1.0) <= 0.05);
  CHECK(moment / draws <= std::exp(1.0) * 1.1);
}

TEST_CASE("full-batch subgradient is exact") {
  const ProblemInstance p = constrained_synthetic(3, 8, 3);
  RandomStream rng(4);
  const Vector x = rng.normal_vector(8);
  StochasticConfig cfg;
  for (std::size_t i = 0; i < 3; ++i) {
    const Vector exact = p.f_subgrad(i, x);
    CHECK(stochastic_subgrad(p, i, x, cfg, rng) == clip_radial(exact, p.meta().M));
  }
}

TEST_CASE("mini-batch subgradients are unbiased") {
  SyntheticGenParams gp;
  gp.n = 1;
  gp.d = 5;
  gp.seed = 9;
  const ProblemInstance p = gen_synthetic_l1(gp);
  RandomStream rng(10);
  const Vector x = rng.normal_vector(5);
  const auto& f = p.objective();
  const Vector exact = f.subgradient(0, x);

  // Exact average over all C(5, 2) batches.
  Vector total = Vector::Zero(5);
  int count = 0;
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = a + 1; b < 5; ++b) {
      const std::vector<std::size_t> terms{a, b};
      total += f.batch_subgradient(0, x, terms);
      ++count;
    }
  CHECK((total / count - exact).norm() <= 1e-12);

  // Monte Carlo through the oracle with clipping disabled by a large M.
  const ProblemInstance loose(p.objective_ptr(), nullptr, [&] {
    ProblemMetadata m = p.meta();
    m.M = 1e9;
    return m;
  }());
  StochasticConfig cfg;
  cfg.subgrad_batch = 2;
  Vector mc = Vector::Zero(5);
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) mc += stochastic_subgrad(loose, 0, x, cfg, rng);
  CHECK((mc / draws - exact).norm() <= 0.05 * std::max(1.0, exact.norm()));
}

TEST_CASE("stochastic subgradients never exceed M") {
  const ProblemInstance p = constrained_synthetic(4, 10, 5);
  RandomStream rng(6);
  StochasticConfig cfg;
  cfg.subgrad_batch = 1;
  for (int s = 0; s < 2000; ++s) {
    const Vector x = 10.0 * rng.normal_vector(10);
    const std::size_t i = static_cast<std::size_t>(s % 4);
    CHECK(stochastic_subgrad(p, i, x, cfg, rng).norm() <= p.meta().M * (1 + 1e-12));
    CHECK(stochastic_subgrad(p, i, x, cfg, rng, true).norm() <= p.meta().M * (1 + 1e-12));
  }
  // Analytic objective with additive noise: the clip is what keeps the bound.
  const ProblemInstance toy = make_l1_toy(0.1);
  StochasticConfig noisy;
  noisy.subgrad_noise = 5.0;
  for (int s = 0; s < 500; ++s)
    CHECK(stochastic_subgrad(toy, 0, rng.normal_vector(2), noisy, rng).norm() <=
          toy.meta().M * (1 + 1e-12));
}

TEST_CASE("clip_radial") {
  Vector v(2);
  v << 3, 4;
  CHECK(clip_radial(v, 10) == v);
  CHECK((clip_radial(v, 1) - Vector(Eigen::Vector2d(0.6, 0.8))).norm() <= 1e-15);
  CHECK(clip_radial(Vector::Zero(3), 0.0) == Vector::Zero(3));
}

TEST_CASE("min batch size") {
  CHECK(min_batch_size(0.0, 10, 0.1, 0.01, 1000) == 1);
  // Plug-in value computed separately: 945.854... rounds up to 946.
  CHECK(min_batch_size(1.0, 10, 0.1, 0.01, 1000) == 946);
  const std::size_t a = min_batch_size(3.0, 4, 0.05, 0.05, 2000);
  const std::size_t b = min_batch_size(3.0, 4, 0.10, 0.05, 2000);
  CHECK(std::abs(static_cast<double>(a) / 4.0 - static_cast<double>(b)) <= 1.0);
  CHECK_THROWS(min_batch_size(1.0, 10, 0.0, 0.01, 1000));
  CHECK_THROWS(min_batch_size(1.0, 10, 0.1, 0.7, 1000));
}

TEST_CASE("function-value noise ignores how subgradients are sampled") {
  const ProblemInstance p = constrained_synthetic(4, 10, 7);
  auto noise = [&](std::size_t batch) {
    AlgorithmConfig cfg;
    cfg.T = 5;
    cfg.gamma = 0.01;
    cfg.c = 0.0;
    cfg.seed = 3;
    StochasticConfig sc;
    sc.sigma_fv = 0.5;
    sc.subgrad_batch = batch;
    cfg.stochastic = sc;
    RunOptions opts;
    opts.keep_iterates = true;
    const RunRecord r = run_safe_ef(p, cfg, opts);
    std::vector<double> z;
    for (std::size_t t = 0; t < r.g_val.size(); ++t)
      z.push_back(r.g_val[t] - p.g(r.diag.iterates[t]));
    return z;
  };
  const std::vector<double> full = noise(0);
  const std::vector<double> batched = noise(2);
  REQUIRE(full.size() == batched.size());
  for (std::size_t t = 0; t < full.size(); ++t) CHECK(std::abs(full[t] - batched[t]) <= 1e-12);
  CHECK(derive_seed(3, stream_tag::kFunctionNoise) != derive_seed(3, stream_tag::kSubgradNoise));
}
