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

#include <doctest.h>

#include <cmath>

using namespace cefopt;

namespace {

constexpr double kGamma = 0.03162277660168379;  // 1/sqrt(1000)

RunRecord run_kept(const ProblemInstance& p, const AlgorithmConfig& cfg) {
  RunOptions opts;
  opts.keep_iterates = true;
  return run_algorithm(p, cfg, opts);
}

AlgorithmConfig toy_config(AlgorithmKind kind, std::size_t T, double gamma = kGamma) {
  AlgorithmConfig cfg;
  cfg.kind = kind;
  cfg.T = T;
  cfg.gamma = gamma;
  cfg.uplink = CompressorSpec::top_k(1);
  return cfg;
}

ProblemInstance small_synthetic(std::uint64_t seed = 0) {
  SyntheticGenParams gp;
  gp.n = 5;
  gp.d = 20;
  gp.seed = seed;
  return gen_synthetic_l1(gp);
}

// Plain parallel subgradient descent, the common limit of every method with
// identity compression.
std::vector<Vector> subgradient_descent(const ProblemInstance& p, double gamma, std::size_t T) {
  Vector x = p.meta().x0;
  std::vector<Vector> out{x};
  for (std::size_t t = 0; t < T; ++t) {
    Vector g = Vector::Zero(x.size());
    for (std::size_t i = 0; i < p.workers(); ++i) g += p.f_subgrad(i, x);
    x -= gamma * (g / static_cast<double>(p.workers()));
    out.push_back(x);
  }
  return out;
}

double max_diff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    worst = std::max(worst, (a[t] - b[t]).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TEST_CASE("Safe-EF hand trace on the l1 toy") {
  const ProblemInstance p = make_l1_toy(kGamma);
  const RunRecord r = run_kept(p, toy_config(AlgorithmKind::SafeEF, 2));
  REQUIRE(r.diag.iterates.size() == 3);
  CHECK(r.diag.iterates[1] == Vector(Eigen::Vector2d(-kGamma / 2, -1)));
  CHECK((r.diag.iterates[2] - Vector(Eigen::Vector2d(-kGamma / 2, -1 + 2 * kGamma))).norm() <=
        1e-15);
}

TEST_CASE("CGD and EF21 reproduce the toy closed forms") {
  const ProblemInstance p = make_l1_toy(kGamma);
  const RunRecord cgd = run_algorithm(p, toy_config(AlgorithmKind::CGD, 1000));
  for (double gap : cgd.f_gap) CHECK(std::abs(gap - (1 + kGamma / 2)) <= 1e-12);
  AlgorithmConfig cfg = toy_config(AlgorithmKind::EF21, 1000);
  cfg.ef21_v0 = Vector::Ones(2);
  const RunRecord ef21 = run_algorithm(p, cfg);
  for (std::size_t r = 0; r < ef21.iter.size(); ++r)
    CHECK(std::abs(ef21.f_gap[r] - (1 + kGamma / 2 + ef21.iter[r] * kGamma)) <= 1e-9);
  CHECK(!ef21.flags.diverged);
  CHECK(ef21.last_gap == doctest::Approx(1 + kGamma / 2 + 1000 * kGamma));
}

TEST_CASE("zero step freezes every method") {
  const ProblemInstance p = make_l1_toy(0.1);
  for (AlgorithmKind kind : {AlgorithmKind::SafeEF, AlgorithmKind::CGD, AlgorithmKind::EF21,
                             AlgorithmKind::ProjectedEF21, AlgorithmKind::PrimalDualEF}) {
    AlgorithmConfig cfg = toy_config(kind, 20, 0.0);
    if (kind == AlgorithmKind::PrimalDualEF) cfg.eta = 1.0;
    const RunRecord r = run_kept(p, cfg);
    for (const Vector& x : r.diag.iterates) CHECK(x == p.meta().x0);
  }
}

TEST_CASE("identity compression reduces to parallel subgradient descent") {
  const ProblemInstance p = small_synthetic(3);
  const std::vector<Vector> ref = subgradient_descent(p, 0.01, 50);
  for (AlgorithmKind kind : {AlgorithmKind::SafeEF, AlgorithmKind::CGD, AlgorithmKind::EF21,
                             AlgorithmKind::ProjectedEF21}) {
    CAPTURE(to_string(kind));
    AlgorithmConfig cfg;
    cfg.kind = kind;
    cfg.T = 50;
    cfg.gamma = 0.01;
    CHECK(max_diff(run_kept(p, cfg).diag.iterates, ref) <= 1e-12);
  }
}

TEST_CASE("Safe-EF error buffers stay empty under identity compression") {
  const ProblemInstance p = small_synthetic(4);
  AlgorithmConfig cfg;
  cfg.T = 30;
  cfg.gamma = 0.02;
  const RunRecord r = run_algorithm(p, cfg);
  CHECK(r.diag.max_error_norm_sq() == 0.0);
  CHECK(r.diag.max_virtual_residual() <= 1e-12);
}

TEST_CASE("projection helpers") {
  const Projection unit = ball_projection(1.0);
  CHECK((unit(Eigen::Vector2d(3, 4)) - Vector(Eigen::Vector2d(0.6, 0.8))).norm() <= 1e-15);
  CHECK(unit(Eigen::Vector2d(0.3, 0.4)) == Vector(Eigen::Vector2d(0.3, 0.4)));
  const Projection shifted = ball_projection(Eigen::Vector2d(1, 1), 1.0);
  CHECK((shifted(Eigen::Vector2d(1, 3)) - Vector(Eigen::Vector2d(1, 2))).norm() <= 1e-15);
  CHECK(box_projection(-1, 1)(Eigen::Vector3d(-2, 0.5, 7)) == Vector(Eigen::Vector3d(-1, 0.5, 1)));
  CHECK(ball_projection(std::numeric_limits<double>::infinity())(Eigen::Vector2d(1e9, 1)) ==
        Vector(Eigen::Vector2d(1e9, 1)));
}

TEST_CASE("Projected-EF21 with an infinite ball is EF21") {
  const ProblemInstance p = small_synthetic(5);
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::EF21;
  cfg.T = 100;
  cfg.gamma = 0.01;
  cfg.uplink = CompressorSpec::top_k(4);
  const RunRecord plain = run_kept(p, cfg);
  RunOptions opts;
  opts.keep_iterates = true;
  const RunRecord proj =
      run_projected_ef21(p, ball_projection(std::numeric_limits<double>::infinity()), cfg, opts);
  CHECK(max_diff(plain.diag.iterates, proj.diag.iterates) == 0.0);
}

TEST_CASE("Projected-EF21 decreases a smooth quadratic monotonically") {
  SmoothQuadraticParams sq;
  sq.d = 20;
  const ProblemInstance p = make_smooth_quadratic(sq);
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::ProjectedEF21;
  cfg.T = 300;
  cfg.gamma = projected_ef21_step(1.0, *p.meta().smoothness);
  cfg.projection.kind = ProjectionSpec::Kind::Ball;
  cfg.projection.radius = 2.0;
  const RunRecord r = run_algorithm(p, cfg);
  for (std::size_t t = 1; t < r.f_gap.size(); ++t) CHECK(r.f_gap[t] <= r.f_gap[t - 1]);
  CHECK(r.last_gap < r.f_gap.front());
  for (const auto& x : {r.x_last, r.x_bar}) CHECK(x.norm() <= 2.0 + 1e-12);
}

TEST_CASE("EF21 variants reject constrained problems") {
  const ProblemInstance p = small_synthetic(6).with_constraint(
      std::make_shared<BallConstraint>(5, Vector::Zero(20), 1.0), 1.0);
  for (AlgorithmKind kind : {AlgorithmKind::EF21, AlgorithmKind::ProjectedEF21}) {
    AlgorithmConfig cfg;
    cfg.kind = kind;
    cfg.T = 3;
    cfg.gamma = 0.1;
    CHECK_THROWS_AS(run_algorithm(p, cfg), UnsupportedConfiguration);
  }
}

TEST_CASE("primal-dual with lambda0 = 0 and no constraint is Safe-EF") {
  const ProblemInstance p = small_synthetic(7);
  AlgorithmConfig cfg;
  cfg.T = 200;
  cfg.gamma = 0.01;
  cfg.uplink = CompressorSpec::top_k(3);
  cfg.downlink = CompressorSpec::top_k(10);
  const RunRecord safe = run_kept(p, cfg);
  cfg.kind = AlgorithmKind::PrimalDualEF;
  cfg.eta = 0.5;
  const RunRecord pd = run_kept(p, cfg);
  CHECK(max_diff(safe.diag.iterates, pd.diag.iterates) == 0.0);
}

TEST_CASE("dual variable clamps at zero") {
  const ProblemInstance p = small_synthetic(8).with_constraint(
      std::make_shared<BallConstraint>(5, Vector::Zero(20), 100.0), 1.0);
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::PrimalDualEF;
  cfg.T = 20;
  cfg.gamma = 0.01;
  cfg.eta = 1.0;
  cfg.lambda0 = 0.01;
  const RunRecord r = run_algorithm(p, cfg);
  REQUIRE(!r.diag.lambda.empty());
  for (std::size_t t = 1; t < r.diag.lambda.size(); ++t) CHECK(r.diag.lambda[t] == 0.0);
}

TEST_CASE("primal-dual trajectories depend on lambda0") {
  const LabeledData blobs = gen_two_class_blobs(200, 4, 2.0, 1);
  const ProblemInstance p = make_neyman_pearson(blobs.features, blobs.labels, 0.3, 4);
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::PrimalDualEF;
  cfg.T = 50;
  cfg.gamma = 0.1;
  cfg.eta = 1.0;
  cfg.uplink = CompressorSpec::top_k(2);
  const RunRecord a = run_kept(p, cfg);
  cfg.lambda0 = 2.0;
  const RunRecord b = run_kept(p, cfg);
  CHECK(a.diag.iterates[1] != b.diag.iterates[1]);
  CHECK(a.diag.lambda.front() == 0.0);
  CHECK(b.diag.lambda.front() == 2.0);
}

TEST_CASE("Safe-EF output averages only rounds with a small constraint value") {
  SyntheticGenParams gp;
  gp.n = 4;
  gp.d = 15;
  gp.seed = 2;
  const SyntheticL1Data data = generate_l1_data(gp);
  const HalfspaceConstraint hs = planted_halfspace(data.x_planted, 4, 0.5, 0.5, 2);
  const ProblemInstance p = gen_synthetic_l1(gp).with_constraint(hs.functions, hs.M);
  AlgorithmConfig cfg;
  cfg.T = 400;
  cfg.gamma = 0.01;
  cfg.c = 0.05;
  cfg.uplink = CompressorSpec::top_k(3);
  RunOptions opts;
  opts.keep_iterates = true;
  const RunRecord r = run_algorithm(p, cfg, opts);
  Vector sum = Vector::Zero(15);
  std::size_t count = 0;
  for (std::size_t t = 0; t < r.iter.size(); ++t) {
    if (r.in_B[t]) {
      CHECK(r.g_val[t] <= cfg.c);
      sum += r.diag.iterates[t];
      ++count;
    } else {
      CHECK(r.g_val[t] > cfg.c);
    }
  }
  REQUIRE(count == r.B_size);
  REQUIRE(count > 0);
  CHECK((sum / static_cast<double>(count) - r.x_bar).norm() <= 1e-12);
}

TEST_CASE("identical config and seed give identical records") {
  SyntheticGenParams gp;
  gp.n = 4;
  gp.d = 15;
  const SyntheticL1Data data = generate_l1_data(gp);
  const HalfspaceConstraint hs = planted_halfspace(data.x_planted, 4, 0.5, 0.5, 0);
  const ProblemInstance p = gen_synthetic_l1(gp).with_constraint(hs.functions, hs.M);
  AlgorithmConfig cfg;
  cfg.T = 100;
  cfg.gamma = 0.01;
  cfg.c = 0.1;
  cfg.seed = 9;
  cfg.uplink = CompressorSpec::rand_k(4);
  cfg.downlink = CompressorSpec::rand_k(10);
  StochasticConfig sc;
  sc.sigma_fv = 0.2;
  sc.subgrad_batch = 3;
  cfg.stochastic = sc;
  const RunRecord a = run_algorithm(p, cfg);
  const RunRecord b = run_algorithm(p, cfg);
  CHECK(a.f_gap == b.f_gap);
  CHECK(a.g_val == b.g_val);
  CHECK(a.x_bar == b.x_bar);
  cfg.seed = 10;
  CHECK(run_algorithm(p, cfg).f_gap != a.f_gap);
}

TEST_CASE("config validation") {
  AlgorithmConfig cfg;
  cfg.T = 0;
  CHECK_THROWS(cfg.validate());
  cfg.T = 5;
  cfg.gamma = -1;
  CHECK_THROWS(cfg.validate());
  cfg.gamma = 0.1;
  CHECK_NOTHROW(cfg.validate());
  CHECK(parse_algorithm_kind("projected_ef21") == AlgorithmKind::ProjectedEF21);
  CHECK_THROWS_AS(parse_algorithm_kind("sgd"), std::invalid_argument);
  for (AlgorithmKind k : {AlgorithmKind::SafeEF, AlgorithmKind::CGD, AlgorithmKind::EF21,
                          AlgorithmKind::ProjectedEF21, AlgorithmKind::PrimalDualEF})
    CHECK(parse_algorithm_kind(to_string(k)) == k);
}
