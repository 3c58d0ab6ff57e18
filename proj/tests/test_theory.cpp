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
#include "cefopt/theory.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cefopt;

TEST_CASE("prog") {
  CHECK(prog(Vector::Zero(4)) == 0);
  Vector a(3);
  a << 1, 0, 0;
  CHECK(prog(a) == 1);
  Vector b(5);
  b << 0, 3, 0, -2, 0;
  CHECK(prog(b) == 4);
}

TEST_CASE("rate slope on exact power laws") {
  const std::vector<double> Ts{1000, 4000, 16000, 64000};
  std::vector<double> half, one, flat;
  for (double T : Ts) {
    half.push_back(3.0 / std::sqrt(T));
    one.push_back(7.0 / T);
    flat.push_back(2.5);
  }
  CHECK(std::abs(rate_slope(Ts, half) + 0.5) <= 1e-9);
  CHECK(std::abs(rate_slope(Ts, one) + 1.0) <= 1e-9);
  CHECK(std::abs(rate_slope(Ts, flat)) <= 1e-12);
}

TEST_CASE("rate slope rejects degenerate input") {
  const std::vector<double> two{1, 2};
  CHECK_THROWS(rate_slope(two, two));
  const std::vector<double> Ts{1, 2, 3};
  const std::vector<double> bad{1, 0, 2};
  CHECK_THROWS(rate_slope(Ts, bad));
}

TEST_CASE("bound plug-ins") {
  CHECK(bounds(1, 1, 1, 1, 100).upper_gap == doctest::Approx(3.2).epsilon(1e-14));
  CHECK(bounds(1, 1, 1, 1, 100).error_buffer_bound == 0.0);
  CHECK(bounds(1, 2, 0.5, 1, 100).error_buffer_bound == doctest::Approx(4 * 0.5 / 0.25 * 4));

  // Independent evaluation of the worst-case constants at R = M = 1,
  // delta = 1/4, T = 16: C = M sqrt(T) / (1 + sqrt(delta T)) = 4/3,
  // mu = 2M / (R (1 + sqrt(delta T))) = 2/3, gap = C^2 / (2 mu T) = 1/12.
  const BoundReport r = bounds(1, 1, 0.25, 1, 16);
  CHECK(r.C == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(r.mu == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.lower_gap == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("theoretical step and threshold") {
  const StepThreshold a = theoretical_params(1, 1, 1, 1, 100);
  CHECK(a.gamma == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(a.c == doctest::Approx(3.2).epsilon(1e-15));
  const StepThreshold b = theoretical_params(1, 1, 1, 1, 400);
  CHECK(b.gamma == doctest::Approx(a.gamma / 2));
  CHECK(b.c == doctest::Approx(a.c / 2));
  const StepThreshold q = theoretical_params(1, 1, 0.25, 1, 100);
  CHECK(q.gamma == doctest::Approx(a.gamma / 2));
  CHECK(q.c == doctest::Approx(a.c * 2));

  const StepThreshold s = theoretical_params_stochastic(2, 3, 0.25, 0.05, 400);
  CHECK(s.gamma == doctest::Approx(2 * 0.5 / (3 * 20.0)));
  CHECK(s.c == doctest::Approx(128 * 6 * (1 + std::log(20.0)) / (0.5 * 20.0)));

  CHECK(projected_ef21_step(1.0, 1.0) == doctest::Approx(1.0 / (2 * std::sqrt(6.0))));
  CHECK(projected_ef21_step(0.1, 2.0) == doctest::Approx(0.1 / (4 * std::sqrt(6.0))));
}
