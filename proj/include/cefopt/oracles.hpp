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
#pragma once

#include "cefopt/linalg.hpp"
#include "cefopt/problems.hpp"

namespace cefopt {

struct StochasticConfig {
  /// Per-sample standard deviation of constraint evaluations.
  double sigma_fv = 0.0;
  /// Batch size for constraint evaluations.
  std::size_t N_fv = 1;
  /// Mini-batch size for finite-sum subgradients; 0 means the full local set.
  std::size_t subgrad_batch = 0;
  /// Radius of uniform-in-ball noise added to subgradients of analytic
  /// objectives before clipping. Ignored for finite-sum objectives.
  double subgrad_noise = 0.0;
  std::uint64_t seed = 0;

  double effective_sigma() const;
  void validate() const;
};

/// g_i(x) plus a random sign times sigma_fv / sqrt(N_fv).
double noisy_g_value(const ProblemInstance& problem, std::size_t i, const Vector& x,
                     const StochasticConfig& cfg, RandomStream& rng);

/// Stochastic subgradient of f_i (or g_i when `constraint` is set) radially
/// clipped to the instance bound M.
Vector stochastic_subgrad(const ProblemInstance& problem, std::size_t i, const Vector& x,
                          const StochasticConfig& cfg, RandomStream& rng,
                          bool constraint = false);

/// Smallest batch for which the averaged constraint noise stays below c with
/// the requested confidence over T rounds:
/// ceil((sqrt(2) + sqrt(2) sqrt(3 ln(T / beta)))^2 sigma^2 / (n c^2)).
std::size_t min_batch_size(double sigma_fv, std::size_t n, double c, double beta,
                           std::size_t T);

/// Projects v onto the ball of radius M around the origin.
Vector clip_radial(Vector v, double M);

}  // namespace cefopt
