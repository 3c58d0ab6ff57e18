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

#include "cefopt/compressors.hpp"
#include "cefopt/oracles.hpp"
#include "cefopt/problems.hpp"
#include "cefopt/simulator.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace cefopt {

class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class AlgorithmKind { SafeEF, CGD, EF21, ProjectedEF21, PrimalDualEF };

std::string to_string(AlgorithmKind kind);
/// Accepts safe_ef, cgd, ef21, projected_ef21, primal_dual_ef.
AlgorithmKind parse_algorithm_kind(const std::string& text);

using Projection = std::function<Vector(const Vector&)>;

/// Euclidean projection onto {||x - center|| <= radius}; identity for an
/// infinite radius.
Projection ball_projection(Vector center, double radius);
Projection ball_projection(double radius);
/// Coordinate-wise clamp to [lower, upper].
Projection box_projection(double lower, double upper);

struct ProjectionSpec {
  enum class Kind { None, Ball, Box } kind = Kind::None;
  double radius = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  Projection make() const;
};

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::SafeEF;
  double gamma = 0.0;
  /// Switching threshold; +inf disables switching.
  double c = std::numeric_limits<double>::infinity();
  std::size_t T = 1;
  CompressorSpec uplink;
  CompressorSpec downlink;
  /// Primal-dual dual step and initial multiplier.
  double eta = 0.0;
  double lambda0 = 0.0;
  std::optional<StochasticConfig> stochastic;
  /// Initial EF21 estimators for every worker; f_i'(x0) when unset.
  std::optional<Vector> ef21_v0;
  ProjectionSpec projection;
  std::uint64_t seed = 0;

  void validate() const;
};

RunRecord run_safe_ef(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                      const RunOptions& options = {});
RunRecord run_cgd(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                  const RunOptions& options = {});
RunRecord run_ef21(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                   const RunOptions& options = {});
RunRecord run_projected_ef21(const ProblemInstance& problem, const Projection& projection,
                             const AlgorithmConfig& cfg, const RunOptions& options = {});
RunRecord run_primal_dual_ef(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                             const RunOptions& options = {});

/// Dispatches on cfg.kind; ProjectedEF21 uses cfg.projection.
RunRecord run_algorithm(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                        const RunOptions& options = {});

struct StepThreshold {
  double gamma = 0.0;
  double c = 0.0;
};

/// gamma = R sqrt(delta_s delta) / (M sqrt(T)), c = 32 R M / sqrt(delta_s delta T).
StepThreshold theoretical_params(double R, double M, double delta, double delta_s,
                                 std::size_t T);

/// High-probability variant for stochastic oracles: gamma as above with
/// delta_s = 1, c = 128 R M (1 + ln(1/beta)) / sqrt(delta T).
StepThreshold theoretical_params_stochastic(double R, double M, double delta, double beta,
                                            std::size_t T);

/// Largest admissible Projected-EF21 step delta / (2 sqrt(6) L).
double projected_ef21_step(double delta, double L);

}  // namespace cefopt
