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

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cefopt {

inline constexpr double kBytesPerFloat = 8.0;

/// Floats moved in one round. Uplink counts are summed over workers; downlink
/// counts are for one broadcast, which every worker receives.
struct RoundCharge {
  std::size_t uplink_payload = 0;
  std::size_t uplink_scalars = 0;
  std::size_t downlink_payload = 0;
  std::size_t downlink_scalars = 0;

  std::size_t uplink() const { return uplink_payload + uplink_scalars; }
  std::size_t scalars() const { return uplink_scalars + downlink_scalars; }
  /// Bytes sent plus received by one worker.
  double bytes_per_worker(std::size_t n) const {
    return kBytesPerFloat * (static_cast<double>(uplink()) / static_cast<double>(n) +
                             static_cast<double>(downlink_payload + downlink_scalars));
  }
};

struct RunFlags {
  bool no_feasible_iterate = false;
  bool diverged = false;
  std::optional<std::size_t> diverged_at;

  bool any() const { return no_feasible_iterate || diverged; }
};

/// Per-round quantities that the tests and verify suite inspect.
struct RunDiagnostics {
  /// ||x_hat^{t+1} - (x_hat^t - gamma h^t)|| per round (error-feedback methods).
  std::vector<double> virtual_residual;
  /// ||mean_i e_i^{t+1}||^2 per round (error-feedback methods).
  std::vector<double> error_norm_sq;
  /// lambda^t per round (primal-dual only).
  std::vector<double> lambda;
  /// x^0..x^T when RunOptions::keep_iterates is set.
  std::vector<Vector> iterates;

  double max_virtual_residual() const;
  double max_error_norm_sq() const;
};

/// Trajectory of one run. Rows hold t = 0..T-1 (thinned by `stride`, the
/// last round always kept); the final iterate x^T is stored separately.
struct RunRecord {
  std::string algorithm;
  std::string problem;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t T = 0;
  std::size_t stride = 1;
  double gamma = 0.0;
  double c = 0.0;
  std::optional<double> f_star;

  std::vector<std::size_t> iter;
  std::vector<double> f_gap;
  std::vector<double> g_val;
  std::vector<char> in_B;
  std::vector<std::size_t> uplink_floats_cum;
  std::vector<std::size_t> downlink_floats_cum;
  std::vector<std::size_t> scalar_floats_cum;
  std::vector<double> bytes_per_worker_cum;

  /// Dense, one entry per executed round.
  std::vector<RoundCharge> charges;

  Vector x_bar;
  Vector x_last;
  std::size_t B_size = 0;
  /// f(x_bar) - f_star (or f(x_bar)) and g(x_bar), exact oracles.
  double final_gap = 0.0;
  double final_g = 0.0;
  /// Same at the last iterate x^T.
  double last_gap = 0.0;
  double last_g = 0.0;

  RunFlags flags;
  RunDiagnostics diag;
  double wall_seconds = 0.0;

  std::size_t rounds_executed() const { return charges.size(); }
  double total_bytes_per_worker() const;
  double min_gap() const;
};

/// What a round exposes to an observer. Supports are ascending coordinate
/// lists (empty when the phase did not compress).
struct RoundObservation {
  std::size_t t = 0;
  const Vector* x_before = nullptr;
  const Vector* x_after = nullptr;
  const std::vector<std::vector<Index>>* uplink_supports = nullptr;
  const std::vector<Index>* downlink_support = nullptr;
};

using RoundObserver = std::function<void(const RoundObservation&)>;

struct RunOptions {
  std::size_t stride = 1;
  bool keep_iterates = false;
  RoundObserver observer;
};

/// Scratch shared by the phases of one round.
struct RoundContext {
  RoundContext(std::size_t t_, const ProblemInstance& p) : t(t_), problem(p) {}

  std::size_t t;
  const ProblemInstance& problem;
  /// Exact f_i(x^t); f_i'(x^t) too when the protocol asked for it.
  std::vector<double> f_values;
  std::vector<Vector> f_subgrads;
  /// Aggregate constraint value as exchanged in this round, if any.
  std::optional<double> reported_g;
  RoundCharge charge;
  std::vector<std::vector<Index>> uplink_supports;
  std::vector<Index> downlink_support;
};

/// One algorithm expressed as the four phases of a parameter-server round.
class RoundProtocol {
 public:
  virtual ~RoundProtocol() = default;

  virtual const Vector& model() const = 0;
  /// Exact objective subgradients at x^t are precomputed by the engine when
  /// true, since metric evaluation already pays for most of that work.
  virtual bool needs_exact_subgradients() const { return true; }

  virtual void scalar_phase(RoundContext&) {}
  virtual void uplink_phase(RoundContext& ctx) = 0;
  virtual void server_phase(RoundContext& ctx) = 0;
  virtual void downlink_phase(RoundContext& ctx) = 0;

  virtual bool state_finite() const = 0;
  /// Invariant checks and diagnostics after a finite round.
  virtual void after_round(RoundContext&, RunDiagnostics&) {}
};

/// Runs the phases in order and reports whether the state stayed finite.
bool execute_round(RoundProtocol& protocol, RoundContext& ctx);

struct RunHeader {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t T = 0;
  double gamma = 0.0;
  /// Threshold defining B; +inf when every round counts.
  double c = 0.0;
};

/// The synchronous round loop: metrics at x^t, one round, ledger update,
/// divergence check, then B-averaging and final metrics.
RunRecord run_protocol(const ProblemInstance& problem, RoundProtocol& protocol,
                       const RunHeader& header, const RunOptions& options = {});

/// Per-worker gigabytes spent when f_gap first drops to `target_gap`.
std::optional<double> gigabytes_to_target(const RunRecord& record, double target_gap);

}  // namespace cefopt
