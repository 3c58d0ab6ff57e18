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
#include "cefopt/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace cefopt {

double RunDiagnostics::max_virtual_residual() const {
  double best = 0.0;
  for (double r : virtual_residual) best = std::max(best, r);
  return best;
}

double RunDiagnostics::max_error_norm_sq() const {
  double best = 0.0;
  for (double r : error_norm_sq) best = std::max(best, r);
  return best;
}

double RunRecord::total_bytes_per_worker() const {
  double total = 0.0;
  for (const RoundCharge& c : charges) total += c.bytes_per_worker(n);
  return total;
}

double RunRecord::min_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (double g : f_gap) best = std::min(best, g);
  return best;
}

bool execute_round(RoundProtocol& protocol, RoundContext& ctx) {
  protocol.scalar_phase(ctx);
  protocol.uplink_phase(ctx);
  protocol.server_phase(ctx);
  protocol.downlink_phase(ctx);
  return protocol.state_finite();
}

RunRecord run_protocol(const ProblemInstance& problem, RoundProtocol& protocol,
                       const RunHeader& header, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = problem.workers();
  const std::size_t stride = std::max<std::size_t>(options.stride, 1);

  RunRecord rec;
  rec.algorithm = header.algorithm;
  rec.problem = problem.meta().name;
  rec.seed = header.seed;
  rec.n = n;
  rec.d = static_cast<std::size_t>(problem.dim());
  rec.T = header.T;
  rec.stride = stride;
  rec.gamma = header.gamma;
  rec.c = header.c;
  rec.f_star = problem.meta().f_star;
  rec.charges.reserve(header.T);

  const double f_star = rec.f_star.value_or(0.0);
  Vector x_sum = Vector::Zero(problem.dim());
  std::size_t up = 0;
  std::size_t down = 0;
  std::size_t scalars = 0;
  double bytes = 0.0;
  if (options.keep_iterates) rec.diag.iterates.push_back(protocol.model());

  for (std::size_t t = 0; t < header.T; ++t) {
    const Vector x = protocol.model();
    RoundContext ctx(t, problem);
    ctx.f_values.resize(n);
    const bool exact = protocol.needs_exact_subgradients();
    if (exact) ctx.f_subgrads.resize(n);
    double f_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ctx.f_values[i] =
          exact ? problem.f_evaluate(i, x, ctx.f_subgrads[i]) : problem.f_value(i, x);
      f_sum += ctx.f_values[i];
    }
    const double f_t = f_sum / static_cast<double>(n);

    const bool finite = execute_round(protocol, ctx);

    const double g_t = ctx.reported_g ? *ctx.reported_g : problem.g(x);
    const bool member = g_t <= header.c;
    if (member) {
      x_sum += x;
      ++rec.B_size;
    }
    rec.charges.push_back(ctx.charge);
    up += ctx.charge.uplink();
    down += ctx.charge.downlink_payload;
    scalars += ctx.charge.scalars();
    bytes += ctx.charge.bytes_per_worker(n);

    if (t % stride == 0 || t + 1 == header.T || !finite) {
      rec.iter.push_back(t);
      rec.f_gap.push_back(f_t - f_star);
      rec.g_val.push_back(g_t);
      rec.in_B.push_back(member ? 1 : 0);
      rec.uplink_floats_cum.push_back(up);
      rec.downlink_floats_cum.push_back(down);
      rec.scalar_floats_cum.push_back(scalars);
      rec.bytes_per_worker_cum.push_back(bytes);
    }

    if (options.observer) {
      RoundObservation obs;
      obs.t = t;
      obs.x_before = &x;
      obs.x_after = &protocol.model();
      obs.uplink_supports = &ctx.uplink_supports;
      obs.downlink_support = &ctx.downlink_support;
      options.observer(obs);
    }

    if (!finite) {
      rec.flags.diverged = true;
      rec.flags.diverged_at = t;
      break;
    }
    protocol.after_round(ctx, rec.diag);
    if (options.keep_iterates) rec.diag.iterates.push_back(protocol.model());
  }

  rec.x_last = protocol.model();
  if (rec.B_size > 0) {
    rec.x_bar = x_sum / static_cast<double>(rec.B_size);
  } else {
    rec.flags.no_feasible_iterate = true;
    rec.x_bar = rec.x_last;
  }
  if (!rec.flags.diverged) {
    rec.final_gap = problem.f(rec.x_bar) - f_star;
    rec.final_g = problem.g(rec.x_bar);
    rec.last_gap = problem.f(rec.x_last) - f_star;
    rec.last_g = problem.g(rec.x_last);
  } else {
    rec.final_gap = rec.final_g = rec.last_gap = rec.last_g =
        std::numeric_limits<double>::quiet_NaN();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::optional<double> gigabytes_to_target(const RunRecord& record, double target_gap) {
  // Row t reports x^t, which has cost the charges of rounds 0..t-1.
  double spent = 0.0;
  std::size_t charged = 0;
  for (std::size_t r = 0; r < record.iter.size(); ++r) {
    while (charged < record.iter[r] && charged < record.charges.size())
      spent += record.charges[charged++].bytes_per_worker(record.n);
    if (record.f_gap[r] <= target_gap) return spent / 1e9;
  }
  return std::nullopt;
}

}  // namespace cefopt
