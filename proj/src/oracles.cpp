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
#include "cefopt/oracles.hpp"

#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cefopt {

double StochasticConfig::effective_sigma() const {
  return sigma_fv / std::sqrt(static_cast<double>(N_fv));
}

void StochasticConfig::validate() const {
  if (!(sigma_fv >= 0.0)) throw std::invalid_argument("sigma_fv must be >= 0");
  if (N_fv < 1) throw std::invalid_argument("N_fv must be >= 1");
  if (!(subgrad_noise >= 0.0)) throw std::invalid_argument("subgrad_noise must be >= 0");
}

double noisy_g_value(const ProblemInstance& problem, std::size_t i, const Vector& x,
                     const StochasticConfig& cfg, RandomStream& rng) {
  const double exact = problem.g_value(i, x);
  if (cfg.sigma_fv == 0.0) return exact;
  // Symmetric two-point noise: variance sigma^2 / N_fv, and z^2 N_fv / sigma^2
  // is identically 1, so the sub-Gaussian moment E exp(.) equals e.
  return exact + (rng.uniform() < 0.5 ? -1.0 : 1.0) * cfg.effective_sigma();
}

Vector clip_radial(Vector v, double M) {
  const double norm = v.norm();
  if (norm > M && norm > 0.0) v *= M / norm;
  return v;
}

Vector stochastic_subgrad(const ProblemInstance& problem, std::size_t i, const Vector& x,
                          const StochasticConfig& cfg, RandomStream& rng, bool constraint) {
  const WorkerFunctions* fn = constraint ? problem.constraint() : &problem.objective();
  if (fn == nullptr) return Vector::Zero(problem.dim());
  const double M = problem.meta().M;
  Vector out;
  const std::size_t m = fn->local_terms(i);
  if (m > 0) {
    if (cfg.subgrad_batch == 0 || cfg.subgrad_batch >= m) {
      out = fn->subgradient(i, x);
    } else {
      // Uniform batch without replacement via partial Fisher-Yates.
      std::vector<std::size_t> idx(m);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t j = 0; j < cfg.subgrad_batch; ++j)
        std::swap(idx[j], idx[j + rng.index_below(m - j)]);
      idx.resize(cfg.subgrad_batch);
      out = fn->batch_subgradient(i, x, idx);
    }
  } else {
    out = fn->subgradient(i, x);
    if (cfg.subgrad_noise > 0.0) {
      Vector dir = rng.normal_vector(x.size());
      const double radius =
          cfg.subgrad_noise * std::pow(rng.uniform(), 1.0 / static_cast<double>(x.size()));
      const double norm = dir.norm();
      if (norm > 0.0) out += radius / norm * dir;
    }
  }
  out = clip_radial(std::move(out), M);
  assert(out.norm() <= M * (1.0 + 1e-12) + 1e-12);
  return out;
}

std::size_t min_batch_size(double sigma_fv, std::size_t n, double c, double beta,
                           std::size_t T) {
  if (!(c > 0.0)) throw std::invalid_argument("min_batch_size needs c > 0");
  if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("min_batch_size needs beta in (0, 1/2)");
  if (n < 1 || T < 1) throw std::invalid_argument("min_batch_size needs n, T >= 1");
  if (sigma_fv == 0.0) return 1;
  const double b = std::sqrt(3.0 * std::log(static_cast<double>(T) / beta));
  const double lead = std::sqrt(2.0) + std::sqrt(2.0) * b;
  const double value = lead * lead * sigma_fv * sigma_fv / (static_cast<double>(n) * c * c);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(value)));
}

}  // namespace cefopt
