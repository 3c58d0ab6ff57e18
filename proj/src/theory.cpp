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
#include "cefopt/theory.hpp"

#include "cefopt/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace cefopt {

std::size_t prog(const Vector& x) {
  for (Index j = x.size(); j > 0; --j)
    if (x[j - 1] != 0.0) return static_cast<std::size_t>(j);
  return 0;
}

double rate_slope(std::span<const double> T_values, std::span<const double> gaps) {
  if (T_values.size() != gaps.size()) throw std::invalid_argument("rate_slope: size mismatch");
  if (T_values.size() < 3) throw std::invalid_argument("rate_slope needs at least 3 points");
  const std::size_t m = T_values.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(T_values[k] > 0.0) || !(gaps[k] > 0.0))
      throw std::invalid_argument("rate_slope needs positive T and gap values");
    mx += std::log(T_values[k]);
    my += std::log(gaps[k]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = std::log(T_values[k]) - mx;
    sxy += dx * (std::log(gaps[k]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("rate_slope needs distinct T values");
  return sxy / sxx;
}

BoundReport bounds(double R, double M, double delta, double delta_s, std::size_t T) {
  if (!(R > 0.0 && M > 0.0 && T >= 1))
    throw std::invalid_argument("bounds needs R, M > 0 and T >= 1");
  if (!(delta > 0.0 && delta <= 1.0 && delta_s > 0.0 && delta_s <= 1.0))
    throw std::invalid_argument("bounds needs delta, delta_s in (0, 1]");
  BoundReport rep;
  rep.R = R;
  rep.M = M;
  rep.delta = delta;
  rep.delta_s = delta_s;
  rep.T = T;
  const double t = static_cast<double>(T);
  rep.upper_gap = 32.0 * M * R / std::sqrt(delta_s * delta * t);
  WorstCaseParams wc{T, delta, R, M};
  rep.C = wc.C();
  rep.mu = wc.mu();
  rep.lower_gap = rep.C * rep.C / (2.0 * rep.mu * t);
  rep.error_buffer_bound = 4.0 * (1.0 - delta) / (delta * delta) * M * M;
  return rep;
}

}  // namespace cefopt
