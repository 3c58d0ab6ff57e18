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

#include <cstddef>
#include <span>

namespace cefopt {

/// 1-based index of the last nonzero coordinate, 0 for the zero vector.
std::size_t prog(const Vector& x);

/// Least-squares slope of log(gap) against log(T). Needs at least three
/// points, all positive.
double rate_slope(std::span<const double> T_values, std::span<const double> gaps);

struct BoundReport {
  double R = 0.0;
  double M = 0.0;
  double delta = 0.0;
  double delta_s = 0.0;
  std::size_t T = 0;

  /// 32 M R / sqrt(delta_s delta T).
  double upper_gap = 0.0;
  /// C^2 / (2 mu T) for the worst-case instance with these constants.
  double lower_gap = 0.0;
  /// 4 (1 - delta) / delta^2 M^2.
  double error_buffer_bound = 0.0;
  double C = 0.0;
  double mu = 0.0;
};

BoundReport bounds(double R, double M, double delta, double delta_s, std::size_t T);

}  // namespace cefopt
