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

#include "cefopt/problems.hpp"

#include <vector>

namespace cefopt {

// Independent reference implementations used as test oracles. They share no
// code with the protocol engine beyond the problem oracles.

/// Plain EF14 with Top-K uplink (largest magnitude first, lower index on
/// ties) and an uncompressed downlink. Returns x^0..x^T.
std::vector<Vector> ef14_reference(const ProblemInstance& problem, double gamma,
                                   std::size_t T, std::size_t k);

/// Closed-form gaps on the two-dimensional l1 toy started at (gamma/2, -1)
/// with Top-1: CGD stays at 1 + gamma/2, EF21 with v0 = (1, 1) grows by
/// gamma per round.
double toy_cgd_gap(double gamma);
double toy_ef21_gap(double gamma, std::size_t t);

}  // namespace cefopt
