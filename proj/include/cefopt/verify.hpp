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

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace cefopt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct VerifyOptions {
  /// Criteria to run; empty runs all thirteen.
  std::set<int> only;
  /// Tie order handed to every Top-K used by the suite. Highest-index ties
  /// are a deliberate mutation that the toy checks must catch.
  TieBreak tie_break = TieBreak::LowestIndex;
  /// Multiplies the accuracy claimed for each compressor in the
  /// contraction checks; anything above 1 must make them fail.
  double delta_misreport = 1.0;
};

/// A criterion passes only if its check holds and it finished within its
/// runtime budget.
CriterionResult run_criterion(int id, const VerifyOptions& options);

std::vector<CriterionResult> run_acceptance(
    const VerifyOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result(const CriterionResult& result);

struct CounterexampleRow {
  std::size_t t = 0;
  double measured = 0.0;
  double expected = 0.0;
};

struct CounterexampleReport {
  std::string which;
  double gamma = 0.0;
  std::size_t T = 0;
  /// Per-round comparison against the closed form (empty for safe_ef).
  std::vector<CounterexampleRow> rows;
  /// Largest |measured - expected| for cgd and ef21; the final gap for safe_ef.
  double max_deviation = 0.0;
  /// Tolerance for cgd and ef21; the 10 M R / sqrt(T) envelope for safe_ef.
  double tolerance = 0.0;
  /// Running minimum of the gap (safe_ef only).
  double running_min = 0.0;
  bool passed = false;
};

/// Runs the two-dimensional toy with Top-1 and gamma = 1/sqrt(1000) for
/// which in {cgd, ef21, safe_ef}. Throws std::invalid_argument otherwise.
CounterexampleReport counterexample(const std::string& which,
                                    TieBreak tie_break = TieBreak::LowestIndex);

}  // namespace cefopt
