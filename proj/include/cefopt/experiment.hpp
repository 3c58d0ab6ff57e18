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

#include "cefopt/algorithms.hpp"
#include "cefopt/config.hpp"
#include "cefopt/csv.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cefopt {

/// Checks enumerations, compressor strings, and ranges of one sweep point
/// without building the problem. Throws ConfigError.
void validate_point(const FieldMap& fields);

ProblemInstance build_problem(const FieldMap& fields, std::uint64_t seed);

/// Resolves symbolic values (theory, inv_sqrt_T, auto) against the problem.
AlgorithmConfig build_algorithm(const FieldMap& fields, const ProblemInstance& problem,
                                std::uint64_t seed);

struct RunOutcome {
  std::size_t point = 0;
  std::uint64_t seed = 0;
  FieldMap fields;
  std::optional<RunRecord> record;
  std::optional<AlgorithmConfig> algorithm;
  std::string trajectory_path;
  std::string error;
};

struct ExperimentOptions {
  std::size_t jobs = 1;
  /// Overrides the config's output directory when set.
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed_override;
  bool write_files = true;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  std::string out_dir;
  std::string summary_path;

  bool any_flagged() const;
  bool any_error() const;
};

/// Runs every (sweep point, seed) pair, at most `jobs` at a time, then
/// writes one trajectory CSV per run and a summary CSV.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options);

SummaryRow summary_row(const RunOutcome& run);

}  // namespace cefopt
