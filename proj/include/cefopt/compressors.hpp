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

#include <stdexcept>
#include <string>
#include <vector>

namespace cefopt {

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class CompressorKind { Identity, TopK, RandK };

/// Order used to break magnitude ties in Top-K. Only LowestIndex is a
/// faithful configuration; HighestIndex exists for mutation testing.
enum class TieBreak { LowestIndex, HighestIndex };

/// Contractive compressor description. `k` is an absolute coordinate budget;
/// when it is zero and `fraction` is positive the budget is resolved against
/// the input dimension at application time.
struct CompressorSpec {
  CompressorKind kind = CompressorKind::Identity;
  std::size_t k = 0;
  double fraction = 0.0;
  bool shared_randomness = false;
  bool count_index_overhead = false;
  TieBreak tie_break = TieBreak::LowestIndex;

  static CompressorSpec identity() { return {}; }
  static CompressorSpec top_k(std::size_t k) {
    CompressorSpec s;
    s.kind = CompressorKind::TopK;
    s.k = k;
    return s;
  }
  static CompressorSpec rand_k(std::size_t k, bool shared = false) {
    CompressorSpec s;
    s.kind = CompressorKind::RandK;
    s.k = k;
    s.shared_randomness = shared;
    return s;
  }

  /// Budget actually used on a d-dimensional input. Throws InvalidSpec when
  /// the budget is zero or exceeds d.
  std::size_t resolve_k(std::size_t d) const;

  /// Nominal accuracy: 1 for Identity, k/d otherwise.
  double nominal_delta(std::size_t d) const;

  /// True when the output is a deterministic function of the input.
  bool deterministic() const { return kind != CompressorKind::RandK; }

  /// Parses "identity", "topk:K", "topk:P%", "randk:K", "randk:K:shared",
  /// optionally suffixed with ":indices" to charge index overhead.
  static CompressorSpec parse(const std::string& text);
  std::string to_string() const;
};

struct CompressedUpdate {
  Vector payload;
  /// Selected coordinates in ascending order.
  std::vector<Index> support;
  std::size_t transmitted_floats = 0;
};

/// Applies the compressor. `rng` is only consumed by Rand-K; for shared
/// randomness callers pass a copy of the round-level stream to every worker.
CompressedUpdate compress(const CompressorSpec& spec, const Vector& x,
                          RandomStream& rng);

/// ||payload - x||^2 / ||x||^2, and 0 for x = 0.
double contraction_defect(const Vector& x, const CompressedUpdate& out);

/// Largest observed ratio defect / (1 - delta) over random Gaussian inputs.
/// A value above 1 means the claimed delta is violated by some sample; for
/// delta = 1 any nonzero defect reports infinity.
double contraction_audit(const CompressorSpec& spec, std::size_t d,
                         double claimed_delta, std::size_t samples,
                         RandomStream& rng);

}  // namespace cefopt
