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

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace cefopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// SplitMix64 finalizer. Used to derive independent sub-stream seeds from a
/// run seed so that each consumer of randomness owns its own engine.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag,
                                    std::uint64_t index = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ tag) ^ index);
}

// Tags for sub-streams of a run seed.
namespace stream_tag {
inline constexpr std::uint64_t kUplinkMask = 0x75706c6e6bULL;
inline constexpr std::uint64_t kDownlinkMask = 0x646f776e6cULL;
inline constexpr std::uint64_t kFunctionNoise = 0x66766e6f6973ULL;
inline constexpr std::uint64_t kSubgradNoise = 0x73676e6f6973ULL;
inline constexpr std::uint64_t kProblemData = 0x70726f626cULL;
}  // namespace stream_tag

/// Explicit, copyable random stream. Copies replay the same sequence, which
/// is how shared-randomness compressors hand one mask to every worker.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(mix_seed(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Uniform integer in [0, n).
  std::size_t index_below(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
  }

  Vector normal_vector(Index d) {
    Vector out(d);
    for (Index j = 0; j < d; ++j) out[j] = normal();
    return out;
  }

  Matrix normal_matrix(Index rows, Index cols) {
    Matrix out(rows, cols);
    // Row-major fill order keeps generation independent of storage layout.
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) out(r, c) = normal();
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace cefopt
