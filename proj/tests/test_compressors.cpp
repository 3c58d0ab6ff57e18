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
#include "cefopt/compressors.hpp"

#include <doctest.h>

#include <algorithm>

using namespace cefopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index j = 0;
  for (double x : v) out[j++] = x;
  return out;
}

}  // namespace

TEST_CASE("Top-1 on a magnitude tie keeps the first coordinate") {
  RandomStream rng(0);
  const CompressedUpdate out = compress(CompressorSpec::top_k(1), vec({1, -1}), rng);
  CHECK(out.payload == vec({1, 0}));
  CHECK(out.support == std::vector<Index>{0});
  CHECK(out.transmitted_floats == 1);
}

TEST_CASE("highest-index tie order picks the other coordinate") {
  RandomStream rng(0);
  CompressorSpec spec = CompressorSpec::top_k(1);
  spec.tie_break = TieBreak::HighestIndex;
  CHECK(compress(spec, vec({1, -1}), rng).payload == vec({0, -1}));
}

TEST_CASE("full budget is the identity") {
  RandomStream rng(1);
  const Vector x = rng.normal_vector(7);
  for (const CompressorSpec& spec : {CompressorSpec::top_k(7), CompressorSpec::rand_k(7)}) {
    const CompressedUpdate out = compress(spec, x, rng);
    CHECK(out.payload == x);
    CHECK(out.transmitted_floats == 7);
  }
  CHECK(compress(CompressorSpec::identity(), x, rng).payload == x);
}

TEST_CASE("Rand-1 on (1, 2, 3) averages to 28/3 over its three masks") {
  const Vector x = vec({1, 2, 3});
  double total = 0.0;
  for (Index keep = 0; keep < 3; ++keep) {
    Vector c = Vector::Zero(3);
    c[keep] = x[keep];
    total += (c - x).squaredNorm();
  }
  CHECK(total / 3.0 == doctest::Approx(28.0 / 3.0).epsilon(1e-15));
  CHECK(total / 3.0 == doctest::Approx((1.0 - 1.0 / 3.0) * 14.0).epsilon(1e-15));

  // The sampler hits every mask with roughly equal frequency.
  RandomStream rng(3);
  int hits[3] = {0, 0, 0};
  for (int s = 0; s < 30000; ++s) ++hits[compress(CompressorSpec::rand_k(1), x, rng).support[0]];
  for (int h : hits) CHECK(std::abs(h - 10000) < 400);
}

TEST_CASE("contraction defect examples") {
  RandomStream rng(0);
  const Vector a = vec({1, -1});
  CHECK(contraction_defect(a, compress(CompressorSpec::top_k(1), a, rng)) == 0.5);
  const Vector b = vec({3, 4});
  CHECK(contraction_defect(b, compress(CompressorSpec::top_k(1), b, rng)) ==
        doctest::Approx(9.0 / 25.0).epsilon(1e-15));
  const Vector c = rng.normal_vector(9);
  CHECK(contraction_defect(c, compress(CompressorSpec::identity(), c, rng)) == 0.0);
  CHECK(contraction_defect(Vector::Zero(4), compress(CompressorSpec::top_k(2), Vector::Zero(4), rng)) ==
        0.0);
}

TEST_CASE("Top-K contraction holds on random and extremal vectors") {
  RandomStream rng(42);
  for (std::size_t d : {2, 10, 100}) {
    for (std::size_t k : {std::size_t{1}, std::max<std::size_t>(1, d / 10), d / 2, d}) {
      const CompressorSpec spec = CompressorSpec::top_k(k);
      const double delta = spec.nominal_delta(d);
      for (int s = 0; s < 1000; ++s) {
        Vector x = rng.normal_vector(static_cast<Index>(d));
        if (s % 7 == 0) x = x.cwiseSign();
        const CompressedUpdate out = compress(spec, x, rng);
        REQUIRE((out.payload - x).squaredNorm() <= (1.0 - delta) * x.squaredNorm() + 1e-12);
      }
      CHECK(contraction_audit(spec, d, delta, 500, rng) <= 1.0);
    }
  }
}

TEST_CASE("contraction audit flags an overstated accuracy") {
  RandomStream rng(5);
  const CompressorSpec spec = CompressorSpec::top_k(2);
  CHECK(contraction_audit(spec, 10, 0.2, 200, rng) <= 1.0);
  CHECK(contraction_audit(spec, 10, 0.3, 200, rng) > 1.0);
  CHECK(contraction_audit(spec, 10, 1.0, 200, rng) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(contraction_audit(CompressorSpec::rand_k(2), 10, 0.2, 10, rng), InvalidSpec);
}

TEST_CASE("Rand-K enumeration matches 1 - k/d exactly for small d") {
  RandomStream rng(8);
  for (std::size_t d = 1; d <= 6; ++d) {
    for (std::size_t k = 1; k <= d; ++k) {
      const Vector x = rng.normal_vector(static_cast<Index>(d));
      double total = 0.0;
      int count = 0;
      for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        Vector c = Vector::Zero(x.size());
        for (std::size_t j = 0; j < d; ++j)
          if (mask >> j & 1u) c[static_cast<Index>(j)] = x[static_cast<Index>(j)];
        total += (c - x).squaredNorm();
        ++count;
      }
      const double expected = (1.0 - CompressorSpec::rand_k(k).nominal_delta(d)) * x.squaredNorm();
      CHECK(std::abs(total / count - expected) <= 1e-12);
    }
  }
}

TEST_CASE("Top-K is idempotent") {
  RandomStream rng(11);
  for (int s = 0; s < 200; ++s) {
    const Vector x = rng.normal_vector(20);
    const CompressorSpec spec = CompressorSpec::top_k(1 + static_cast<std::size_t>(s % 20));
    const CompressedUpdate once = compress(spec, x, rng);
    const CompressedUpdate twice = compress(spec, once.payload, rng);
    CHECK(twice.payload == once.payload);
    CHECK(twice.support == once.support);
  }
}

TEST_CASE("shared randomness gives every worker the same mask") {
  RandomStream round(17);
  RandomStream a = round;
  RandomStream b = round;
  RandomStream rng(99);
  const CompressorSpec spec = CompressorSpec::rand_k(5, true);
  const CompressedUpdate ua = compress(spec, rng.normal_vector(30), a);
  const CompressedUpdate ub = compress(spec, rng.normal_vector(30), b);
  CHECK(ua.support == ub.support);
  CHECK(ua.support.size() == 5);
  CHECK(std::is_sorted(ua.support.begin(), ua.support.end()));
}

TEST_CASE("budget errors and parsing") {
  CHECK_THROWS_AS(CompressorSpec::top_k(0).resolve_k(5), InvalidSpec);
  CHECK_THROWS_AS(CompressorSpec::top_k(6).resolve_k(5), InvalidSpec);
  CHECK(CompressorSpec::parse("topk:10%").resolve_k(200) == 20);
  CHECK(CompressorSpec::parse("topk:1%").resolve_k(10) == 1);
  CHECK(CompressorSpec::parse("randk:3:shared").shared_randomness);
  CHECK(CompressorSpec::parse("id").kind == CompressorKind::Identity);
  const CompressorSpec with_idx = CompressorSpec::parse("topk:4:indices");
  RandomStream rng(0);
  CHECK(compress(with_idx, Vector::Ones(10), rng).transmitted_floats == 8);
  for (const char* bad : {"topk", "topk:0", "topk:x", "topk:3:shared", "lowrank:2", "topk:150%"})
    CHECK_THROWS_AS(CompressorSpec::parse(bad), InvalidSpec);
  for (const char* text : {"identity", "topk:7", "randk:2:shared", "topk:25%", "topk:3:indices"})
    CHECK(CompressorSpec::parse(text).to_string() == text);
}
