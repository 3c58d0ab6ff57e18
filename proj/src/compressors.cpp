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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cefopt {

std::size_t CompressorSpec::resolve_k(std::size_t d) const {
  if (kind == CompressorKind::Identity) return d;
  std::size_t budget = k;
  if (budget == 0 && fraction > 0.0) {
    budget = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(d)));
    budget = std::max<std::size_t>(budget, 1);
  }
  if (budget == 0) throw InvalidSpec("compressor budget k must be positive");
  if (budget > d) {
    throw InvalidSpec("compressor budget k=" + std::to_string(budget) +
                      " exceeds dimension " + std::to_string(d));
  }
  return budget;
}

double CompressorSpec::nominal_delta(std::size_t d) const {
  if (kind == CompressorKind::Identity) return 1.0;
  return static_cast<double>(resolve_k(d)) / static_cast<double>(d);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

void parse_budget(const std::string& token, CompressorSpec& spec) {
  try {
    if (!token.empty() && token.back() == '%') {
      spec.fraction = std::stod(token.substr(0, token.size() - 1)) / 100.0;
      if (!(spec.fraction > 0.0 && spec.fraction <= 1.0))
        throw InvalidSpec("fraction out of (0, 100%]");
    } else {
      std::size_t used = 0;
      long long v = std::stoll(token, &used);
      if (used != token.size() || v <= 0) throw InvalidSpec("bad budget");
      spec.k = static_cast<std::size_t>(v);
    }
  } catch (const std::logic_error&) {
    throw InvalidSpec("invalid compressor budget '" + token + "'");
  }
}

}  // namespace

CompressorSpec CompressorSpec::parse(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.empty()) throw InvalidSpec("empty compressor spec");
  CompressorSpec spec;
  const std::string& name = parts[0];
  std::size_t pos = 1;
  if (name == "identity" || name == "id") {
    spec.kind = CompressorKind::Identity;
  } else if (name == "topk" || name == "randk") {
    spec.kind = name == "topk" ? CompressorKind::TopK : CompressorKind::RandK;
    if (parts.size() < 2) throw InvalidSpec("'" + text + "' needs a budget");
    parse_budget(parts[1], spec);
    pos = 2;
  } else {
    throw InvalidSpec("unknown compressor '" + name + "'");
  }
  for (; pos < parts.size(); ++pos) {
    if (parts[pos] == "shared" && spec.kind == CompressorKind::RandK) {
      spec.shared_randomness = true;
    } else if (parts[pos] == "indices") {
      spec.count_index_overhead = true;
    } else {
      throw InvalidSpec("unknown compressor option '" + parts[pos] + "' in '" +
                        text + "'");
    }
  }
  return spec;
}

std::string CompressorSpec::to_string() const {
  std::string out;
  switch (kind) {
    case CompressorKind::Identity:
      out = "identity";
      break;
    case CompressorKind::TopK:
    case CompressorKind::RandK: {
      out = kind == CompressorKind::TopK ? "topk:" : "randk:";
      if (k == 0 && fraction > 0.0) {
        std::ostringstream os;
        os << fraction * 100.0 << "%";
        out += os.str();
      } else {
        out += std::to_string(k);
      }
      if (shared_randomness) out += ":shared";
      break;
    }
  }
  if (count_index_overhead) out += ":indices";
  return out;
}

namespace {

std::vector<Index> top_k_support(const Vector& x, std::size_t k, TieBreak tie) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [&](Index a, Index b) {
    const double fa = std::abs(x[a]);
    const double fb = std::abs(x[b]);
    if (fa != fb) return fa > fb;
    return tie == TieBreak::LowestIndex ? a < b : a > b;
  };
  if (k < idx.size()) {
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                     idx.end(), before);
    idx.resize(k);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Index> rand_k_support(std::size_t d, std::size_t k, RandomStream& rng) {
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  std::vector<Index> idx(d);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t r = j + rng.index_below(d - j);
    std::swap(idx[j], idx[r]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

CompressedUpdate compress(const CompressorSpec& spec, const Vector& x,
                          RandomStream& rng) {
  const auto d = static_cast<std::size_t>(x.size());
  CompressedUpdate out;
  if (spec.kind == CompressorKind::Identity) {
    out.payload = x;
    out.support.resize(d);
    std::iota(out.support.begin(), out.support.end(), Index{0});
    out.transmitted_floats = d;
    return out;
  }
  const std::size_t k = spec.resolve_k(d);
  out.support = spec.kind == CompressorKind::TopK
                    ? top_k_support(x, k, spec.tie_break)
                    : rand_k_support(d, k, rng);
  out.payload = Vector::Zero(x.size());
  for (Index j : out.support) out.payload[j] = x[j];
  out.transmitted_floats = spec.count_index_overhead ? 2 * k : k;
  return out;
}

double contraction_defect(const Vector& x, const CompressedUpdate& out) {
  const double norm_sq = x.squaredNorm();
  if (norm_sq == 0.0) return 0.0;
  return (out.payload - x).squaredNorm() / norm_sq;
}

double contraction_audit(const CompressorSpec& spec, std::size_t d,
                         double claimed_delta, std::size_t samples,
                         RandomStream& rng) {
  if (!spec.deterministic())
    throw InvalidSpec("per-sample contraction audit needs a deterministic compressor");
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x = rng.normal_vector(static_cast<Index>(d));
    // Every fourth sample has equal magnitudes, the extremal case for Top-K.
    if (s % 4 == 3) x = x.cwiseSign();
    double defect = contraction_defect(x, compress(spec, x, rng));
    double ratio = claimed_delta < 1.0
                       ? defect / (1.0 - claimed_delta)
                       : (defect > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    worst = std::max(worst, ratio);
  }
  return worst;
}

}  // namespace cefopt
