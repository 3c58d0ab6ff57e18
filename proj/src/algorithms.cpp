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
#include "cefopt/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace cefopt {

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::SafeEF:
      return "safe_ef";
    case AlgorithmKind::CGD:
      return "cgd";
    case AlgorithmKind::EF21:
      return "ef21";
    case AlgorithmKind::ProjectedEF21:
      return "projected_ef21";
    case AlgorithmKind::PrimalDualEF:
      return "primal_dual_ef";
  }
  return "unknown";
}

AlgorithmKind parse_algorithm_kind(const std::string& text) {
  if (text == "safe_ef") return AlgorithmKind::SafeEF;
  if (text == "cgd") return AlgorithmKind::CGD;
  if (text == "ef21") return AlgorithmKind::EF21;
  if (text == "projected_ef21") return AlgorithmKind::ProjectedEF21;
  if (text == "primal_dual_ef") return AlgorithmKind::PrimalDualEF;
  throw std::invalid_argument("unknown algorithm kind '" + text + "'");
}

Projection ball_projection(Vector center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
  return [center = std::move(center), radius](const Vector& x) -> Vector {
    if (std::isinf(radius)) return x;
    Vector diff = x - center;
    const double norm = diff.norm();
    if (norm <= radius) return x;
    return center + (radius / norm) * diff;
  };
}

Projection ball_projection(double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
  return [radius](const Vector& x) -> Vector {
    if (std::isinf(radius)) return x;
    const double norm = x.norm();
    if (norm <= radius) return x;
    return (radius / norm) * x;
  };
}

Projection box_projection(double lower, double upper) {
  if (!(lower <= upper)) throw std::invalid_argument("box needs lower <= upper");
  return [lower, upper](const Vector& x) -> Vector { return x.cwiseMax(lower).cwiseMin(upper); };
}

Projection ProjectionSpec::make() const {
  switch (kind) {
    case Kind::None:
      return [](const Vector& x) { return x; };
    case Kind::Ball:
      return ball_projection(radius);
    case Kind::Box:
      return box_projection(lower, upper);
  }
  return [](const Vector& x) { return x; };
}

void AlgorithmConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (T < 1) throw std::invalid_argument("T must be >= 1");
  if (kind == AlgorithmKind::PrimalDualEF) {
    if (!(eta > 0.0)) throw std::invalid_argument("primal_dual_ef needs eta > 0");
    if (!(lambda0 >= 0.0)) throw std::invalid_argument("primal_dual_ef needs lambda0 >= 0");
  }
  if (stochastic) stochastic->validate();
}

namespace {

/// State and helpers shared by every protocol: worker and server random
/// streams, oracle selection, and compression with support bookkeeping.
class ProtocolBase : public RoundProtocol {
 public:
  ProtocolBase(const ProblemInstance& problem, const AlgorithmConfig& cfg)
      : problem_(problem),
        cfg_(cfg),
        n_(problem.workers()),
        x_(problem.meta().x0),
        downlink_rng_(derive_seed(cfg.seed, stream_tag::kDownlinkMask)),
        fv_rng_(derive_seed(cfg.seed, stream_tag::kFunctionNoise)),
        sg_rng_(derive_seed(cfg.seed, stream_tag::kSubgradNoise)) {
    cfg.validate();
    const auto d = static_cast<std::size_t>(problem.dim());
    cfg.uplink.resolve_k(d);
    cfg.downlink.resolve_k(d);
    for (std::size_t i = 0; i < n_; ++i)
      worker_rng_.emplace_back(derive_seed(cfg.seed, stream_tag::kUplinkMask, i + 1));
  }

  const Vector& model() const override { return x_; }
  bool needs_exact_subgradients() const override { return !cfg_.stochastic.has_value(); }

 protected:
  bool constrained() const { return !problem_.unconstrained(); }

  Vector objective_subgrad(RoundContext& ctx, std::size_t i) {
    if (!cfg_.stochastic) return ctx.f_subgrads[i];
    return stochastic_subgrad(problem_, i, x_, *cfg_.stochastic, sg_rng_, false);
  }

  Vector constraint_subgrad(std::size_t i) {
    if (!cfg_.stochastic) return problem_.g_subgrad(i, x_);
    return stochastic_subgrad(problem_, i, x_, *cfg_.stochastic, sg_rng_, true);
  }

  /// Worker i's report of g_i at the current model.
  double report_g(std::size_t i) {
    if (!cfg_.stochastic) return problem_.g_value(i, x_);
    return noisy_g_value(problem_, i, x_, *cfg_.stochastic, fv_rng_);
  }

  /// Averaged constraint report for the scalar exchange; charges n uplink
  /// scalars and one broadcast scalar.
  double exchange_constraint(RoundContext& ctx) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) sum += report_g(i);
    ctx.charge.uplink_scalars += n_;
    ctx.charge.downlink_scalars += 1;
    return sum / static_cast<double>(n_);
  }

  /// Worker-side compression. Shared Rand-K hands every worker a copy of the
  /// same per-round stream so the masks coincide.
  Vector uplink_compress(RoundContext& ctx, std::size_t i, const Vector& v) {
    CompressedUpdate out;
    if (cfg_.uplink.kind == CompressorKind::RandK && cfg_.uplink.shared_randomness) {
      RandomStream round_rng(derive_seed(cfg_.seed, stream_tag::kUplinkMask, ~std::uint64_t{0} - ctx.t));
      out = compress(cfg_.uplink, v, round_rng);
    } else {
      out = compress(cfg_.uplink, v, worker_rng_[i]);
    }
    ctx.charge.uplink_payload += out.transmitted_floats;
    if (ctx.uplink_supports.size() < n_) ctx.uplink_supports.resize(n_);
    ctx.uplink_supports[i] = std::move(out.support);
    return std::move(out.payload);
  }

  /// Server-side compression of w - x followed by x <- x + C0(w - x). The
  /// selected coordinates are copied from w, which equals x + (w - x) up to
  /// rounding and makes the identity downlink exact.
  void downlink_update(RoundContext& ctx, const Vector& w) {
    CompressedUpdate out = compress(cfg_.downlink, w - x_, downlink_rng_);
    for (Index j : out.support) x_[j] = w[j];
    ctx.charge.downlink_payload += out.transmitted_floats;
    ctx.downlink_support = std::move(out.support);
  }

  /// Charges a full-model broadcast.
  void charge_full_broadcast(RoundContext& ctx) {
    ctx.charge.downlink_payload += static_cast<std::size_t>(problem_.dim());
  }

  const ProblemInstance& problem_;
  AlgorithmConfig cfg_;
  std::size_t n_;
  Vector x_;
  std::vector<RandomStream> worker_rng_;
  RandomStream downlink_rng_;
  RandomStream fv_rng_;
  RandomStream sg_rng_;
};

// --- Safe-EF and primal-dual EF --------------------------------------------

/// EF14 uplink with EF21-P style downlink. The per-worker direction h_i is
/// the only difference between Safe-EF and the primal-dual method.
class ErrorFeedbackProtocol : public ProtocolBase {
 public:
  ErrorFeedbackProtocol(const ProblemInstance& problem, const AlgorithmConfig& cfg)
      : ProtocolBase(problem, cfg),
        w_(x_),
        e_(n_, Vector::Zero(problem.dim())),
        x_hat_(x_) {}

  void uplink_phase(RoundContext& ctx) override {
    h_sum_ = Vector::Zero(x_.size());
    v_sum_ = Vector::Zero(x_.size());
    for (std::size_t i = 0; i < n_; ++i) {
      Vector h = direction(ctx, i);
      Vector u = e_[i] + h;
      Vector v = uplink_compress(ctx, i, u);
      e_[i] = u - v;
      h_sum_ += h;
      v_sum_ += v;
    }
  }

  void server_phase(RoundContext&) override {
    const Vector v = v_sum_ / static_cast<double>(n_);
    w_ -= cfg_.gamma * v;
  }

  void downlink_phase(RoundContext& ctx) override { downlink_update(ctx, w_); }

  bool state_finite() const override {
    if (!x_.allFinite() || !w_.allFinite()) return false;
    for (const Vector& e : e_)
      if (!e.allFinite()) return false;
    return true;
  }

  void after_round(RoundContext&, RunDiagnostics& diag) override {
    Vector e_bar = Vector::Zero(x_.size());
    for (const Vector& e : e_) e_bar += e;
    e_bar /= static_cast<double>(n_);
    const Vector expected = x_hat_ - cfg_.gamma * (h_sum_ / static_cast<double>(n_));
    x_hat_ = w_ - cfg_.gamma * e_bar;
    diag.virtual_residual.push_back((x_hat_ - expected).norm());
    diag.error_norm_sq.push_back(e_bar.squaredNorm());
  }

 protected:
  virtual Vector direction(RoundContext& ctx, std::size_t i) = 0;

  Vector w_;
  std::vector<Vector> e_;
  Vector x_hat_;
  Vector h_sum_;
  Vector v_sum_;
};

class SafeEFProtocol final : public ErrorFeedbackProtocol {
 public:
  using ErrorFeedbackProtocol::ErrorFeedbackProtocol;

  void scalar_phase(RoundContext& ctx) override {
    use_constraint_ = false;
    if (!constrained()) return;
    const double g = exchange_constraint(ctx);
    ctx.reported_g = g;
    use_constraint_ = g > cfg_.c;
  }

 protected:
  Vector direction(RoundContext& ctx, std::size_t i) override {
    return use_constraint_ ? constraint_subgrad(i) : objective_subgrad(ctx, i);
  }

 private:
  bool use_constraint_ = false;
};

class PrimalDualProtocol final : public ErrorFeedbackProtocol {
 public:
  PrimalDualProtocol(const ProblemInstance& problem, const AlgorithmConfig& cfg)
      : ErrorFeedbackProtocol(problem, cfg), lambda_(cfg.lambda0) {}

  void scalar_phase(RoundContext& ctx) override {
    lambda_at_round_ = lambda_;
    if (!constrained()) return;
    // Workers need lambda^t for h_i^t.
    ctx.charge.downlink_scalars += 1;
    if (last_report_) ctx.reported_g = *last_report_;
  }

  void downlink_phase(RoundContext& ctx) override {
    ErrorFeedbackProtocol::downlink_phase(ctx);
    if (!constrained()) return;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) sum += report_g(i);
    ctx.charge.uplink_scalars += n_;
    const double u = sum / static_cast<double>(n_);
    last_report_ = u;
    lambda_ = std::max(0.0, lambda_ + cfg_.eta * u);
  }

  bool state_finite() const override {
    return std::isfinite(lambda_) && ErrorFeedbackProtocol::state_finite();
  }

  void after_round(RoundContext& ctx, RunDiagnostics& diag) override {
    ErrorFeedbackProtocol::after_round(ctx, diag);
    diag.lambda.push_back(lambda_at_round_);
  }

 protected:
  Vector direction(RoundContext& ctx, std::size_t i) override {
    Vector h = objective_subgrad(ctx, i);
    if (constrained()) h += lambda_at_round_ * constraint_subgrad(i);
    return h;
  }

 private:
  double lambda_;
  double lambda_at_round_ = 0.0;
  std::optional<double> last_report_;
};

// --- CGD -------------------------------------------------------------------

class CGDProtocol final : public ProtocolBase {
 public:
  using ProtocolBase::ProtocolBase;

  void scalar_phase(RoundContext& ctx) override {
    use_constraint_ = false;
    if (!constrained()) return;
    const double g = exchange_constraint(ctx);
    ctx.reported_g = g;
    use_constraint_ = g > cfg_.c;
  }

  void uplink_phase(RoundContext& ctx) override {
    v_sum_ = Vector::Zero(x_.size());
    for (std::size_t i = 0; i < n_; ++i) {
      Vector h = use_constraint_ ? constraint_subgrad(i) : objective_subgrad(ctx, i);
      v_sum_ += uplink_compress(ctx, i, h);
    }
  }

  void server_phase(RoundContext&) override {
    x_ -= cfg_.gamma * (v_sum_ / static_cast<double>(n_));
  }

  void downlink_phase(RoundContext& ctx) override { charge_full_broadcast(ctx); }

  bool state_finite() const override { return x_.allFinite(); }

 private:
  bool use_constraint_ = false;
  Vector v_sum_;
};

// --- EF21 and Projected-EF21 -----------------------------------------------

class EF21Protocol final : public ProtocolBase {
 public:
  EF21Protocol(const ProblemInstance& problem, const AlgorithmConfig& cfg, Projection projection)
      : ProtocolBase(problem, cfg), projection_(std::move(projection)) {
    if (!problem.unconstrained())
      throw UnsupportedConfiguration(
          "ef21 handles unconstrained problems only; use projection for a feasible set");
    if (cfg.ef21_v0 && cfg.ef21_v0->size() != problem.dim())
      throw std::invalid_argument("ef21_v0 dimension does not match the problem");
  }

  void uplink_phase(RoundContext& ctx) override {
    if (ctx.t == 0) {
      v_.assign(n_, Vector());
      for (std::size_t i = 0; i < n_; ++i) {
        if (cfg_.ef21_v0) {
          v_[i] = *cfg_.ef21_v0;
        } else {
          // Workers ship their first subgradient in full.
          v_[i] = objective_subgrad(ctx, i);
          ctx.charge.uplink_payload += static_cast<std::size_t>(x_.size());
        }
      }
      return;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      Vector diff = objective_subgrad(ctx, i) - v_[i];
      v_[i] += uplink_compress(ctx, i, diff);
    }
  }

  void server_phase(RoundContext&) override {
    Vector v = Vector::Zero(x_.size());
    for (const Vector& vi : v_) v += vi;
    v /= static_cast<double>(n_);
    x_ = projection_ ? projection_(x_ - cfg_.gamma * v) : Vector(x_ - cfg_.gamma * v);
  }

  void downlink_phase(RoundContext& ctx) override { charge_full_broadcast(ctx); }

  bool state_finite() const override {
    if (!x_.allFinite()) return false;
    for (const Vector& v : v_)
      if (!v.allFinite()) return false;
    return true;
  }

 private:
  Projection projection_;
  std::vector<Vector> v_;
};

RunHeader header_for(const AlgorithmConfig& cfg) {
  RunHeader h;
  h.algorithm = to_string(cfg.kind);
  h.seed = cfg.seed;
  h.T = cfg.T;
  h.gamma = cfg.gamma;
  h.c = cfg.c;
  return h;
}

}  // namespace

RunRecord run_safe_ef(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                      const RunOptions& options) {
  SafeEFProtocol protocol(problem, cfg);
  return run_protocol(problem, protocol, header_for(cfg), options);
}

RunRecord run_primal_dual_ef(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                             const RunOptions& options) {
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("primal_dual_ef needs eta > 0");
  PrimalDualProtocol protocol(problem, cfg);
  RunHeader h = header_for(cfg);
  h.algorithm = to_string(AlgorithmKind::PrimalDualEF);
  return run_protocol(problem, protocol, h, options);
}

RunRecord run_cgd(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                  const RunOptions& options) {
  CGDProtocol protocol(problem, cfg);
  RunHeader h = header_for(cfg);
  h.algorithm = to_string(AlgorithmKind::CGD);
  return run_protocol(problem, protocol, h, options);
}

RunRecord run_ef21(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                   const RunOptions& options) {
  EF21Protocol protocol(problem, cfg, nullptr);
  RunHeader h = header_for(cfg);
  h.algorithm = to_string(AlgorithmKind::EF21);
  return run_protocol(problem, protocol, h, options);
}

RunRecord run_projected_ef21(const ProblemInstance& problem, const Projection& projection,
                             const AlgorithmConfig& cfg, const RunOptions& options) {
  EF21Protocol protocol(problem, cfg, projection);
  RunHeader h = header_for(cfg);
  h.algorithm = to_string(AlgorithmKind::ProjectedEF21);
  return run_protocol(problem, protocol, h, options);
}

RunRecord run_algorithm(const ProblemInstance& problem, const AlgorithmConfig& cfg,
                        const RunOptions& options) {
  switch (cfg.kind) {
    case AlgorithmKind::SafeEF:
      return run_safe_ef(problem, cfg, options);
    case AlgorithmKind::CGD:
      return run_cgd(problem, cfg, options);
    case AlgorithmKind::EF21:
      return run_ef21(problem, cfg, options);
    case AlgorithmKind::ProjectedEF21:
      return run_projected_ef21(problem, cfg.projection.make(), cfg, options);
    case AlgorithmKind::PrimalDualEF:
      return run_primal_dual_ef(problem, cfg, options);
  }
  throw std::invalid_argument("unknown algorithm kind");
}

StepThreshold theoretical_params(double R, double M, double delta, double delta_s,
                                 std::size_t T) {
  if (!(R > 0.0 && M > 0.0 && T >= 1))
    throw std::invalid_argument("theoretical_params needs R, M > 0 and T >= 1");
  if (!(delta > 0.0 && delta <= 1.0 && delta_s > 0.0 && delta_s <= 1.0))
    throw std::invalid_argument("theoretical_params needs delta, delta_s in (0, 1]");
  const double t = static_cast<double>(T);
  return {R * std::sqrt(delta_s * delta) / (M * std::sqrt(t)),
          32.0 * R * M / std::sqrt(delta_s * delta * t)};
}

StepThreshold theoretical_params_stochastic(double R, double M, double delta, double beta,
                                            std::size_t T) {
  if (!(beta > 0.0 && beta < 0.5))
    throw std::invalid_argument("theoretical_params_stochastic needs beta in (0, 1/2)");
  StepThreshold out = theoretical_params(R, M, delta, 1.0, T);
  out.c = 128.0 * R * M * (1.0 + std::log(1.0 / beta)) /
          std::sqrt(delta * static_cast<double>(T));
  return out;
}

double projected_ef21_step(double delta, double L) {
  if (!(delta > 0.0 && delta <= 1.0 && L > 0.0))
    throw std::invalid_argument("projected_ef21_step needs delta in (0, 1] and L > 0");
  return delta / (2.0 * std::sqrt(6.0) * L);
}

}  // namespace cefopt
