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

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cefopt {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A family of n convex functions phi_1..phi_n on R^d with a value oracle and
/// a subgradient oracle. Used for both objectives f_i and constraints g_i.
class WorkerFunctions {
 public:
  virtual ~WorkerFunctions() = default;

  virtual std::size_t workers() const = 0;
  virtual Index dim() const = 0;

  virtual double value(std::size_t i, const Vector& x) const = 0;
  virtual Vector subgradient(std::size_t i, const Vector& x) const = 0;

  /// Value and subgradient at the same point. Overridden where both share
  /// work (e.g. a residual).
  virtual double evaluate(std::size_t i, const Vector& x, Vector& subgrad) const {
    subgrad = subgradient(i, x);
    return value(i, x);
  }

  /// Number of local terms when phi_i is a finite sum or average of convex
  /// per-sample losses; 0 when the function is analytic.
  virtual std::size_t local_terms(std::size_t /*i*/) const { return 0; }

  /// Unbiased estimate of phi_i'(x) built from the listed local terms: the
  /// subgradient of the batch average rescaled to phi_i's normalization.
  virtual Vector batch_subgradient(std::size_t i, const Vector& x,
                                   std::span<const std::size_t> terms) const;
};

struct ProblemMetadata {
  std::string name;
  /// Bound on every f_i and g_i subgradient norm.
  double M = 0.0;
  /// Bound on ||x0 - x_star||.
  double R = 0.0;
  Vector x0;
  std::optional<Vector> x_star;
  std::optional<double> f_star;
  /// Initial EF21 estimators prescribed by the instance (same for all workers).
  std::optional<Vector> ef21_v0;
  /// Smoothness constant sqrt(mean L_i^2) when the objective is smooth.
  std::optional<double> smoothness;
};

/// n-worker problem min (1/n) sum f_i(x) s.t. (1/n) sum g_i(x) <= 0.
/// Immutable after construction; all oracle calls are const.
class ProblemInstance {
 public:
  ProblemInstance(std::shared_ptr<const WorkerFunctions> objective,
                  std::shared_ptr<const WorkerFunctions> constraint,
                  ProblemMetadata meta);

  std::size_t workers() const { return objective_->workers(); }
  Index dim() const { return objective_->dim(); }
  bool unconstrained() const { return constraint_ == nullptr; }

  double f_value(std::size_t i, const Vector& x) const { return objective_->value(i, x); }
  Vector f_subgrad(std::size_t i, const Vector& x) const { return objective_->subgradient(i, x); }
  double f_evaluate(std::size_t i, const Vector& x, Vector& subgrad) const {
    return objective_->evaluate(i, x, subgrad);
  }
  double g_value(std::size_t i, const Vector& x) const;
  Vector g_subgrad(std::size_t i, const Vector& x) const;

  /// Worker averages.
  double f(const Vector& x) const;
  double g(const Vector& x) const;

  const WorkerFunctions& objective() const { return *objective_; }
  const WorkerFunctions* constraint() const { return constraint_.get(); }
  std::shared_ptr<const WorkerFunctions> objective_ptr() const { return objective_; }
  std::shared_ptr<const WorkerFunctions> constraint_ptr() const { return constraint_; }

  const ProblemMetadata& meta() const { return meta_; }

  /// Same objective with a constraint attached. The known optimum is kept
  /// only when it stays feasible; M grows to cover the constraint.
  ProblemInstance with_constraint(std::shared_ptr<const WorkerFunctions> constraint,
                                  double constraint_M) const;

 private:
  std::shared_ptr<const WorkerFunctions> objective_;
  std::shared_ptr<const WorkerFunctions> constraint_;
  ProblemMetadata meta_;
};

// --- Building blocks -------------------------------------------------------

/// phi_i(x) = ||x||_1 for every worker; sign(0) = 0.
class L1Norm final : public WorkerFunctions {
 public:
  L1Norm(std::size_t n, Index d) : n_(n), d_(d) {}
  std::size_t workers() const override { return n_; }
  Index dim() const override { return d_; }
  double value(std::size_t, const Vector& x) const override { return x.lpNorm<1>(); }
  Vector subgradient(std::size_t, const Vector& x) const override { return x.cwiseSign(); }

 private:
  std::size_t n_;
  Index d_;
};

/// phi_i(x) = ||A_i x - b_i||_1, a sum over the rows of A_i.
class L1Regression final : public WorkerFunctions {
 public:
  L1Regression(std::vector<Matrix> A, std::vector<Vector> b);
  std::size_t workers() const override { return A_.size(); }
  Index dim() const override { return A_.front().cols(); }
  double value(std::size_t i, const Vector& x) const override;
  Vector subgradient(std::size_t i, const Vector& x) const override;
  double evaluate(std::size_t i, const Vector& x, Vector& subgrad) const override;
  std::size_t local_terms(std::size_t i) const override {
    return static_cast<std::size_t>(A_[i].rows());
  }
  Vector batch_subgradient(std::size_t i, const Vector& x,
                           std::span<const std::size_t> terms) const override;

  const Matrix& A(std::size_t i) const { return A_[i]; }
  const Vector& b(std::size_t i) const { return b_[i]; }

  /// max_i sqrt(sum_j (sum_r |A_i(r,j)|)^2), an upper bound on ||A_i^T s||
  /// over sign vectors s (not tight).
  double subgradient_bound() const;

 private:
  std::vector<Matrix> A_;
  std::vector<Vector> b_;
};

/// phi_i(x) = <q_i, x> - r_i.
class AffineFunctions final : public WorkerFunctions {
 public:
  AffineFunctions(std::vector<Vector> q, std::vector<double> r);
  std::size_t workers() const override { return q_.size(); }
  Index dim() const override { return q_.front().size(); }
  double value(std::size_t i, const Vector& x) const override { return q_[i].dot(x) - r_[i]; }
  Vector subgradient(std::size_t i, const Vector&) const override { return q_[i]; }
  double max_slope() const;

 private:
  std::vector<Vector> q_;
  std::vector<double> r_;
};

/// phi_i(x) = ||x - center|| - radius for every worker.
class BallConstraint final : public WorkerFunctions {
 public:
  BallConstraint(std::size_t n, Vector center, double radius)
      : n_(n), center_(std::move(center)), radius_(radius) {}
  std::size_t workers() const override { return n_; }
  Index dim() const override { return center_.size(); }
  double value(std::size_t, const Vector& x) const override {
    return (x - center_).norm() - radius_;
  }
  Vector subgradient(std::size_t, const Vector& x) const override;

 private:
  std::size_t n_;
  Vector center_;
  double radius_;
};

/// phi_i(x) = inner_i(x) - shift.
class ShiftedFunctions final : public WorkerFunctions {
 public:
  ShiftedFunctions(std::shared_ptr<const WorkerFunctions> inner, double shift)
      : inner_(std::move(inner)), shift_(shift) {}
  std::size_t workers() const override { return inner_->workers(); }
  Index dim() const override { return inner_->dim(); }
  double value(std::size_t i, const Vector& x) const override {
    return inner_->value(i, x) - shift_;
  }
  Vector subgradient(std::size_t i, const Vector& x) const override {
    return inner_->subgradient(i, x);
  }
  double evaluate(std::size_t i, const Vector& x, Vector& s) const override {
    return inner_->evaluate(i, x, s) - shift_;
  }
  std::size_t local_terms(std::size_t i) const override { return inner_->local_terms(i); }
  Vector batch_subgradient(std::size_t i, const Vector& x,
                           std::span<const std::size_t> terms) const override {
    return inner_->batch_subgradient(i, x, terms);
  }

 private:
  std::shared_ptr<const WorkerFunctions> inner_;
  double shift_;
};

// --- l1 toy ----------------------------------------------------------------

/// f_i(x) = ||x||_1 on R^2 for n identical workers, x0 = (gamma/2, -1),
/// EF21 estimators (1, 1).
ProblemInstance make_l1_toy(double gamma, std::size_t n = 1);

// --- Synthetic l1 regression -----------------------------------------------

struct SyntheticGenParams {
  std::size_t n = 10;
  Index d = 100;
  double s = 1.0;
  double zeta = 1e-3;
  std::uint64_t seed = 0;
  /// Solve for the exact optimum when zeta > 0 so that f_star is known.
  bool solve_reference = false;
};

/// Data behind a synthetic instance; kept for tests and reference solves.
struct SyntheticL1Data {
  Matrix shared_A;
  /// Per-worker draws after Frobenius normalization, before the shift.
  std::vector<Matrix> normalized_draws;
  std::vector<Matrix> A;
  std::vector<Vector> b;
  Vector x_planted;
};

SyntheticL1Data generate_l1_data(const SyntheticGenParams& p);

/// Unconstrained l1 regression instance from the generator, x0 = 0.
ProblemInstance gen_synthetic_l1(const SyntheticGenParams& p);

/// Halfspace constraint g_i(x) = <q_i, x> - r_i that cuts off x0 = 0 and
/// keeps the planted point strictly feasible: the worker average is
/// g(x) = tau - <u, x> with u = x_planted / ||x_planted||, tau = margin *
/// ||x_planted||, plus zero-mean per-worker perturbations of q_i of relative
/// size `heterogeneity`.
struct HalfspaceConstraint {
  std::shared_ptr<const AffineFunctions> functions;
  double M = 0.0;
};
HalfspaceConstraint planted_halfspace(const Vector& x_planted, std::size_t n,
                                      double margin, double heterogeneity,
                                      std::uint64_t seed);

struct L1ReferenceSolution {
  Vector x;
  double value = 0.0;
  /// True when a dual certificate confirmed optimality of the vertex.
  bool certified = false;
};

/// Minimizes sum_i ||A_i x - b_i||_1 (worker sum, not average) by iteratively
/// reweighted least squares followed by a vertex polish and a dual check.
L1ReferenceSolution solve_l1_reference(const std::vector<Matrix>& A,
                                       const std::vector<Vector>& b);

// --- Worst-case lower-bound instance ---------------------------------------

struct WorstCaseParams {
  std::size_t T = 256;
  double delta = 0.25;
  double R = 1.0;
  double M = 1.0;

  double C() const;
  double mu() const;
  Index dim() const;
};

/// The shared function h(x) = C max_{j<=T} x_j + (mu/2)||x||^2 on
/// ||x|| <= R/2 and C max_{j<=T} x_j + (mu R/2)||x|| - mu R^2/8 outside.
class WorstCaseFunction final : public WorkerFunctions {
 public:
  WorstCaseFunction(std::size_t n, const WorstCaseParams& p);
  std::size_t workers() const override { return n_; }
  Index dim() const override { return d_; }
  double value(std::size_t i, const Vector& x) const override;
  Vector subgradient(std::size_t i, const Vector& x) const override;

  /// Smallest index (0-based) attaining max_{j<T} x_j.
  Index argmax_index(const Vector& x) const;

 private:
  std::size_t n_;
  std::size_t T_;
  Index d_;
  double C_;
  double mu_;
  double R_;
};

/// Every worker holds h; g_i = h - f_star. Throws GenerationError outside
/// delta <= 0.3, T >= 1/delta^2 unless `allow_outside_regime`.
ProblemInstance make_worst_case(const WorstCaseParams& p, std::size_t n,
                                bool allow_outside_regime = false);

// --- Neyman-Pearson classification -----------------------------------------

struct LabeledData {
  Matrix features;  // one sample per row
  Vector labels;    // 0 or 1
};

/// Headerless CSV, one sample per row, last column the {0,1} label.
LabeledData load_labeled_csv(const std::string& path);
void save_labeled_csv(const std::string& path, const LabeledData& data);

/// Two Gaussian blobs at +-separation/2 along the first axis, labels
/// interleaved so contiguous shards contain both classes.
LabeledData gen_two_class_blobs(std::size_t samples, Index features,
                                double separation, std::uint64_t seed);

/// Average logistic loss of a linear classifier (weights then bias) on a set
/// of samples that all carry the same label.
class LogisticLoss final : public WorkerFunctions {
 public:
  /// shards[i] holds worker i's samples (rows) that share `label`.
  LogisticLoss(std::vector<Matrix> shards, int label);
  std::size_t workers() const override { return shards_.size(); }
  Index dim() const override { return shards_.front().cols() + 1; }
  double value(std::size_t i, const Vector& x) const override;
  Vector subgradient(std::size_t i, const Vector& x) const override;
  double evaluate(std::size_t i, const Vector& x, Vector& subgrad) const override;
  std::size_t local_terms(std::size_t i) const override {
    return static_cast<std::size_t>(shards_[i].rows());
  }
  Vector batch_subgradient(std::size_t i, const Vector& x,
                           std::span<const std::size_t> terms) const override;
  /// max over samples of ||(a, 1)||.
  double gradient_bound() const;

 private:
  std::vector<Matrix> shards_;
  double sign_;
};

/// f = class-0 cross-entropy, g = class-1 cross-entropy minus c, both for a
/// linear model with bias; rows are split contiguously across n workers.
ProblemInstance make_neyman_pearson(const Matrix& features, const Vector& labels,
                                    double c, std::size_t n);

// --- Smooth quadratic ------------------------------------------------------

struct SmoothQuadraticParams {
  std::size_t n = 4;
  Index d = 60;
  /// Eigenvalues are log-spaced over [L * 10^-decades, L].
  double L = 1.0;
  double decades = 6.0;
  /// Per-worker curvature scales are drawn in [1 - spread, 1 + spread] and
  /// renormalized to average one.
  double spread = 0.5;
  std::uint64_t seed = 0;
};

/// f_i(x) = 0.5 (x - x*)^T diag(lambda_i) (x - x*) with x0 = 0 and x* the
/// unit-norm vector of equal entries; smoothness recorded in meta.
ProblemInstance make_smooth_quadratic(const SmoothQuadraticParams& p);

// --- Randomized audit ------------------------------------------------------

struct AuditReport {
  /// Largest sampled subgradient norm over f_i and g_i.
  double max_subgrad_norm = 0.0;
  /// Largest violation of phi(y) >= phi(x) + <phi'(x), y - x>, scaled by
  /// max(1, |phi(y)|).
  double max_convexity_violation = 0.0;
  std::size_t pairs = 0;
};

/// Samples (x, y) pairs around x0 at radius `scale` (Gaussian directions).
AuditReport audit_instance(const ProblemInstance& problem, std::size_t pairs,
                           double scale, RandomStream& rng);

}  // namespace cefopt
