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
#include "cefopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace cefopt {

Vector WorkerFunctions::batch_subgradient(std::size_t i, const Vector& x,
                                          std::span<const std::size_t>) const {
  return subgradient(i, x);
}

ProblemInstance::ProblemInstance(std::shared_ptr<const WorkerFunctions> objective,
                                 std::shared_ptr<const WorkerFunctions> constraint,
                                 ProblemMetadata meta)
    : objective_(std::move(objective)),
      constraint_(std::move(constraint)),
      meta_(std::move(meta)) {
  if (!objective_) throw std::invalid_argument("problem needs an objective");
  if (objective_->workers() == 0) throw std::invalid_argument("problem needs n >= 1");
  if (constraint_ && (constraint_->workers() != objective_->workers() ||
                      constraint_->dim() != objective_->dim()))
    throw std::invalid_argument("constraint shape does not match objective");
  if (meta_.x0.size() != objective_->dim())
    throw std::invalid_argument("x0 dimension does not match objective");
}

double ProblemInstance::g_value(std::size_t i, const Vector& x) const {
  return constraint_ ? constraint_->value(i, x) : 0.0;
}

Vector ProblemInstance::g_subgrad(std::size_t i, const Vector& x) const {
  return constraint_ ? constraint_->subgradient(i, x) : Vector::Zero(dim());
}

double ProblemInstance::f(const Vector& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < workers(); ++i) sum += objective_->value(i, x);
  return sum / static_cast<double>(workers());
}

double ProblemInstance::g(const Vector& x) const {
  if (!constraint_) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < workers(); ++i) sum += constraint_->value(i, x);
  return sum / static_cast<double>(workers());
}

ProblemInstance ProblemInstance::with_constraint(
    std::shared_ptr<const WorkerFunctions> constraint, double constraint_M) const {
  ProblemMetadata meta = meta_;
  meta.M = std::max(meta.M, constraint_M);
  ProblemInstance out(objective_, std::move(constraint), std::move(meta));
  if (out.meta_.x_star && out.g(*out.meta_.x_star) > 0.0) {
    out.meta_.x_star.reset();
    out.meta_.f_star.reset();
  }
  return out;
}

// --- Building blocks -------------------------------------------------------

L1Regression::L1Regression(std::vector<Matrix> A, std::vector<Vector> b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.empty() || A_.size() != b_.size())
    throw std::invalid_argument("L1Regression needs one (A_i, b_i) per worker");
  for (std::size_t i = 0; i < A_.size(); ++i) {
    if (A_[i].cols() != A_[0].cols() || A_[i].rows() != b_[i].size())
      throw std::invalid_argument("L1Regression shapes disagree");
  }
}

double L1Regression::value(std::size_t i, const Vector& x) const {
  return (A_[i] * x - b_[i]).lpNorm<1>();
}

Vector L1Regression::subgradient(std::size_t i, const Vector& x) const {
  return A_[i].transpose() * (A_[i] * x - b_[i]).cwiseSign();
}

double L1Regression::evaluate(std::size_t i, const Vector& x, Vector& subgrad) const {
  Vector r = A_[i] * x - b_[i];
  subgrad = A_[i].transpose() * r.cwiseSign();
  return r.lpNorm<1>();
}

Vector L1Regression::batch_subgradient(std::size_t i, const Vector& x,
                                       std::span<const std::size_t> terms) const {
  const Matrix& A = A_[i];
  Vector out = Vector::Zero(A.cols());
  if (terms.empty()) return out;
  for (std::size_t r : terms) {
    const double res = A.row(static_cast<Index>(r)).dot(x) - b_[i][static_cast<Index>(r)];
    if (res > 0.0)
      out += A.row(static_cast<Index>(r)).transpose();
    else if (res < 0.0)
      out -= A.row(static_cast<Index>(r)).transpose();
  }
  return out * (static_cast<double>(A.rows()) / static_cast<double>(terms.size()));
}

double L1Regression::subgradient_bound() const {
  double best = 0.0;
  for (const Matrix& A : A_) {
    best = std::max(best, A.cwiseAbs().colwise().sum().norm());
  }
  return best;
}

AffineFunctions::AffineFunctions(std::vector<Vector> q, std::vector<double> r)
    : q_(std::move(q)), r_(std::move(r)) {
  if (q_.empty() || q_.size() != r_.size())
    throw std::invalid_argument("AffineFunctions needs one (q_i, r_i) per worker");
}

double AffineFunctions::max_slope() const {
  double best = 0.0;
  for (const Vector& q : q_) best = std::max(best, q.norm());
  return best;
}

Vector BallConstraint::subgradient(std::size_t, const Vector& x) const {
  Vector diff = x - center_;
  const double norm = diff.norm();
  if (norm == 0.0) return Vector::Zero(diff.size());
  return diff / norm;
}

// --- l1 toy ----------------------------------------------------------------

ProblemInstance make_l1_toy(double gamma, std::size_t n) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("l1 toy needs gamma >= 0");
  ProblemMetadata meta;
  meta.name = "l1_toy";
  meta.x0 = Vector(2);
  meta.x0 << gamma / 2.0, -1.0;
  meta.x_star = Vector::Zero(2);
  meta.f_star = 0.0;
  meta.M = std::sqrt(2.0);
  meta.R = meta.x0.norm();
  meta.ef21_v0 = Vector::Ones(2);
  return ProblemInstance(std::make_shared<L1Norm>(n, 2), nullptr, std::move(meta));
}

// --- Synthetic l1 regression -----------------------------------------------

SyntheticL1Data generate_l1_data(const SyntheticGenParams& p) {
  if (p.n < 1 || p.d < 1) throw std::invalid_argument("synthetic l1 needs n, d >= 1");
  if (p.s < 0.0 || p.zeta < 0.0) throw std::invalid_argument("synthetic l1 needs s, zeta >= 0");
  RandomStream rng(derive_seed(p.seed, stream_tag::kProblemData));
  SyntheticL1Data data;
  data.shared_A = rng.normal_matrix(p.d, p.d);
  data.x_planted = rng.normal_vector(p.d);
  data.shared_A /= data.shared_A.norm();
  for (std::size_t i = 0; i < p.n; ++i) {
    Matrix Ai = rng.normal_matrix(p.d, p.d);
    Ai /= Ai.norm();
    data.normalized_draws.push_back(Ai);
    Ai = data.shared_A + p.s * Ai;
    Vector xi = rng.normal_vector(p.d);
    data.b.push_back(Ai * data.x_planted + p.zeta * xi);
    data.A.push_back(std::move(Ai));
  }
  return data;
}

ProblemInstance gen_synthetic_l1(const SyntheticGenParams& p) {
  SyntheticL1Data data = generate_l1_data(p);
  auto obj = std::make_shared<L1Regression>(data.A, data.b);
  ProblemMetadata meta;
  meta.name = "synthetic_l1";
  meta.x0 = Vector::Zero(p.d);
  meta.M = obj->subgradient_bound();
  if (p.zeta == 0.0) {
    meta.x_star = data.x_planted;
    meta.f_star = 0.0;
  } else if (p.solve_reference) {
    L1ReferenceSolution ref = solve_l1_reference(data.A, data.b);
    meta.x_star = ref.x;
    meta.f_star = ref.value / static_cast<double>(p.n);
  }
  meta.R = meta.x_star ? (meta.x0 - *meta.x_star).norm() : data.x_planted.norm();
  return ProblemInstance(std::move(obj), nullptr, std::move(meta));
}

HalfspaceConstraint planted_halfspace(const Vector& x_planted, std::size_t n,
                                      double margin, double heterogeneity,
                                      std::uint64_t seed) {
  const double norm = x_planted.norm();
  if (norm == 0.0) throw GenerationError("planted point is zero; halfspace undefined");
  if (n < 1) throw std::invalid_argument("halfspace needs n >= 1");
  const Vector u = x_planted / norm;
  const double tau = margin * norm;
  RandomStream rng(derive_seed(seed, stream_tag::kProblemData, 0x6861));
  std::vector<Vector> perturb(n);
  Vector mean = Vector::Zero(x_planted.size());
  for (std::size_t i = 0; i < n; ++i) {
    perturb[i] = rng.normal_vector(x_planted.size());
    perturb[i] /= perturb[i].norm();
    mean += perturb[i];
  }
  mean /= static_cast<double>(n);
  std::vector<Vector> q(n);
  std::vector<double> r(n, -tau);
  for (std::size_t i = 0; i < n; ++i) {
    // Perturbations are centered, so the worker average is exactly -u.
    q[i] = -u + heterogeneity * (perturb[i] - mean);
  }
  HalfspaceConstraint out;
  out.functions = std::make_shared<AffineFunctions>(std::move(q), std::move(r));
  out.M = out.functions->max_slope();
  return out;
}

L1ReferenceSolution solve_l1_reference(const std::vector<Matrix>& A,
                                       const std::vector<Vector>& b) {
  Index rows = 0;
  const Index d = A.front().cols();
  for (const Matrix& Ai : A) rows += Ai.rows();
  if (rows < d) throw std::invalid_argument("l1 reference needs at least d rows");
  Matrix S(rows, d);
  Vector y(rows);
  Index off = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    S.middleRows(off, A[i].rows()) = A[i];
    y.segment(off, A[i].rows()) = b[i];
    off += A[i].rows();
  }
  auto objective = [&](const Vector& x) { return (S * x - y).lpNorm<1>(); };

  // Reweighted least squares gets close to the optimal vertex.
  Vector x = S.colPivHouseholderQr().solve(y);
  double eps = std::max(1e-2 * (S * x - y).cwiseAbs().mean(), 1e-12);
  for (int it = 0; it < 60; ++it) {
    const Vector r = S * x - y;
    const Vector sw = r.cwiseAbs().cwiseMax(eps).cwiseInverse().cwiseSqrt();
    const Matrix Sw = sw.asDiagonal() * S;
    Matrix H = Matrix::Zero(d, d);
    H.selfadjointView<Eigen::Lower>().rankUpdate(Sw.transpose());
    const Vector next =
        H.selfadjointView<Eigen::Lower>().ldlt().solve(Sw.transpose() * sw.cwiseProduct(y));
    if (!next.allFinite()) break;
    x = next;
    eps = std::max(eps * 0.3, 1e-12);
  }

  // Exact finish: pivot between vertices (d interpolated rows) until the
  // dual certificate |y_S| <= 1 holds, each step an exact line search along
  // the edge that releases one interpolated row.
  Vector r = S * x - y;
  std::vector<Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + d, order.end(),
                    [&](Index a, Index c) { return std::abs(r[a]) < std::abs(r[c]); });
  std::vector<Index> active(order.begin(), order.begin() + d);
  std::vector<char> is_active(static_cast<std::size_t>(rows), 0);
  for (Index k : active) is_active[static_cast<std::size_t>(k)] = 1;

  L1ReferenceSolution sol{x, objective(x), false};
  const std::size_t max_pivots = 20 * static_cast<std::size_t>(rows);
  for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
    Matrix As(d, d);
    Vector bs(d);
    for (Index k = 0; k < d; ++k) {
      As.row(k) = S.row(active[static_cast<std::size_t>(k)]);
      bs[k] = y[active[static_cast<std::size_t>(k)]];
    }
    Eigen::PartialPivLU<Matrix> lu(As);
    Vector xv = lu.solve(bs);
    r = S * xv - y;
    for (Index k : active) r[k] = 0.0;
    Vector sgn = r.cwiseSign();
    for (Index k : active) sgn[k] = 0.0;
    const Vector dual = lu.transpose().solve(-(S.transpose() * sgn));
    const double val = r.lpNorm<1>();
    if (val < sol.value || pivot == 0) {
      sol.x = xv;
      sol.value = val;
    }
    Index leave = 0;
    dual.cwiseAbs().maxCoeff(&leave);
    if (std::abs(dual[leave]) <= 1.0 + 1e-10) {
      sol.x = xv;
      sol.value = val;
      sol.certified = true;
      break;
    }
    // Moving along delta changes only the released row among the active
    // ones; the initial slope is 1 - |dual[leave]| < 0.
    const double sigma = dual[leave] > 0.0 ? 1.0 : -1.0;
    Vector unit = Vector::Zero(d);
    unit[leave] = sigma;
    const Vector delta = lu.solve(unit);
    const Vector c = S * delta;
    std::vector<std::pair<double, Index>> breaks;
    double slope = 1.0 - std::abs(dual[leave]);
    for (Index k = 0; k < rows; ++k) {
      if (is_active[static_cast<std::size_t>(k)] || c[k] == 0.0) continue;
      if (r[k] == 0.0) {
        slope += std::abs(c[k]);
      } else {
        const double tk = -r[k] / c[k];
        if (tk > 0.0) breaks.emplace_back(tk, k);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    Index enter = -1;
    for (const auto& [tk, k] : breaks) {
      slope += 2.0 * std::abs(c[k]);
      if (slope >= 0.0) {
        enter = k;
        break;
      }
    }
    if (enter < 0) break;  // unbounded edge; cannot happen for a bounded LAD
    const Index leaving_row = active[static_cast<std::size_t>(leave)];
    is_active[static_cast<std::size_t>(leaving_row)] = 0;
    is_active[static_cast<std::size_t>(enter)] = 1;
    active[static_cast<std::size_t>(leave)] = enter;
  }
  return sol;
}

// --- Worst-case lower-bound instance ---------------------------------------

double WorstCaseParams::C() const {
  const double t = static_cast<double>(T);
  return M * std::sqrt(t) / (1.0 + std::sqrt(delta * t));
}

double WorstCaseParams::mu() const {
  return 2.0 * M / (R * (1.0 + std::sqrt(delta * static_cast<double>(T))));
}

Index WorstCaseParams::dim() const {
  const auto scaled = static_cast<std::size_t>(std::floor(5.0 * static_cast<double>(T) * delta));
  return static_cast<Index>(std::max(T, scaled));
}

WorstCaseFunction::WorstCaseFunction(std::size_t n, const WorstCaseParams& p)
    : n_(n), T_(p.T), d_(p.dim()), C_(p.C()), mu_(p.mu()), R_(p.R) {}

Index WorstCaseFunction::argmax_index(const Vector& x) const {
  Index k = 0;
  for (Index j = 1; j < static_cast<Index>(T_); ++j)
    if (x[j] > x[k]) k = j;
  return k;
}

double WorstCaseFunction::value(std::size_t, const Vector& x) const {
  const double top = x.head(static_cast<Index>(T_)).maxCoeff();
  const double norm = x.norm();
  if (norm <= R_ / 2.0) return C_ * top + 0.5 * mu_ * norm * norm;
  // Continued with the boundary slope mu R / 2 so the function stays convex.
  return C_ * top + mu_ * R_ / 2.0 * norm - mu_ * R_ * R_ / 8.0;
}

Vector WorstCaseFunction::subgradient(std::size_t, const Vector& x) const {
  const double norm = x.norm();
  Vector out = norm <= R_ / 2.0 ? Vector(mu_ * x) : Vector(mu_ * R_ / 2.0 / norm * x);
  out[argmax_index(x)] += C_;
  return out;
}

ProblemInstance make_worst_case(const WorstCaseParams& p, std::size_t n,
                                bool allow_outside_regime) {
  if (p.T < 1 || !(p.delta > 0.0 && p.delta <= 1.0) || !(p.R > 0.0) || !(p.M > 0.0))
    throw std::invalid_argument("worst-case instance needs T >= 1, delta in (0,1], R, M > 0");
  const bool in_regime =
      p.delta <= 0.3 && static_cast<double>(p.T) >= 1.0 / (p.delta * p.delta);
  if (!in_regime && !allow_outside_regime)
    throw GenerationError("worst-case instance needs delta <= 0.3 and T >= 1/delta^2");
  auto h = std::make_shared<WorstCaseFunction>(n, p);
  const double C = p.C();
  const double mu = p.mu();
  const double t = static_cast<double>(p.T);
  ProblemMetadata meta;
  meta.name = "worst_case";
  meta.x0 = Vector::Zero(p.dim());
  Vector xs = Vector::Zero(p.dim());
  xs.head(static_cast<Index>(p.T)).setConstant(-C / (mu * t));
  meta.x_star = xs;
  meta.f_star = -C * C / (2.0 * mu * t);
  meta.R = p.R;
  // The largest subgradient norm of h over all of R^d, attained inside the
  // ball of radius R/2. It exceeds the class constant p.M.
  meta.M = C + mu * p.R / 2.0;
  auto g = std::make_shared<ShiftedFunctions>(h, *meta.f_star);
  return ProblemInstance(std::move(h), std::move(g), std::move(meta));
}

// --- Neyman-Pearson classification -----------------------------------------

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LabeledData load_labeled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
          throw std::invalid_argument("trailing characters");
      } catch (const std::logic_error&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" +
                                 cell + "'");
      }
    }
    if (row.size() < 2)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": need at least one feature and a label");
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": ragged row");
    const double label = row.back();
    if (label != 0.0 && label != 1.0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": label must be 0 or 1");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset '" + path + "' is empty");
  const auto m = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(rows.front().size() - 1);
  LabeledData data{Matrix(m, p), Vector(m)};
  for (Index r = 0; r < m; ++r) {
    for (Index c = 0; c < p; ++c) data.features(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    data.labels[r] = rows[static_cast<std::size_t>(r)].back();
  }
  return data;
}

void save_labeled_csv(const std::string& path, const LabeledData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset '" + path + "'");
  out << std::setprecision(17);
  for (Index r = 0; r < data.features.rows(); ++r) {
    for (Index c = 0; c < data.features.cols(); ++c) out << data.features(r, c) << ',';
    out << static_cast<int>(data.labels[r]) << '\n';
  }
}

LabeledData gen_two_class_blobs(std::size_t samples, Index features,
                                double separation, std::uint64_t seed) {
  if (samples < 2 || features < 1) throw std::invalid_argument("blobs need >= 2 samples, >= 1 feature");
  RandomStream rng(derive_seed(seed, stream_tag::kProblemData, 0x6e70));
  const auto m = static_cast<Index>(samples);
  LabeledData data{rng.normal_matrix(m, features), Vector(m)};
  for (Index r = 0; r < m; ++r) {
    const int label = static_cast<int>(r % 2);
    data.labels[r] = label;
    data.features(r, 0) += label == 1 ? separation / 2.0 : -separation / 2.0;
  }
  return data;
}

LogisticLoss::LogisticLoss(std::vector<Matrix> shards, int label)
    : shards_(std::move(shards)), sign_(label == 0 ? 1.0 : -1.0) {
  if (shards_.empty()) throw std::invalid_argument("LogisticLoss needs at least one shard");
  for (const Matrix& s : shards_) {
    if (s.rows() == 0) throw GenerationError("empty class shard");
    if (s.cols() != shards_.front().cols()) throw std::invalid_argument("shard widths differ");
  }
}

double LogisticLoss::value(std::size_t i, const Vector& x) const {
  const Matrix& S = shards_[i];
  const Index p = S.cols();
  Vector z = (S * x.head(p)).array() + x[p];
  double sum = 0.0;
  for (Index r = 0; r < z.size(); ++r) sum += softplus(sign_ * z[r]);
  return sum / static_cast<double>(S.rows());
}

double LogisticLoss::evaluate(std::size_t i, const Vector& x, Vector& subgrad) const {
  const Matrix& S = shards_[i];
  const Index p = S.cols();
  Vector z = (S * x.head(p)).array() + x[p];
  double sum = 0.0;
  Vector coef(z.size());
  for (Index r = 0; r < z.size(); ++r) {
    sum += softplus(sign_ * z[r]);
    coef[r] = sign_ * sigmoid(sign_ * z[r]);
  }
  const double m = static_cast<double>(S.rows());
  subgrad.resize(p + 1);
  subgrad.head(p) = S.transpose() * coef / m;
  subgrad[p] = coef.sum() / m;
  return sum / m;
}

Vector LogisticLoss::subgradient(std::size_t i, const Vector& x) const {
  Vector out;
  evaluate(i, x, out);
  return out;
}

Vector LogisticLoss::batch_subgradient(std::size_t i, const Vector& x,
                                       std::span<const std::size_t> terms) const {
  const Matrix& S = shards_[i];
  const Index p = S.cols();
  Vector out = Vector::Zero(p + 1);
  if (terms.empty()) return out;
  for (std::size_t r : terms) {
    const auto row = S.row(static_cast<Index>(r));
    const double z = row.dot(x.head(p)) + x[p];
    const double coef = sign_ * sigmoid(sign_ * z);
    out.head(p) += coef * row.transpose();
    out[p] += coef;
  }
  return out / static_cast<double>(terms.size());
}

double LogisticLoss::gradient_bound() const {
  double best = 0.0;
  for (const Matrix& S : shards_)
    best = std::max(best, std::sqrt(S.rowwise().squaredNorm().maxCoeff() + 1.0));
  return best;
}

ProblemInstance make_neyman_pearson(const Matrix& features, const Vector& labels,
                                    double c, std::size_t n) {
  const Index m = features.rows();
  if (labels.size() != m) throw std::invalid_argument("labels and features disagree");
  if (n < 1 || static_cast<Index>(n) > m)
    throw GenerationError("cannot shard " + std::to_string(m) + " samples over " +
                          std::to_string(n) + " workers");
  std::vector<Matrix> class0;
  std::vector<Matrix> class1;
  for (std::size_t i = 0; i < n; ++i) {
    const Index lo = static_cast<Index>(i) * m / static_cast<Index>(n);
    const Index hi = static_cast<Index>(i + 1) * m / static_cast<Index>(n);
    std::vector<Index> rows0;
    std::vector<Index> rows1;
    for (Index r = lo; r < hi; ++r) {
      if (labels[r] == 0.0)
        rows0.push_back(r);
      else if (labels[r] == 1.0)
        rows1.push_back(r);
      else
        throw GenerationError("label at row " + std::to_string(r) + " is not 0 or 1");
    }
    if (rows0.empty() || rows1.empty())
      throw GenerationError("worker " + std::to_string(i) +
                            " has no samples of class " + (rows0.empty() ? "0" : "1") +
                            "; reshard the data");
    class0.emplace_back(features(rows0, Eigen::indexing::all));
    class1.emplace_back(features(rows1, Eigen::indexing::all));
  }
  auto f = std::make_shared<LogisticLoss>(std::move(class0), 0);
  auto g1 = std::make_shared<LogisticLoss>(std::move(class1), 1);
  ProblemMetadata meta;
  meta.name = "neyman_pearson";
  meta.x0 = Vector::Zero(features.cols() + 1);
  meta.M = std::max(f->gradient_bound(), g1->gradient_bound());
  meta.R = 0.0;
  auto g = std::make_shared<ShiftedFunctions>(std::move(g1), c);
  return ProblemInstance(std::move(f), std::move(g), std::move(meta));
}

// --- Smooth quadratic ------------------------------------------------------

namespace {

class DiagonalQuadratic final : public WorkerFunctions {
 public:
  DiagonalQuadratic(std::vector<Vector> curvature, Vector center)
      : curvature_(std::move(curvature)), center_(std::move(center)) {}
  std::size_t workers() const override { return curvature_.size(); }
  Index dim() const override { return center_.size(); }
  double value(std::size_t i, const Vector& x) const override {
    Vector diff = x - center_;
    return 0.5 * diff.dot(curvature_[i].cwiseProduct(diff));
  }
  Vector subgradient(std::size_t i, const Vector& x) const override {
    return curvature_[i].cwiseProduct(x - center_);
  }

 private:
  std::vector<Vector> curvature_;
  Vector center_;
};

}  // namespace

ProblemInstance make_smooth_quadratic(const SmoothQuadraticParams& p) {
  if (p.n < 1 || p.d < 1 || !(p.L > 0.0) || p.decades < 0.0 || p.spread < 0.0 || p.spread >= 1.0)
    throw std::invalid_argument("smooth quadratic parameters out of range");
  RandomStream rng(derive_seed(p.seed, stream_tag::kProblemData, 0x7371));
  Vector base(p.d);
  for (Index j = 0; j < p.d; ++j) {
    const double frac = p.d == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(p.d - 1);
    base[j] = p.L * std::pow(10.0, -p.decades * frac);
  }
  Matrix scale(static_cast<Index>(p.n), p.d);
  for (Index i = 0; i < scale.rows(); ++i)
    for (Index j = 0; j < p.d; ++j) scale(i, j) = 1.0 - p.spread + 2.0 * p.spread * rng.uniform();
  // Average curvature per coordinate is exactly base[j].
  for (Index j = 0; j < p.d; ++j) scale.col(j) /= scale.col(j).mean();
  std::vector<Vector> curvature;
  double sum_sq = 0.0;
  for (Index i = 0; i < scale.rows(); ++i) {
    Vector lam = base.cwiseProduct(scale.row(i).transpose());
    const double Li = lam.maxCoeff();
    sum_sq += Li * Li;
    curvature.push_back(std::move(lam));
  }
  Vector center = Vector::Constant(p.d, 1.0 / std::sqrt(static_cast<double>(p.d)));
  ProblemMetadata meta;
  meta.name = "smooth_quadratic";
  meta.x0 = Vector::Zero(p.d);
  meta.x_star = center;
  meta.f_star = 0.0;
  meta.R = 1.0;
  meta.smoothness = std::sqrt(sum_sq / static_cast<double>(p.n));
  // Gradient norm bound on the ball of radius 2 around the origin, which is
  // where the shipped projections keep the iterates.
  double lmax = 0.0;
  for (const Vector& lam : curvature) lmax = std::max(lmax, lam.maxCoeff());
  meta.M = lmax * 3.0;
  return ProblemInstance(std::make_shared<DiagonalQuadratic>(std::move(curvature), center),
                         nullptr, std::move(meta));
}

// --- Randomized audit ------------------------------------------------------

AuditReport audit_instance(const ProblemInstance& problem, std::size_t pairs,
                           double scale, RandomStream& rng) {
  AuditReport rep;
  const Vector& x0 = problem.meta().x0;
  auto check = [&](const WorkerFunctions& fn, std::size_t i, const Vector& x, const Vector& y) {
    Vector sx;
    const double fx = fn.evaluate(i, x, sx);
    const double fy = fn.value(i, y);
    rep.max_subgrad_norm = std::max(rep.max_subgrad_norm, sx.norm());
    const double viol = (fx + sx.dot(y - x) - fy) / std::max(1.0, std::abs(fy));
    rep.max_convexity_violation = std::max(rep.max_convexity_violation, viol);
  };
  for (std::size_t s = 0; s < pairs; ++s) {
    const Vector x = x0 + scale * rng.uniform() * rng.normal_vector(x0.size()).normalized();
    const Vector y = x0 + scale * rng.uniform() * rng.normal_vector(x0.size()).normalized();
    const std::size_t i = rng.index_below(problem.workers());
    check(problem.objective(), i, x, y);
    if (const WorkerFunctions* g = problem.constraint()) check(*g, i, x, y);
    ++rep.pairs;
  }
  return rep;
}

}  // namespace cefopt
