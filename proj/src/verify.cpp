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
#include "cefopt/verify.hpp"

#include "cefopt/algorithms.hpp"
#include "cefopt/oracles.hpp"
#include "cefopt/reference.hpp"
#include "cefopt/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cefopt {

namespace {

constexpr std::size_t kToyT = 1000;

struct Check {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

CompressorSpec top_k(std::size_t k, const VerifyOptions& o) {
  CompressorSpec s = CompressorSpec::top_k(k);
  s.tie_break = o.tie_break;
  return s;
}

Check toy_check(const std::string& which, const VerifyOptions& o) {
  const CounterexampleReport r = counterexample(which, o.tie_break);
  if (which == "safe_ef")
    return {r.passed, fmt("final gap %.4g vs envelope %.4g, running min %.4g", r.max_deviation,
                          r.tolerance, r.running_min)};
  return {r.passed, fmt("max deviation %.3g over %zu rounds (tol %.0e)", r.max_deviation,
                        r.rows.size(), r.tolerance)};
}

// Top-K: the defect never exceeds 1 - k/d. Every tenth vector has equal
// magnitudes, where the bound is tight, so any overstated accuracy is caught.
// Rand-K: averaging the defect over all k-subsets gives exactly 1 - k/d.
Check contraction_check(const VerifyOptions& o) {
  RandomStream rng(derive_seed(2026, stream_tag::kProblemData, 4));
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t d : {2, 10, 100}) {
    for (std::size_t k : {std::size_t{1}, std::max<std::size_t>(1, d / 10), d}) {
      const CompressorSpec spec = top_k(k, o);
      const double claimed = std::min(1.0, o.delta_misreport * spec.nominal_delta(d));
      for (int s = 0; s < 1000; ++s) {
        Vector x = rng.normal_vector(static_cast<Index>(d));
        if (s % 10 == 0) x = x.cwiseSign() * 0.5;
        const double defect = contraction_defect(x, compress(spec, x, rng));
        worst = std::max(worst, defect - (1.0 - claimed));
        ++cases;
      }
    }
  }
  double rand_err = 0.0;
  std::size_t subsets = 0;
  for (std::size_t d = 1; d <= 6; ++d) {
    for (std::size_t k = 1; k <= d; ++k) {
      const Vector x = rng.normal_vector(static_cast<Index>(d));
      const double claimed =
          std::min(1.0, o.delta_misreport * CompressorSpec::rand_k(k).nominal_delta(d));
      double total = 0.0;
      std::size_t count = 0;
      for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        double miss = 0.0;
        for (std::size_t j = 0; j < d; ++j)
          if (!(mask >> j & 1u)) miss += x[static_cast<Index>(j)] * x[static_cast<Index>(j)];
        total += miss;
        ++count;
      }
      subsets += count;
      rand_err = std::max(rand_err,
                          std::abs(total / static_cast<double>(count) -
                                   (1.0 - claimed) * x.squaredNorm()));
      // The sampler must only ever emit one of the enumerated masks.
      for (int s = 0; s < 50; ++s) {
        const CompressedUpdate out = compress(CompressorSpec::rand_k(k), x, rng);
        bool ok = out.support.size() == k;
        for (Index j = 0; j < x.size(); ++j) {
          const bool kept = std::binary_search(out.support.begin(), out.support.end(), j);
          ok = ok && out.payload[j] == (kept ? x[j] : 0.0);
        }
        if (!ok) return {false, fmt("Rand-K emitted a malformed mask (d=%zu, k=%zu)", d, k)};
      }
    }
  }
  const bool pass = worst <= 1e-12 && rand_err <= 1e-12;
  return {pass, fmt("Top-K max excess %.3g over %zu vectors; Rand-K enumeration error %.3g over "
                    "%zu subsets",
                    worst, cases, rand_err, subsets)};
}

ProblemInstance synthetic(std::size_t n, Index d, std::uint64_t seed, bool reference) {
  SyntheticGenParams p;
  p.n = n;
  p.d = d;
  p.s = 1.0;
  p.zeta = 1e-3;
  p.seed = seed;
  p.solve_reference = reference;
  return gen_synthetic_l1(p);
}

AlgorithmConfig safe_ef_theory(const ProblemInstance& problem, std::size_t T,
                               const CompressorSpec& uplink) {
  AlgorithmConfig cfg;
  cfg.kind = AlgorithmKind::SafeEF;
  cfg.T = T;
  cfg.uplink = uplink;
  const double delta = uplink.nominal_delta(static_cast<std::size_t>(problem.dim()));
  cfg.gamma = theoretical_params(problem.meta().R, problem.meta().M, delta, 1.0, T).gamma;
  return cfg;
}

// Criteria 5 and 6 share one pair of runs: uplink Top-10 with and without
// a compressed downlink on the synthetic problem.
std::vector<RunRecord> buffer_runs(const VerifyOptions& o) {
  const ProblemInstance problem = synthetic(10, 100, 0, false);
  std::vector<RunRecord> out;
  for (std::size_t down : {std::size_t{100}, std::size_t{50}}) {
    AlgorithmConfig cfg = safe_ef_theory(problem, 1000, top_k(10, o));
    if (down < 100) cfg.downlink = top_k(down, o);
    RunOptions opts;
    opts.stride = 100;
    out.push_back(run_safe_ef(problem, cfg, opts));
  }
  return out;
}

Check error_buffer_check(const VerifyOptions& o) {
  const ProblemInstance problem = synthetic(10, 100, 0, false);
  const double claimed = std::min(1.0, o.delta_misreport * 0.1);
  const double bound = bounds(1.0, problem.meta().M, claimed, 1.0, 1000).error_buffer_bound;
  double worst = 0.0;
  for (const RunRecord& r : buffer_runs(o)) worst = std::max(worst, r.diag.max_error_norm_sq());
  return {worst <= bound + 1e-9,
          fmt("max ||e_bar||^2 = %.4g vs bound %.4g", worst, bound)};
}

Check virtual_iterate_check(const VerifyOptions& o) {
  double worst = 0.0;
  for (const RunRecord& r : buffer_runs(o)) worst = std::max(worst, r.diag.max_virtual_residual());
  return {worst <= 1e-9, fmt("max residual %.3g", worst)};
}

// Median final gap over data seeds 0..4 on the n = 10, d = 200 problem.
struct SlopeProblems {
  std::vector<ProblemInstance> problems;
  explicit SlopeProblems() {
    for (std::uint64_t s = 0; s < 5; ++s) problems.push_back(synthetic(10, 200, s, true));
  }
  double median_gap(std::size_t T, std::size_t k, const VerifyOptions& o) const {
    std::vector<double> gaps;
    for (const ProblemInstance& p : problems) {
      RunOptions opts;
      opts.stride = 1000;
      gaps.push_back(run_safe_ef(p, safe_ef_theory(p, T, top_k(k, o)), opts).final_gap);
    }
    return median(gaps);
  }
};

Check rate_check(const VerifyOptions& o) {
  const SlopeProblems sp;
  const std::vector<double> Ts{1000, 4000, 16000};
  std::vector<double> gaps;
  for (double T : Ts) gaps.push_back(sp.median_gap(static_cast<std::size_t>(T), 20, o));
  const double slope = rate_slope(Ts, gaps);
  return {slope >= -0.65 && slope <= -0.35,
          fmt("median gaps %.4g, %.4g, %.4g; slope %.4f (want [-0.65, -0.35])", gaps[0], gaps[1],
              gaps[2], slope)};
}

Check degradation_check(const VerifyOptions& o) {
  const SlopeProblems sp;
  const double large = sp.median_gap(4000, 20, o);
  const double small = sp.median_gap(4000, 5, o);
  const double ratio = small / large;
  return {ratio >= 1.2 && ratio <= 4.0,
          fmt("median gap k=5 %.4g, k=20 %.4g, ratio %.3f (want [1.2, 4.0])", small, large, ratio)};
}

// Worst-case instance: every iterate that has not discovered all T leading
// coordinates sits at least lower_gap above the optimum, and the discovered
// prefix grows by at most one coordinate, only when the shared mask covers it.
Check lower_bound_check(const VerifyOptions&) {
  WorstCaseParams wp;
  wp.T = 256;
  wp.delta = 0.25;
  const ProblemInstance problem = make_worst_case(wp, 4);
  const double lower = bounds(wp.R, wp.M, wp.delta, 1.0, wp.T).lower_gap;
  const double f_star = *problem.meta().f_star;
  const auto k = static_cast<std::size_t>(std::lround(wp.delta * static_cast<double>(wp.dim())));
  std::size_t violations = 0;
  std::size_t jumps = 0;
  std::size_t runs = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t max_prog = 0;
  for (AlgorithmKind kind : {AlgorithmKind::SafeEF, AlgorithmKind::CGD}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      AlgorithmConfig cfg;
      cfg.kind = kind;
      cfg.T = wp.T;
      cfg.seed = seed;
      cfg.uplink = CompressorSpec::rand_k(k, true);
      const StepThreshold st =
          theoretical_params(problem.meta().R, problem.meta().M, wp.delta, 1.0, wp.T);
      cfg.gamma = st.gamma;
      cfg.c = st.c;
      std::size_t frontier = 0;
      RunOptions opts;
      opts.keep_iterates = true;
      opts.stride = wp.T;
      opts.observer = [&](const RoundObservation& obs) {
        const std::size_t p = prog(*obs.x_after);
        if (p <= frontier) return;
        const auto& mask = (*obs.uplink_supports)[0];
        const bool hit = std::binary_search(mask.begin(), mask.end(),
                                            static_cast<Index>(frontier));
        if (p > frontier + 1 || !hit) ++violations;
        frontier = p;
      };
      const RunRecord rec = run_algorithm(problem, cfg, opts);
      ++runs;
      std::vector<Vector> outputs = rec.diag.iterates;
      outputs.push_back(rec.x_bar);
      for (const Vector& x : outputs) {
        if (prog(x) >= wp.T) continue;
        const double gap = problem.f(x) - f_star;
        min_gap = std::min(min_gap, gap);
        if (gap < lower) ++violations;
      }
      jumps += frontier;
      max_prog = std::max(max_prog, frontier);
    }
  }
  return {violations == 0,
          fmt("%zu runs, min gap %.6g vs lower_gap %.6g, max prog %zu of %zu, %zu frontier steps, "
              "%zu violations",
              runs, min_gap, lower, max_prog, wp.T, jumps, violations)};
}

Check stochastic_check(const VerifyOptions& o) {
  constexpr std::size_t kSeeds = 20;
  constexpr std::size_t T = 2000;
  constexpr double beta = 0.05;
  constexpr double sigma = 0.5;
  std::size_t ok = 0;
  double worst_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < kSeeds; ++s) {
    SyntheticGenParams p;
    p.n = 10;
    p.d = 50;
    p.seed = 100 + s;
    p.solve_reference = true;
    const SyntheticL1Data data = generate_l1_data(p);
    const HalfspaceConstraint hs = planted_halfspace(data.x_planted, p.n, 0.5, 0.5, p.seed);
    const ProblemInstance problem = gen_synthetic_l1(p).with_constraint(hs.functions, hs.M);
    const double M = problem.meta().M;
    const double delta = 5.0 / 50.0;
    StepThreshold st = theoretical_params_stochastic(problem.meta().R, M, delta, beta, T);
    const std::size_t N = min_batch_size(sigma, p.n, st.c, beta, T);
    const double R = std::sqrt(problem.meta().R * problem.meta().R +
                               sigma * sigma / static_cast<double>(N) / (6.0 * M * M));
    st = theoretical_params_stochastic(R, M, delta, beta, T);
    AlgorithmConfig cfg;
    cfg.kind = AlgorithmKind::SafeEF;
    cfg.T = T;
    cfg.gamma = st.gamma;
    cfg.c = st.c;
    cfg.seed = s;
    cfg.uplink = top_k(5, o);
    StochasticConfig sc;
    sc.sigma_fv = sigma;
    sc.N_fv = N;
    sc.subgrad_batch = 10;
    sc.seed = s;
    cfg.stochastic = sc;
    RunOptions opts;
    opts.stride = T;
    const RunRecord rec = run_safe_ef(problem, cfg, opts);
    if (rec.final_g <= 2.0 * st.c) ++ok;
    worst_ratio = std::max(worst_ratio, rec.final_g / st.c);
  }
  return {ok >= 18, fmt("%zu/%zu seeds with g(x_bar) <= 2c; max g/c %.3g", ok, kSeeds,
                        worst_ratio)};
}

Check smooth_check(const VerifyOptions& o) {
  const ProblemInstance problem = make_smooth_quadratic({});
  const double L = *problem.meta().smoothness;
  const std::size_t d = static_cast<std::size_t>(problem.dim());
  const std::vector<double> Ts{1000, 4000, 16000};
  std::string detail;
  bool pass = true;
  for (const CompressorSpec& spec : {CompressorSpec::identity(), top_k(d / 10, o)}) {
    std::vector<double> gaps;
    for (double T : Ts) {
      AlgorithmConfig cfg;
      cfg.kind = AlgorithmKind::ProjectedEF21;
      cfg.T = static_cast<std::size_t>(T);
      cfg.uplink = spec;
      cfg.gamma = projected_ef21_step(spec.nominal_delta(d), L);
      RunOptions opts;
      opts.stride = 1000;
      gaps.push_back(run_projected_ef21(problem, ball_projection(2.0), cfg, opts).last_gap);
    }
    const double slope = rate_slope(Ts, gaps);
    pass = pass && slope >= -1.3 && slope <= -0.7;
    detail += fmt("%s slope %.4f; ", spec.to_string().c_str(), slope);
  }
  return {pass, detail + "want [-1.3, -0.7]"};
}

Check ef14_check(const VerifyOptions& o) {
  const ProblemInstance problem = synthetic(10, 100, 0, false);
  const AlgorithmConfig cfg = safe_ef_theory(problem, 1000, top_k(10, o));
  RunOptions opts;
  opts.keep_iterates = true;
  opts.stride = 1000;
  const RunRecord rec = run_safe_ef(problem, cfg, opts);
  const std::vector<Vector> ref = ef14_reference(problem, cfg.gamma, cfg.T, 10);
  double worst = 0.0;
  for (std::size_t t = 0; t < ref.size(); ++t)
    worst = std::max(worst, (rec.diag.iterates.at(t) - ref[t]).cwiseAbs().maxCoeff());
  return {worst <= 1e-12, fmt("max |x_safe - x_ef14| = %.3g over %zu rounds", worst, cfg.T)};
}

Check primal_dual_check(const VerifyOptions& o) {
  const ProblemInstance problem = synthetic(10, 100, 0, false);
  AlgorithmConfig cfg = safe_ef_theory(problem, 1000, top_k(10, o));
  RunOptions opts;
  opts.keep_iterates = true;
  opts.stride = 1000;
  const RunRecord safe = run_safe_ef(problem, cfg, opts);
  cfg.kind = AlgorithmKind::PrimalDualEF;
  cfg.eta = 1.0;
  cfg.lambda0 = 0.0;
  const RunRecord pd = run_primal_dual_ef(problem, cfg, opts);
  bool identical = safe.diag.iterates.size() == pd.diag.iterates.size();
  for (std::size_t t = 0; identical && t < pd.diag.iterates.size(); ++t)
    identical = safe.diag.iterates[t] == pd.diag.iterates[t];

  // Neyman-Pearson toy: blobs, class-1 loss capped at 0.3, four workers.
  const LabeledData data = gen_two_class_blobs(400, 5, 2.0, 3);
  const double cap = 0.3;
  const ProblemInstance np = make_neyman_pearson(data.features, data.labels, cap, 4);
  std::size_t met = 0;
  double best = std::numeric_limits<double>::infinity();
  const std::vector<std::pair<double, double>> presets{{0.1, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
  for (const auto& [eta, lambda0] : presets) {
    AlgorithmConfig c;
    c.kind = AlgorithmKind::PrimalDualEF;
    c.T = 3000;
    c.gamma = 0.1;
    c.eta = eta;
    c.lambda0 = lambda0;
    c.uplink = top_k(2, o);
    RunOptions ro;
    ro.stride = c.T;
    const RunRecord r = run_primal_dual_ef(np, c, ro);
    // g is the class-1 loss minus the cap, so loss <= cap + 0.05 reads g <= 0.05.
    if (r.last_g <= 0.05) ++met;
    best = std::min(best, r.last_g + cap);
  }
  return {identical && met >= 1,
          fmt("lambda0 = 0 trajectory %s; NP presets meeting cap+0.05: %zu/%zu (best loss %.4f, "
              "cap %.2f)",
              identical ? "identical" : "differs", met, presets.size(), best, cap)};
}

struct CriterionDef {
  const char* name;
  double budget;
  Check (*run)(const VerifyOptions&);
};

const CriterionDef kCriteria[] = {
    {"CGD stalls on the l1 toy", 0.1, [](const VerifyOptions& o) { return toy_check("cgd", o); }},
    {"EF21 diverges on the l1 toy", 0.1, [](const VerifyOptions& o) { return toy_check("ef21", o); }},
    {"Safe-EF converges on the l1 toy", 0.1,
     [](const VerifyOptions& o) { return toy_check("safe_ef", o); }},
    {"compressor contraction", 1.0, contraction_check},
    {"error-buffer bound", 5.0, error_buffer_check},
    {"virtual-iterate identity", 5.0, virtual_iterate_check},
    {"rate slope", 120.0, rate_check},
    {"accuracy degradation", 120.0, degradation_check},
    {"lower-bound instance", 60.0, lower_bound_check},
    {"stochastic feasibility", 300.0, stochastic_check},
    {"projected EF21 smooth rate", 120.0, smooth_check},
    {"EF14 reduction", 5.0, ef14_check},
    {"primal-dual sanity", 5.0, primal_dual_check},
};

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& options) {
  if (id < 1 || id > 13) throw std::invalid_argument("criterion ids run from 1 to 13");
  const CriterionDef& def = kCriteria[id - 1];
  CriterionResult result;
  result.id = id;
  result.name = def.name;
  result.budget_seconds = def.budget;
  const auto start = std::chrono::steady_clock::now();
  Check check;
  try {
    check = def.run(options);
  } catch (const std::exception& e) {
    check = {false, std::string("threw: ") + e.what()};
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.passed = check.passed && result.seconds <= def.budget;
  result.detail = check.detail;
  if (check.passed && !result.passed)
    result.detail += fmt(" [over budget: %.3f s > %.3g s]", result.seconds, def.budget);
  return result;
}

std::vector<CriterionResult> run_acceptance(
    const VerifyOptions& options, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 13; ++id) {
    if (!options.only.empty() && !options.only.count(id)) continue;
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt("[%s] %2d %-32s %8.3fs  %s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
             r.seconds, r.detail.c_str());
}

CounterexampleReport counterexample(const std::string& which, TieBreak tie_break) {
  CounterexampleReport report;
  report.which = which;
  report.T = kToyT;
  report.gamma = 1.0 / std::sqrt(static_cast<double>(kToyT));
  const ProblemInstance problem = make_l1_toy(report.gamma);
  AlgorithmConfig cfg;
  cfg.T = kToyT;
  cfg.gamma = report.gamma;
  cfg.uplink = CompressorSpec::top_k(1);
  cfg.uplink.tie_break = tie_break;
  if (which == "cgd") {
    cfg.kind = AlgorithmKind::CGD;
    report.tolerance = 1e-12;
  } else if (which == "ef21") {
    cfg.kind = AlgorithmKind::EF21;
    cfg.ef21_v0 = problem.meta().ef21_v0;
    report.tolerance = 1e-9;
  } else if (which == "safe_ef") {
    cfg.kind = AlgorithmKind::SafeEF;
  } else {
    throw std::invalid_argument("unknown counterexample '" + which +
                                "' (expected cgd, ef21, or safe_ef)");
  }
  const RunRecord rec = run_algorithm(problem, cfg);

  if (cfg.kind == AlgorithmKind::SafeEF) {
    const double M = problem.meta().M;
    const double R = problem.meta().R;
    report.tolerance = 10.0 * M * R / std::sqrt(static_cast<double>(kToyT));
    report.max_deviation = rec.final_gap;
    report.running_min = std::min(rec.min_gap(), rec.last_gap);
    report.passed = !rec.flags.any() && rec.final_gap <= report.tolerance &&
                    report.running_min < 0.5;
    return report;
  }
  auto expected = [&](std::size_t t) {
    return cfg.kind == AlgorithmKind::CGD ? toy_cgd_gap(report.gamma)
                                          : toy_ef21_gap(report.gamma, t);
  };
  for (std::size_t r = 0; r < rec.iter.size(); ++r)
    report.rows.push_back({rec.iter[r], rec.f_gap[r], expected(rec.iter[r])});
  if (!rec.flags.diverged) report.rows.push_back({kToyT, rec.last_gap, expected(kToyT)});
  for (const CounterexampleRow& row : report.rows)
    report.max_deviation = std::max(report.max_deviation, std::abs(row.measured - row.expected));
  report.passed = !rec.flags.diverged && report.rows.size() == kToyT + 1 &&
                  report.max_deviation <= report.tolerance;
  return report;
}

}  // namespace cefopt
