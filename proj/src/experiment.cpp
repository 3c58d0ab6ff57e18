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
#include "cefopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

namespace cefopt {

namespace {

const std::vector<std::string> kProblemKinds = {"l1_toy", "synthetic_l1", "worst_case",
                                                "neyman_pearson", "smooth_quadratic"};

void require_one_of(const FieldMap& f, const std::string& name,
                    const std::vector<std::string>& allowed) {
  const std::string v = get_string(f, name);
  if (std::find(allowed.begin(), allowed.end(), v) != allowed.end()) return;
  std::string list;
  for (const std::string& a : allowed) list += (list.empty() ? "" : ", ") + a;
  field_error(f, name, "unknown value '" + v + "' (expected one of " + list + ")");
}

void require_positive_int(const FieldMap& f, const std::string& name) {
  if (get_int(f, name) < 1) field_error(f, name, "must be >= 1");
}

void require_nonnegative(const FieldMap& f, const std::string& name) {
  if (!(get_real(f, name) >= 0.0)) field_error(f, name, "must be >= 0");
}

CompressorSpec compressor_field(const FieldMap& f, const std::string& name) {
  CompressorSpec spec;
  try {
    spec = CompressorSpec::parse(get_string(f, name));
  } catch (const InvalidSpec& e) {
    field_error(f, name, e.what());
  }
  spec.tie_break = get_string(f, "algorithm.tie_break") == "highest" ? TieBreak::HighestIndex
                                                                     : TieBreak::LowestIndex;
  return spec;
}

std::size_t as_size(std::int64_t v) { return static_cast<std::size_t>(v); }

std::uint64_t data_seed(const FieldMap& f, std::uint64_t run_seed) {
  if (is_symbolic(f, "problem.seed")) return run_seed;
  const std::int64_t v = get_int(f, "problem.seed");
  if (v < 0) field_error(f, "problem.seed", "must be >= 0");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

void validate_point(const FieldMap& f) {
  require_one_of(f, "problem.kind", kProblemKinds);
  require_one_of(f, "problem.constraint", {"none", "halfspace", "ball"});
  require_one_of(f, "algorithm.projection", {"none", "ball", "box"});
  require_one_of(f, "algorithm.tie_break", {"lowest", "highest"});
  try {
    parse_algorithm_kind(get_string(f, "algorithm.kind"));
  } catch (const std::invalid_argument& e) {
    field_error(f, "algorithm.kind", e.what());
  }
  require_positive_int(f, "problem.n");
  require_positive_int(f, "problem.d");
  require_positive_int(f, "algorithm.T");
  require_positive_int(f, "problem.samples");
  require_positive_int(f, "problem.features");
  for (const char* name : {"problem.s", "problem.zeta", "algorithm.eta", "algorithm.lambda0",
                           "stochastic.sigma_fv", "stochastic.subgrad_noise"})
    require_nonnegative(f, name);
  if (get_int(f, "stochastic.subgrad_batch") < 0)
    field_error(f, "stochastic.subgrad_batch", "must be >= 0");
  if (!is_symbolic(f, "stochastic.N_fv") && get_int(f, "stochastic.N_fv") < 1)
    field_error(f, "stochastic.N_fv", "must be >= 1 or auto");
  if (!is_symbolic(f, "algorithm.gamma") && !(get_real(f, "algorithm.gamma") >= 0.0))
    field_error(f, "algorithm.gamma", "must be >= 0");
  if (!is_symbolic(f, "algorithm.c") && !(get_real(f, "algorithm.c") >= 0.0))
    field_error(f, "algorithm.c", "must be >= 0");
  const double beta = get_real(f, "algorithm.beta");
  if (!(beta > 0.0 && beta < 0.5)) field_error(f, "algorithm.beta", "must lie in (0, 1/2)");
  compressor_field(f, "algorithm.uplink");
  compressor_field(f, "algorithm.downlink");
  if (get_string(f, "algorithm.kind") == "primal_dual_ef" && !(get_real(f, "algorithm.eta") > 0.0))
    field_error(f, "algorithm.eta", "primal_dual_ef needs eta > 0");
}

ProblemInstance build_problem(const FieldMap& f, std::uint64_t seed) {
  validate_point(f);
  const std::string kind = get_string(f, "problem.kind");
  const std::size_t n = as_size(get_int(f, "problem.n"));
  const std::uint64_t dseed = data_seed(f, seed);

  if (kind == "l1_toy") {
    double gamma = 0.0;
    const std::string g = get_string(f, "algorithm.gamma");
    if (g == "inv_sqrt_T")
      gamma = 1.0 / std::sqrt(static_cast<double>(get_int(f, "algorithm.T")));
    else if (g == "theory")
      field_error(f, "algorithm.gamma", "l1_toy sets x0 from gamma; give a number or inv_sqrt_T");
    else
      gamma = get_real(f, "algorithm.gamma");
    return make_l1_toy(gamma, n);
  }

  if (kind == "synthetic_l1") {
    SyntheticGenParams p;
    p.n = n;
    p.d = static_cast<Index>(get_int(f, "problem.d"));
    p.s = get_real(f, "problem.s");
    p.zeta = get_real(f, "problem.zeta");
    p.seed = dseed;
    p.solve_reference = get_bool(f, "problem.solve_reference");
    ProblemInstance base = gen_synthetic_l1(p);
    const std::string constraint = get_string(f, "problem.constraint");
    if (constraint == "halfspace") {
      const SyntheticL1Data data = generate_l1_data(p);
      HalfspaceConstraint hs =
          planted_halfspace(data.x_planted, n, get_real(f, "problem.constraint_margin"),
                            get_real(f, "problem.constraint_heterogeneity"), dseed);
      return base.with_constraint(hs.functions, hs.M);
    }
    if (constraint == "ball") {
      const double radius = get_real(f, "problem.constraint_radius");
      if (!(radius > 0.0)) field_error(f, "problem.constraint_radius", "must be > 0");
      return base.with_constraint(
          std::make_shared<BallConstraint>(n, Vector::Zero(p.d), radius), 1.0);
    }
    return base;
  }

  if (kind == "worst_case") {
    WorstCaseParams p;
    p.T = is_symbolic(f, "problem.horizon") ? as_size(get_int(f, "algorithm.T"))
                                            : as_size(get_int(f, "problem.horizon"));
    p.delta = get_real(f, "problem.delta");
    p.R = get_real(f, "problem.R");
    p.M = get_real(f, "problem.M");
    try {
      return make_worst_case(p, n, get_bool(f, "problem.allow_outside_regime"));
    } catch (const GenerationError& e) {
      field_error(f, "problem.delta", e.what());
    }
  }

  if (kind == "neyman_pearson") {
    LabeledData data;
    const std::string path = get_string(f, "problem.dataset");
    if (!path.empty()) {
      try {
        data = load_labeled_csv(path);
      } catch (const std::runtime_error& e) {
        field_error(f, "problem.dataset", e.what());
      }
    } else {
      data = gen_two_class_blobs(as_size(get_int(f, "problem.samples")),
                                 static_cast<Index>(get_int(f, "problem.features")),
                                 get_real(f, "problem.separation"), dseed);
    }
    return make_neyman_pearson(data.features, data.labels, get_real(f, "problem.np_c"), n);
  }

  SmoothQuadraticParams p;
  p.n = n;
  p.d = static_cast<Index>(get_int(f, "problem.d"));
  p.L = get_real(f, "problem.L");
  p.decades = get_real(f, "problem.decades");
  p.spread = get_real(f, "problem.spread");
  p.seed = dseed;
  return make_smooth_quadratic(p);
}

AlgorithmConfig build_algorithm(const FieldMap& f, const ProblemInstance& problem,
                                std::uint64_t seed) {
  validate_point(f);
  AlgorithmConfig cfg;
  cfg.kind = parse_algorithm_kind(get_string(f, "algorithm.kind"));
  cfg.T = as_size(get_int(f, "algorithm.T"));
  cfg.seed = seed;
  cfg.uplink = compressor_field(f, "algorithm.uplink");
  cfg.downlink = compressor_field(f, "algorithm.downlink");
  cfg.eta = get_real(f, "algorithm.eta");
  cfg.lambda0 = get_real(f, "algorithm.lambda0");
  const auto d = static_cast<std::size_t>(problem.dim());
  try {
    cfg.uplink.resolve_k(d);
  } catch (const InvalidSpec& e) {
    field_error(f, "algorithm.uplink", e.what());
  }
  try {
    cfg.downlink.resolve_k(d);
  } catch (const InvalidSpec& e) {
    field_error(f, "algorithm.downlink", e.what());
  }

  const std::vector<double> v0 = get_real_list(f, "algorithm.ef21_v0");
  if (!v0.empty()) {
    if (v0.size() != d) field_error(f, "algorithm.ef21_v0", "length must equal the dimension");
    cfg.ef21_v0 = Eigen::Map<const Vector>(v0.data(), static_cast<Index>(v0.size()));
  }

  const std::string proj = get_string(f, "algorithm.projection");
  if (proj == "ball") {
    cfg.projection.kind = ProjectionSpec::Kind::Ball;
    cfg.projection.radius = get_real(f, "algorithm.projection_radius");
  } else if (proj == "box") {
    cfg.projection.kind = ProjectionSpec::Kind::Box;
    cfg.projection.lower = get_real(f, "algorithm.projection_lower");
    cfg.projection.upper = get_real(f, "algorithm.projection_upper");
  }

  const bool stochastic = get_bool(f, "stochastic.enabled");
  const double beta = get_real(f, "algorithm.beta");
  const double sigma = get_real(f, "stochastic.sigma_fv");
  const double delta = cfg.uplink.nominal_delta(d);
  const double delta_s = cfg.downlink.nominal_delta(d);
  const ProblemMetadata& meta = problem.meta();
  const bool want_theory =
      get_string(f, "algorithm.gamma") == "theory" || get_string(f, "algorithm.c") == "theory";

  StepThreshold theory{};
  std::size_t n_fv = 1;
  if (!is_symbolic(f, "stochastic.N_fv")) n_fv = as_size(get_int(f, "stochastic.N_fv"));
  if (want_theory && cfg.kind != AlgorithmKind::ProjectedEF21) {
    if (!(meta.R > 0.0) || !(meta.M > 0.0))
      field_error(f, "algorithm.gamma", "theory values need known R and M for this problem");
    if (!stochastic) {
      theory = theoretical_params(meta.R, meta.M, delta, delta_s, cfg.T);
    } else {
      // The noise floor enters R, and the batch depends on c: one refinement
      // pass settles both because R barely moves.
      theory = theoretical_params_stochastic(meta.R, meta.M, delta, beta, cfg.T);
      if (is_symbolic(f, "stochastic.N_fv"))
        n_fv = min_batch_size(sigma, problem.workers(), theory.c, beta, cfg.T);
      const double R = std::sqrt(meta.R * meta.R + sigma * sigma / static_cast<double>(n_fv) /
                                                        (6.0 * meta.M * meta.M));
      theory = theoretical_params_stochastic(R, meta.M, delta, beta, cfg.T);
    }
  }

  const std::string g = get_string(f, "algorithm.gamma");
  if (g == "theory") {
    if (cfg.kind == AlgorithmKind::ProjectedEF21) {
      if (!meta.smoothness)
        field_error(f, "algorithm.gamma", "projected_ef21 theory step needs a smooth problem");
      cfg.gamma = projected_ef21_step(delta, *meta.smoothness);
    } else {
      cfg.gamma = theory.gamma;
    }
  } else if (g == "inv_sqrt_T") {
    cfg.gamma = 1.0 / std::sqrt(static_cast<double>(cfg.T));
  } else {
    cfg.gamma = get_real(f, "algorithm.gamma");
  }

  if (is_symbolic(f, "algorithm.c")) {
    if (get_string(f, "algorithm.c") != "theory") field_error(f, "algorithm.c", "expected a number or theory");
    if (cfg.kind == AlgorithmKind::ProjectedEF21)
      field_error(f, "algorithm.c", "projected_ef21 has no switching threshold");
    cfg.c = theory.c;
  } else {
    cfg.c = get_real(f, "algorithm.c");
  }

  if (stochastic) {
    StochasticConfig sc;
    sc.sigma_fv = sigma;
    if (is_symbolic(f, "stochastic.N_fv") && !want_theory) {
      if (!(std::isfinite(cfg.c) && cfg.c > 0.0))
        field_error(f, "stochastic.N_fv", "auto batch size needs a finite positive c");
      n_fv = min_batch_size(sigma, problem.workers(), cfg.c, beta, cfg.T);
    }
    sc.N_fv = n_fv;
    sc.subgrad_batch = as_size(get_int(f, "stochastic.subgrad_batch"));
    sc.subgrad_noise = get_real(f, "stochastic.subgrad_noise");
    sc.seed = seed;
    cfg.stochastic = sc;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    field_error(f, "algorithm.kind", e.what());
  }
  return cfg;
}

bool ExperimentResult::any_flagged() const {
  for (const RunOutcome& r : runs)
    if (r.record && r.record->flags.any()) return true;
  return false;
}

bool ExperimentResult::any_error() const {
  for (const RunOutcome& r : runs)
    if (!r.error.empty()) return true;
  return false;
}

SummaryRow summary_row(const RunOutcome& run) {
  SummaryRow row;
  row.emplace_back("point", std::to_string(run.point));
  row.emplace_back("seed", std::to_string(run.seed));
  for (const auto& [name, value] : run.fields) row.emplace_back(name, format_value(value));
  const bool ok = run.record.has_value();
  const AlgorithmConfig* a = run.algorithm ? &*run.algorithm : nullptr;
  row.emplace_back("resolved_gamma", a ? format_double(a->gamma) : "");
  row.emplace_back("resolved_c", a ? format_double(a->c) : "");
  row.emplace_back("resolved_N_fv", a && a->stochastic ? std::to_string(a->stochastic->N_fv) : "");
  row.emplace_back("final_f_gap", ok ? format_double(run.record->final_gap) : "");
  row.emplace_back("final_g", ok ? format_double(run.record->final_g) : "");
  row.emplace_back("B_size", ok ? std::to_string(run.record->B_size) : "");
  row.emplace_back("bytes_per_worker", ok ? format_double(run.record->total_bytes_per_worker()) : "");
  row.emplace_back("wall_seconds", ok ? format_double(run.record->wall_seconds) : "");
  row.emplace_back("no_feasible_iterate", ok && run.record->flags.no_feasible_iterate ? "1" : "0");
  row.emplace_back("diverged", ok && run.record->flags.diverged ? "1" : "0");
  row.emplace_back("trajectory", run.trajectory_path);
  row.emplace_back("error", run.error);
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options) {
  const std::vector<FieldMap> points = cfg.points();
  for (const FieldMap& p : points) validate_point(p);
  const std::vector<std::uint64_t> seeds =
      options.seed_override ? std::vector<std::uint64_t>{*options.seed_override} : cfg.seeds;

  ExperimentResult result;
  result.out_dir = options.out_dir.value_or(cfg.out_dir);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::uint64_t s : seeds) {
      RunOutcome run;
      run.point = p;
      run.seed = s;
      run.fields = points[p];
      result.runs.push_back(std::move(run));
    }
  }
  if (options.write_files) std::filesystem::create_directories(result.out_dir);

  RunOptions run_options;
  run_options.stride = cfg.stride;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < result.runs.size(); k = next++) {
      RunOutcome& run = result.runs[k];
      try {
        ProblemInstance problem = build_problem(run.fields, run.seed);
        run.algorithm = build_algorithm(run.fields, problem, run.seed);
        run.record = run_algorithm(problem, *run.algorithm, run_options);
        if (options.write_files) {
          char name[64];
          std::snprintf(name, sizeof name, "run_p%03zu_s%llu.csv", run.point,
                        static_cast<unsigned long long>(run.seed));
          run.trajectory_path = (std::filesystem::path(result.out_dir) / name).string();
          write_trajectory_csv(run.trajectory_path, *run.record);
        }
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(result.runs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  if (options.write_files) {
    std::vector<SummaryRow> rows;
    for (const RunOutcome& run : result.runs) rows.push_back(summary_row(run));
    result.summary_path = (std::filesystem::path(result.out_dir) / "summary.csv").string();
    write_summary_csv(result.summary_path, rows);
  }
  return result;
}

}  // namespace cefopt
