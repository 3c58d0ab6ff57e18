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
#include "cefopt/cli.hpp"

#include "cefopt/experiment.hpp"
#include "cefopt/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace cefopt {

namespace {

struct Flags {
  std::size_t jobs = 1;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
};

int run_config(const std::string& path, bool require_sweep, const Flags& flags,
               std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitFailure;
  }
  if (require_sweep && cfg.sweep.empty()) {
    err << path << ": sweep needs a [sweep] block; use run for a single point\n";
    return kExitFailure;
  }
  ExperimentOptions options;
  options.jobs = flags.jobs;
  options.seed_override = flags.seed_override;
  if (!flags.out_dir.empty()) {
    options.out_dir = flags.out_dir;
  } else if (const char* env = std::getenv("CEFOPT_OUT"); env && *env) {
    options.out_dir = env;
  }

  ExperimentResult result;
  try {
    result = run_experiment(cfg, options);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  for (const RunOutcome& run : result.runs) {
    char line[256];
    if (!run.error.empty()) {
      err << "point " << run.point << " seed " << run.seed << ": " << run.error << '\n';
      continue;
    }
    const RunRecord& r = *run.record;
    std::snprintf(line, sizeof line,
                  "point %zu seed %llu  %-14s gap(x_bar) %.6g  g(x_bar) %.6g  |B| %zu  %.3fs%s%s",
                  run.point, static_cast<unsigned long long>(run.seed), r.algorithm.c_str(),
                  r.final_gap, r.final_g, r.B_size, r.wall_seconds,
                  r.flags.diverged ? "  DIVERGED" : "",
                  r.flags.no_feasible_iterate ? "  NO_FEASIBLE_ITERATE" : "");
    out << line << '\n';
  }
  out << "summary: " << result.summary_path << '\n';
  if (result.any_error()) return kExitFailure;
  return result.any_flagged() ? kExitFlagged : kExitOk;
}

int run_verify(const VerifyOptions& options, std::ostream& out) {
  std::size_t failed = 0;
  std::size_t total = 0;
  run_acceptance(options, [&](const CriterionResult& r) {
    out << format_result(r) << std::endl;
    ++total;
    failed += r.passed ? 0 : 1;
  });
  out << (total - failed) << "/" << total << " criteria passed\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

int run_counterexample(const std::string& which, TieBreak tie, std::ostream& out) {
  const CounterexampleReport r = counterexample(which, tie);
  char line[256];
  std::snprintf(line, sizeof line, "%s on the l1 toy, Top-1, gamma = %.10g, T = %zu\n",
                r.which.c_str(), r.gamma, r.T);
  out << line;
  if (r.which == "safe_ef") {
    std::snprintf(line, sizeof line,
                  "final gap at x_bar %.6g, envelope 10 M R / sqrt(T) = %.6g, running min %.6g\n",
                  r.max_deviation, r.tolerance, r.running_min);
    out << line;
  } else {
    out << "       t            measured            expected     |diff|\n";
    for (const CounterexampleRow& row : r.rows) {
      if (row.t % 100 != 0 && row.t != r.T) continue;
      std::snprintf(line, sizeof line, "%8zu  %18.12f  %18.12f  %9.2e\n", row.t, row.measured,
                    row.expected, std::abs(row.measured - row.expected));
      out << line;
    }
    std::snprintf(line, sizeof line, "max |diff| over all %zu rounds: %.3e (tolerance %.0e)\n",
                  r.rows.size(), r.max_deviation, r.tolerance);
    out << line;
  }
  out << (r.passed ? "PASS" : "FAIL") << '\n';
  return r.passed ? kExitOk : kExitFailure;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compressed error-feedback optimization experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.name("cefopt");
  Flags flags;
  std::uint64_t seed_override = 0;
  app.add_option("--jobs,-j", flags.jobs, "concurrent runs")->check(CLI::PositiveNumber);
  app.add_option("--out", flags.out_dir, "output directory (overrides CEFOPT_OUT and the config)");
  auto* seed_opt =
      app.add_option("--seed-override", seed_override, "replace the config's seed list");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run every sweep point and seed of a config");
  run->add_option("config", config_path)->required();
  auto* sweep = app.add_subcommand("sweep", "like run, but the config must have a sweep block");
  sweep->add_option("config", config_path)->required();

  std::vector<int> only;
  std::string tie = "lowest";
  double misreport = 1.0;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--only", only, "criterion ids")->check(CLI::Range(1, 13));
  verify->add_option("--tie-break", tie, "Top-K tie order")
      ->check(CLI::IsMember({"lowest", "highest"}));
  verify->add_option("--misreport-delta", misreport,
                     "scale the accuracy claimed in contraction checks")
      ->check(CLI::PositiveNumber);

  std::string which;
  auto* cex = app.add_subcommand("counterexample", "replay the l1 toy for one method");
  cex->add_option("which", which)->required()->check(CLI::IsMember({"cgd", "ef21", "safe_ef"}));
  cex->add_option("--tie-break", tie, "Top-K tie order")
      ->check(CLI::IsMember({"lowest", "highest"}));

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitFailure;
  }
  if (seed_opt->count() > 0) flags.seed_override = seed_override;
  const TieBreak tie_break = tie == "highest" ? TieBreak::HighestIndex : TieBreak::LowestIndex;

  if (run->parsed()) return run_config(config_path, false, flags, out, err);
  if (sweep->parsed()) return run_config(config_path, true, flags, out, err);
  if (verify->parsed()) {
    VerifyOptions options;
    options.only = {only.begin(), only.end()};
    options.tie_break = tie_break;
    options.delta_misreport = misreport;
    return run_verify(options, out);
  }
  return run_counterexample(which, tie_break, out);
}

}  // namespace cefopt
