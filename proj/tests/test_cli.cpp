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
#include "cefopt/csv.hpp"
#include "cefopt/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cefopt;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cefopt_cli_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_config(const std::filesystem::path& dir, const std::string& text) {
  const std::string path = (dir / "exp.cfg").string();
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("l1 toy preset writes three trajectories with the expected shapes") {
  const auto dir = scratch("l1_toy");
  const Outcome o =
      cli({"run", std::string(CEFOPT_SOURCE_DIR) + "/configs/l1_toy.cfg", "--out", dir.string()});
  REQUIRE(o.code == 0);
  const double gamma = 1.0 / std::sqrt(1000.0);
  const TrajectoryTable cgd = read_trajectory_csv((dir / "run_p000_s0.csv").string());
  const TrajectoryTable ef21 = read_trajectory_csv((dir / "run_p001_s0.csv").string());
  const TrajectoryTable safe = read_trajectory_csv((dir / "run_p002_s0.csv").string());
  REQUIRE(cgd.f_gap.size() == 1000);
  for (double g : cgd.f_gap) CHECK(std::abs(g - (1 + gamma / 2)) <= 1e-12);
  for (std::size_t t = 0; t < ef21.f_gap.size(); ++t)
    CHECK(std::abs(ef21.f_gap[t] - (1 + gamma / 2 + t * gamma)) <= 1e-9);
  CHECK(safe.f_gap.back() < 0.5 * safe.f_gap.front());
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown algorithm kind exits 1 naming the field") {
  const auto dir = scratch("badkind");
  const std::string path = write_config(dir, "[algorithm]\nkind = adam\n");
  const Outcome o = cli({"run", path, "--out", dir.string()});
  CHECK(o.code == 1);
  CHECK(o.err.find("algorithm.kind") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed config exits 1 with line and field") {
  const auto dir = scratch("malformed");
  const std::string path = write_config(dir, "[problem]\nn = 2\n\nd = many\n");
  const Outcome o = cli({"run", path});
  CHECK(o.code == 1);
  CHECK(o.err.find(":4: field 'problem.d'") != std::string::npos);
  CHECK(cli({"run", (dir / "missing.cfg").string()}).code == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a flagged run exits 2") {
  const auto dir = scratch("flagged");
  const std::string path = write_config(dir, R"(
[problem]
kind = synthetic_l1
n = 3
d = 10
constraint = halfspace
[algorithm]
gamma = 0.000001
c = 0
T = 5
)");
  const Outcome o = cli({"run", path, "--out", dir.string()});
  CHECK(o.code == 2);
  CHECK(o.out.find("NO_FEASIBLE_ITERATE") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep requires a sweep block; run accepts one") {
  const auto dir = scratch("sweep");
  const std::string plain = write_config(dir, "[problem]\nkind = l1_toy\n[algorithm]\n"
                                              "gamma = 0.1\nT = 10\n");
  CHECK(cli({"sweep", plain, "--out", dir.string()}).code == 1);
  const std::string swept = write_config(dir, "[problem]\nkind = l1_toy\n[algorithm]\n"
                                              "gamma = 0.1\nT = 10\n[sweep]\n"
                                              "algorithm.gamma = [0.1, 0.2]\n[run]\nseeds = [1, 2]\n");
  const Outcome o = cli({"sweep", swept, "--out", dir.string(), "--jobs", "3"});
  CHECK(o.code == 0);
  for (const char* name : {"run_p000_s1.csv", "run_p000_s2.csv", "run_p001_s1.csv", "run_p001_s2.csv"})
    CHECK(std::filesystem::exists(dir / name));
  std::filesystem::remove_all(dir);
}

TEST_CASE("output directory precedence: --out, then CEFOPT_OUT, then config") {
  const auto dir = scratch("precedence");
  const std::string path = write_config(
      dir, "[problem]\nkind = l1_toy\n[algorithm]\ngamma = 0.1\nT = 5\n[output]\ndir = " +
               (dir / "from_config").string() + "\n");
  ::setenv("CEFOPT_OUT", (dir / "from_env").string().c_str(), 1);
  CHECK(cli({"run", path, "--out", (dir / "from_flag").string()}).code == 0);
  CHECK(std::filesystem::exists(dir / "from_flag" / "summary.csv"));
  CHECK(cli({"run", path}).code == 0);
  CHECK(std::filesystem::exists(dir / "from_env" / "summary.csv"));
  ::unsetenv("CEFOPT_OUT");
  CHECK(cli({"run", path, "--seed-override", "4"}).code == 0);
  CHECK(std::filesystem::exists(dir / "from_config" / "run_p000_s4.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("counterexample subcommand") {
  const Outcome cgd = cli({"counterexample", "cgd"});
  CHECK(cgd.code == 0);
  CHECK(cgd.out.find("PASS") != std::string::npos);
  CHECK(cli({"counterexample", "ef21"}).code == 0);
  const Outcome safe = cli({"counterexample", "safe_ef"});
  CHECK(safe.code == 0);
  CHECK(safe.out.find("envelope") != std::string::npos);
  CHECK(cli({"counterexample", "cgd", "--tie-break", "highest"}).code == 1);
  CHECK(cli({"counterexample", "sgd"}).code == 1);
}

TEST_CASE("verify subcommand on the fast criteria") {
  const Outcome o = cli({"verify", "--only", "1", "2", "3", "4", "12"});
  CHECK(o.code == 0);
  CHECK(o.out.find("5/5 criteria passed") != std::string::npos);
  CHECK(cli({"verify", "--only", "14"}).code == 1);
  CHECK(cli({}).code == 1);
}

TEST_CASE("every shipped preset parses and validates") {
  std::size_t presets = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(std::string(CEFOPT_SOURCE_DIR) + "/configs")) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    const cefopt::ExperimentConfig cfg = cefopt::load_config(entry.path().string());
    for (const cefopt::FieldMap& point : cfg.points()) CHECK_NOTHROW(cefopt::validate_point(point));
    ++presets;
  }
  CHECK(presets >= 6);
}
