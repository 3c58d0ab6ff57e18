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
// Mutation checks: deliberately broken configurations must be caught by the
// acceptance criteria that guard them.
#include "cefopt/cli.hpp"
#include "cefopt/verify.hpp"

#include <doctest.h>

#include <sstream>

using namespace cefopt;

TEST_CASE("highest-index Top-K ties break the toy counterexamples") {
  VerifyOptions o;
  o.tie_break = TieBreak::HighestIndex;
  CHECK(!run_criterion(1, o).passed);
  CHECK(!run_criterion(2, o).passed);
  CHECK(!counterexample("cgd", TieBreak::HighestIndex).passed);
  CHECK(!counterexample("ef21", TieBreak::HighestIndex).passed);
  // Faithful ties still pass.
  CHECK(run_criterion(1, {}).passed);
  CHECK(run_criterion(2, {}).passed);
}

TEST_CASE("an overstated compressor accuracy fails the contraction checks") {
  VerifyOptions o;
  o.delta_misreport = 1.5;
  const CriterionResult r = run_criterion(4, o);
  CHECK(!r.passed);
  o.delta_misreport = 1.0;
  CHECK(run_criterion(4, o).passed);
}

TEST_CASE("mutations surface through the command line") {
  std::ostringstream out, err;
  CHECK(cli_main({"verify", "--only", "1", "2", "--tie-break", "highest"}, out, err) == 1);
  CHECK(out.str().find("[FAIL]  1") != std::string::npos);
  CHECK(cli_main({"verify", "--only", "4", "--misreport-delta", "2"}, out, err) == 1);
}
