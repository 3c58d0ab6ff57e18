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
// Runs acceptance criteria 1-13 and prints one line per criterion.
#include "cefopt/verify.hpp"

#include <iostream>

int main() {
  std::size_t failed = 0;
  cefopt::run_acceptance({}, [&](const cefopt::CriterionResult& r) {
    std::cout << cefopt::format_result(r) << std::endl;
    failed += r.passed ? 0 : 1;
  });
  std::cout << (failed == 0 ? "all criteria passed" : "some criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
