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

#include <iosfwd>
#include <string>
#include <vector>

namespace cefopt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitFlagged = 2;

/// Entry point of the cefopt command-line tool. Subcommands: run, sweep,
/// verify, counterexample. Returns the process exit code: 0 on success, 1 on
/// configuration errors or failed checks, 2 when some run was flagged
/// (diverged or no feasible iterate).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cefopt
