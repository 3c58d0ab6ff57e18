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

#include "cefopt/simulator.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cefopt {

inline constexpr const char* kTrajectoryHeader =
    "iter,f_gap,g_val,in_B,uplink_floats_cum,downlink_floats_cum,scalar_floats_cum";

/// Trajectory columns as read back from disk.
struct TrajectoryTable {
  std::vector<std::size_t> iter;
  std::vector<double> f_gap;
  std::vector<double> g_val;
  std::vector<char> in_B;
  std::vector<std::size_t> uplink_floats_cum;
  std::vector<std::size_t> downlink_floats_cum;
  std::vector<std::size_t> scalar_floats_cum;
};

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

void write_trajectory_csv(std::ostream& out, const RunRecord& record);
void write_trajectory_csv(const std::string& path, const RunRecord& record);
TrajectoryTable read_trajectory_csv(std::istream& in);
TrajectoryTable read_trajectory_csv(const std::string& path);

/// One summary row as ordered (column, value) pairs.
using SummaryRow = std::vector<std::pair<std::string, std::string>>;

/// Writes rows under the header of the first row; all rows must share it.
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

/// Quotes a cell when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& cell);

}  // namespace cefopt
