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
#include "cefopt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cefopt {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_trajectory_csv(std::ostream& out, const RunRecord& record) {
  out << kTrajectoryHeader << '\n';
  for (std::size_t r = 0; r < record.iter.size(); ++r) {
    out << record.iter[r] << ',' << format_double(record.f_gap[r]) << ','
        << format_double(record.g_val[r]) << ',' << (record.in_B[r] ? 1 : 0) << ','
        << record.uplink_floats_cum[r] << ',' << record.downlink_floats_cum[r] << ','
        << record.scalar_floats_cum[r] << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_trajectory_csv(out, record);
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("trajectory line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("trajectory line " + std::to_string(line) + ": bad count '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

TrajectoryTable read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw std::runtime_error("trajectory CSV has an unexpected header");
  TrajectoryTable t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw std::runtime_error("trajectory line " + std::to_string(lineno) + ": expected 7 cells");
    t.iter.push_back(parse_count(cells[0], lineno));
    t.f_gap.push_back(parse_double(cells[1], lineno));
    t.g_val.push_back(parse_double(cells[2], lineno));
    t.in_B.push_back(cells[3] == "1" ? 1 : 0);
    t.uplink_floats_cum.push_back(parse_count(cells[4], lineno));
    t.downlink_floats_cum.push_back(parse_count(cells[5], lineno));
    t.scalar_floats_cum.push_back(parse_count(cells[6], lineno));
  }
  return t;
}

TrajectoryTable read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return read_trajectory_csv(in);
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  if (rows.empty()) return;
  for (std::size_t k = 0; k < rows.front().size(); ++k)
    out << (k ? "," : "") << csv_escape(rows.front()[k].first);
  out << '\n';
  for (const SummaryRow& row : rows) {
    if (row.size() != rows.front().size())
      throw std::logic_error("summary rows disagree on their columns");
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k].first != rows.front()[k].first)
        throw std::logic_error("summary rows disagree on their columns");
      out << (k ? "," : "") << csv_escape(row[k].second);
    }
    out << '\n';
  }
}

}  // namespace cefopt
