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

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cefopt {

/// Sectioned key = value format:
///
///   # comment
///   [problem]
///   kind = synthetic_l1
///   d = 100
///   [algorithm]
///   gamma = theory
///   c = inf
///   ef21_v0 = [1, 1]
///   [sweep]
///   algorithm.uplink = ["topk:10", "topk:20"]
///   [output]
///   dir = out
///   [run]
///   seeds = [0, 1, 2]
///
/// Scalars are booleans, integers, reals (including inf), or strings, either
/// bare or double-quoted.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& field,
              const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

using ConfigScalar = std::variant<bool, std::int64_t, double, std::string>;

struct ConfigValue {
  std::vector<ConfigScalar> items;
  bool is_list = false;
  int line = 0;

  const ConfigScalar& scalar() const { return items.front(); }
};

std::string format_scalar(const ConfigScalar& v);
std::string format_value(const ConfigValue& v);

enum class FieldType { Real, Integer, Bool, String, RealOrTheory, IntegerOrAuto, RealList };

struct FieldSchema {
  std::string name;  // "section.key"
  FieldType type;
  std::string default_value;  // formatted; empty means "unset"
  std::string help;
};

/// Every settable field of the problem, algorithm, and stochastic sections.
const std::vector<FieldSchema>& field_schema();
const FieldSchema* find_field(const std::string& name);

struct SweepAxis {
  std::string field;
  std::vector<ConfigScalar> values;
  int line = 0;
};

/// Fully resolved field assignment for one sweep point.
using FieldMap = std::map<std::string, ConfigValue>;

struct ExperimentConfig {
  std::string source;
  FieldMap fields;
  std::vector<SweepAxis> sweep;
  std::string out_dir = "out";
  std::size_t stride = 1;
  std::vector<std::uint64_t> seeds{0};

  /// Cartesian product of the sweep axes applied over `fields`, in
  /// row-major order (last axis fastest). One point when there is no sweep.
  std::vector<FieldMap> points() const;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

/// Typed accessors. They throw ConfigError naming the field.
double get_real(const FieldMap& f, const std::string& name);
std::int64_t get_int(const FieldMap& f, const std::string& name);
bool get_bool(const FieldMap& f, const std::string& name);
std::string get_string(const FieldMap& f, const std::string& name);
std::vector<double> get_real_list(const FieldMap& f, const std::string& name);
bool has_field(const FieldMap& f, const std::string& name);
/// True when the field holds the literal "theory" or "auto".
bool is_symbolic(const FieldMap& f, const std::string& name);

/// Error carrying the line at which `name` was set (0 for defaults).
[[noreturn]] void field_error(const FieldMap& f, const std::string& name,
                              const std::string& message);

}  // namespace cefopt
