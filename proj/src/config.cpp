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
#include "cefopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cefopt {

ConfigError::ConfigError(const std::string& source, int line, const std::string& field,
                         const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         (field.empty() ? std::string() : ": field '" + field + "'") + ": " +
                         message),
      line_(line),
      field_(field) {}

std::string format_scalar(const ConfigScalar& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  return std::get<std::string>(v);
}

std::string format_value(const ConfigValue& v) {
  if (!v.is_list) return v.items.empty() ? std::string() : format_scalar(v.items.front());
  std::string out = "[";
  for (std::size_t k = 0; k < v.items.size(); ++k) {
    if (k) out += ", ";
    out += format_scalar(v.items[k]);
  }
  return out + "]";
}

const std::vector<FieldSchema>& field_schema() {
  using T = FieldType;
  static const std::vector<FieldSchema> schema = {
      {"problem.kind", T::String, "synthetic_l1",
       "l1_toy | synthetic_l1 | worst_case | neyman_pearson | smooth_quadratic"},
      {"problem.n", T::Integer, "1", "number of workers"},
      {"problem.d", T::Integer, "100", "dimension (synthetic_l1, smooth_quadratic)"},
      {"problem.s", T::Real, "1", "heterogeneity scale (synthetic_l1)"},
      {"problem.zeta", T::Real, "0.001", "label noise scale (synthetic_l1)"},
      {"problem.seed", T::IntegerOrAuto, "auto", "data seed; auto follows the run seed"},
      {"problem.solve_reference", T::Bool, "true", "compute the exact optimum (synthetic_l1)"},
      {"problem.constraint", T::String, "none", "none | halfspace | ball (synthetic_l1)"},
      {"problem.constraint_margin", T::Real, "0.5", "halfspace offset relative to the planted norm"},
      {"problem.constraint_heterogeneity", T::Real, "0.5", "per-worker halfspace perturbation"},
      {"problem.constraint_radius", T::Real, "1", "ball constraint radius around the origin"},
      {"problem.delta", T::Real, "0.25", "compression accuracy (worst_case)"},
      {"problem.horizon", T::IntegerOrAuto, "auto", "T of the worst-case instance; auto uses algorithm.T"},
      {"problem.R", T::Real, "1", "class constant R (worst_case)"},
      {"problem.M", T::Real, "1", "class constant M (worst_case)"},
      {"problem.allow_outside_regime", T::Bool, "false", "permit delta > 0.3 or T < 1/delta^2"},
      {"problem.dataset", T::String, "", "headerless CSV with the label last (neyman_pearson)"},
      {"problem.np_c", T::Real, "0.5", "class-1 loss cap (neyman_pearson)"},
      {"problem.samples", T::Integer, "400", "generated samples when no dataset is given"},
      {"problem.features", T::Integer, "5", "generated feature count"},
      {"problem.separation", T::Real, "2", "distance between generated class means"},
      {"problem.L", T::Real, "1", "largest curvature (smooth_quadratic)"},
      {"problem.decades", T::Real, "6", "curvature range in decades (smooth_quadratic)"},
      {"problem.spread", T::Real, "0.5", "per-worker curvature spread (smooth_quadratic)"},
      {"algorithm.kind", T::String, "safe_ef",
       "safe_ef | cgd | ef21 | projected_ef21 | primal_dual_ef"},
      {"algorithm.gamma", T::RealOrTheory, "theory", "step size, theory, or inv_sqrt_T"},
      {"algorithm.c", T::RealOrTheory, "inf", "switching threshold or theory"},
      {"algorithm.T", T::Integer, "1000", "number of rounds"},
      {"algorithm.uplink", T::String, "identity", "worker compressor, e.g. topk:10"},
      {"algorithm.downlink", T::String, "identity", "server compressor"},
      {"algorithm.eta", T::Real, "0", "dual step (primal_dual_ef)"},
      {"algorithm.lambda0", T::Real, "0", "initial multiplier (primal_dual_ef)"},
      {"algorithm.ef21_v0", T::RealList, "", "initial EF21 estimator; default f_i'(x0)"},
      {"algorithm.projection", T::String, "none", "none | ball | box (projected_ef21)"},
      {"algorithm.projection_radius", T::Real, "inf", "ball radius"},
      {"algorithm.projection_lower", T::Real, "-inf", "box lower bound"},
      {"algorithm.projection_upper", T::Real, "inf", "box upper bound"},
      {"algorithm.tie_break", T::String, "lowest", "Top-K tie order: lowest | highest"},
      {"algorithm.beta", T::Real, "0.05", "failure probability for stochastic theory values"},
      {"stochastic.enabled", T::Bool, "false", "use stochastic oracles"},
      {"stochastic.sigma_fv", T::Real, "0", "per-sample constraint noise"},
      {"stochastic.N_fv", T::IntegerOrAuto, "1", "constraint batch size or auto"},
      {"stochastic.subgrad_batch", T::Integer, "0", "subgradient mini-batch; 0 = full"},
      {"stochastic.subgrad_noise", T::Real, "0", "subgradient noise radius for analytic objectives"},
  };
  return schema;
}

const FieldSchema* find_field(const std::string& name) {
  for (const FieldSchema& f : field_schema())
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') quoted = !quoted;
    if (line[k] == '#' && !quoted) return line.substr(0, k);
  }
  return line;
}

bool parse_scalar(const std::string& raw, ConfigScalar& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') return false;
    out = s.substr(1, s.size() - 2);
    return true;
  }
  if (s == "true" || s == "false") {
    out = s == "true";
    return true;
  }
  if (s == "inf" || s == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (s == "-inf") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  const bool intlike = std::all_of(s.begin() + (s[0] == '-' || s[0] == '+' ? 1 : 0), s.end(),
                                   [](unsigned char ch) { return std::isdigit(ch); }) &&
                       s.find_first_of("0123456789") != std::string::npos;
  if (intlike) {
    try {
      out = static_cast<std::int64_t>(std::stoll(s));
      return true;
    } catch (const std::out_of_range&) {
      return false;
    }
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() && *end == '\0') {
    out = v;
    return true;
  }
  if (s.find_first_of(" \t,[]=\"") != std::string::npos) return false;
  out = s;
  return true;
}

std::vector<std::string> split_list(const std::string& body) {
  std::vector<std::string> parts;
  std::string cur;
  bool quoted = false;
  for (char ch : body) {
    if (ch == '"') quoted = !quoted;
    if (ch == ',' && !quoted) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty() || !parts.empty()) parts.push_back(cur);
  return parts;
}

bool is_number(const ConfigScalar& v) {
  return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
}

/// Returns an empty string when `v` fits `type`, otherwise a description.
std::string type_mismatch(FieldType type, const ConfigScalar& v) {
  switch (type) {
    case FieldType::Real:
      return is_number(v) ? "" : "expected a number";
    case FieldType::Integer:
      return std::holds_alternative<std::int64_t>(v) ? "" : "expected an integer";
    case FieldType::Bool:
      return std::holds_alternative<bool>(v) ? "" : "expected true or false";
    case FieldType::String:
      return std::holds_alternative<std::string>(v) ? "" : "expected a string";
    case FieldType::RealOrTheory: {
      if (is_number(v)) return "";
      const auto* s = std::get_if<std::string>(&v);
      return s && (*s == "theory" || *s == "inv_sqrt_T") ? ""
                                                         : "expected a number, theory, or inv_sqrt_T";
    }
    case FieldType::IntegerOrAuto: {
      if (std::holds_alternative<std::int64_t>(v)) return "";
      const auto* s = std::get_if<std::string>(&v);
      return s && *s == "auto" ? "" : "expected an integer or auto";
    }
    case FieldType::RealList:
      return is_number(v) ? "" : "expected a list of numbers";
  }
  return "unknown type";
}

ConfigValue parse_value(const std::string& text, const std::string& source, int line,
                        const std::string& field) {
  ConfigValue val;
  val.line = line;
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError(source, line, field, "missing value");
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError(source, line, field, "unterminated list");
    val.is_list = true;
    for (const std::string& part : split_list(s.substr(1, s.size() - 2))) {
      ConfigScalar item;
      if (!parse_scalar(part, item))
        throw ConfigError(source, line, field, "bad list item '" + trim(part) + "'");
      val.items.push_back(std::move(item));
    }
    return val;
  }
  ConfigScalar item;
  if (!parse_scalar(s, item)) throw ConfigError(source, line, field, "cannot parse value '" + s + "'");
  val.items.push_back(std::move(item));
  return val;
}

void check_field_value(const FieldSchema& schema, const ConfigValue& v, const std::string& source) {
  if (schema.type == FieldType::RealList) {
    for (const ConfigScalar& item : v.items) {
      std::string err = type_mismatch(schema.type, item);
      if (!err.empty()) throw ConfigError(source, v.line, schema.name, err);
    }
    return;
  }
  if (v.is_list) throw ConfigError(source, v.line, schema.name, "expected a single value, got a list");
  std::string err = type_mismatch(schema.type, v.scalar());
  if (!err.empty()) throw ConfigError(source, v.line, schema.name, err);
}

ConfigValue default_value(const FieldSchema& schema) {
  if (schema.default_value.empty()) return ConfigValue{{}, schema.type == FieldType::RealList, 0};
  ConfigValue v = parse_value(schema.default_value, "<defaults>", 0, schema.name);
  if (schema.type == FieldType::RealList) v.is_list = true;
  return v;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  static const std::set<std::string> kSections = {"problem", "algorithm", "stochastic",
                                                  "sweep", "output", "run"};
  ExperimentConfig cfg;
  cfg.source = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') throw ConfigError(source, lineno, "", "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ConfigError(source, lineno, "", "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, lineno, "", "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source, lineno, "", "empty key");
    if (section.empty()) throw ConfigError(source, lineno, key, "key outside of any section");
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw ConfigError(source, lineno, full, "set twice");
    ConfigValue value = parse_value(line.substr(eq + 1), source, lineno, full);

    if (section == "sweep") {
      const FieldSchema* schema = find_field(key);
      if (!schema) throw ConfigError(source, lineno, key, "sweep axis names no known field");
      SweepAxis axis{key, {}, lineno};
      if (schema->type == FieldType::RealList)
        throw ConfigError(source, lineno, key, "list-valued fields cannot be swept");
      for (const ConfigScalar& item : value.items) {
        std::string err = type_mismatch(schema->type, item);
        if (!err.empty()) throw ConfigError(source, lineno, key, err);
        axis.values.push_back(item);
      }
      if (axis.values.empty()) throw ConfigError(source, lineno, key, "sweep axis has no values");
      cfg.sweep.push_back(std::move(axis));
    } else if (section == "output") {
      if (key == "dir") {
        if (value.is_list || !std::holds_alternative<std::string>(value.scalar()))
          throw ConfigError(source, lineno, full, "expected a path");
        cfg.out_dir = std::get<std::string>(value.scalar());
      } else if (key == "stride") {
        const auto* v = value.is_list ? nullptr : std::get_if<std::int64_t>(&value.scalar());
        if (!v || *v < 1) throw ConfigError(source, lineno, full, "expected an integer >= 1");
        cfg.stride = static_cast<std::size_t>(*v);
      } else {
        throw ConfigError(source, lineno, full, "unknown output field");
      }
    } else if (section == "run") {
      if (key != "seeds") throw ConfigError(source, lineno, full, "unknown run field");
      cfg.seeds.clear();
      for (const ConfigScalar& item : value.items) {
        const auto* v = std::get_if<std::int64_t>(&item);
        if (!v || *v < 0) throw ConfigError(source, lineno, full, "seeds must be integers >= 0");
        cfg.seeds.push_back(static_cast<std::uint64_t>(*v));
      }
      if (cfg.seeds.empty()) throw ConfigError(source, lineno, full, "seeds must be non-empty");
    } else {
      const FieldSchema* schema = find_field(full);
      if (!schema) throw ConfigError(source, lineno, full, "unknown field");
      check_field_value(*schema, value, source);
      if (schema->type == FieldType::RealList) value.is_list = true;
      cfg.fields[full] = std::move(value);
    }
  }
  for (const FieldSchema& schema : field_schema())
    if (!cfg.fields.count(schema.name)) cfg.fields[schema.name] = default_value(schema);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::vector<FieldMap> ExperimentConfig::points() const {
  std::vector<FieldMap> out{fields};
  for (const SweepAxis& axis : sweep) {
    std::vector<FieldMap> next;
    for (const FieldMap& base : out) {
      for (const ConfigScalar& v : axis.values) {
        FieldMap m = base;
        m[axis.field] = ConfigValue{{v}, false, axis.line};
        next.push_back(std::move(m));
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

const ConfigValue& lookup(const FieldMap& f, const std::string& name) {
  auto it = f.find(name);
  if (it == f.end() || it->second.items.empty())
    throw ConfigError("config", 0, name, "field is not set");
  return it->second;
}

}  // namespace

void field_error(const FieldMap& f, const std::string& name, const std::string& message) {
  auto it = f.find(name);
  throw ConfigError("config", it == f.end() ? 0 : it->second.line, name, message);
}

double get_real(const FieldMap& f, const std::string& name) {
  const ConfigValue& v = lookup(f, name);
  if (const auto* d = std::get_if<double>(&v.scalar())) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.scalar())) return static_cast<double>(*i);
  field_error(f, name, "expected a number");
}

std::int64_t get_int(const FieldMap& f, const std::string& name) {
  const ConfigValue& v = lookup(f, name);
  if (const auto* i = std::get_if<std::int64_t>(&v.scalar())) return *i;
  field_error(f, name, "expected an integer");
}

bool get_bool(const FieldMap& f, const std::string& name) {
  const ConfigValue& v = lookup(f, name);
  if (const auto* b = std::get_if<bool>(&v.scalar())) return *b;
  field_error(f, name, "expected true or false");
}

std::string get_string(const FieldMap& f, const std::string& name) {
  auto it = f.find(name);
  if (it == f.end() || it->second.items.empty()) return "";
  if (const auto* s = std::get_if<std::string>(&it->second.scalar())) return *s;
  return format_scalar(it->second.scalar());
}

std::vector<double> get_real_list(const FieldMap& f, const std::string& name) {
  auto it = f.find(name);
  std::vector<double> out;
  if (it == f.end()) return out;
  for (const ConfigScalar& item : it->second.items) {
    if (const auto* d = std::get_if<double>(&item))
      out.push_back(*d);
    else if (const auto* i = std::get_if<std::int64_t>(&item))
      out.push_back(static_cast<double>(*i));
    else
      field_error(f, name, "expected a list of numbers");
  }
  return out;
}

bool has_field(const FieldMap& f, const std::string& name) {
  auto it = f.find(name);
  return it != f.end() && !it->second.items.empty();
}

bool is_symbolic(const FieldMap& f, const std::string& name) {
  auto it = f.find(name);
  if (it == f.end() || it->second.items.empty() || it->second.is_list) return false;
  const auto* s = std::get_if<std::string>(&it->second.scalar());
  return s && (*s == "theory" || *s == "auto" || *s == "inv_sqrt_T");
}

}  // namespace cefopt
