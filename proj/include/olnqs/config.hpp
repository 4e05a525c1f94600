// Copyright 2026 The OLNQS Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "olnqs/errors.hpp"
#include "olnqs/lindblad.hpp"

namespace olnqs::cli {

enum class RunMode { rk, rbm, invariant, gradient, natural_gradient };

inline const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::rk: return "rk";
    case RunMode::rbm: return "rbm";
    case RunMode::invariant: return "invariant";
    case RunMode::gradient: return "gradient";
    case RunMode::natural_gradient: return "natural-gradient";
  }
  return "?";
}

inline RunMode mode_from_string(const std::string& s) {
  if (s == "rk") return RunMode::rk;
  if (s == "rbm") return RunMode::rbm;
  if (s == "invariant") return RunMode::invariant;
  if (s == "gradient") return RunMode::gradient;
  if (s == "natural-gradient") return RunMode::natural_gradient;
  throw ConfigError("unknown mode '" + s +
                    "' (expected rk, rbm, invariant, gradient or natural-gradient)");
}

/// One experiment: a model point, an optimization mode and its knobs.
/// Defaults: gamma=1, alpha=1, beta=alpha, dt_base=1e-2, rcond=1e-12,
/// max_iters=1000, cost_threshold=1e-10, seed=1, hermitian_c=true,
/// rk_reference=false, out=".".
struct ExperimentConfig {
  int num_sites = 0;
  Eigen::Vector3d coupling = Eigen::Vector3d::Zero();
  Eigen::Vector3d field = Eigen::Vector3d::Zero();
  double gamma = 1.0;
  RunMode mode = RunMode::rk;
  double alpha = 1.0;
  double beta = -1.0;  // resolved to alpha when the key is absent
  double dt_base = 1e-2;
  double rcond = 1e-12;
  long max_iters = 1000;
  double cost_threshold = 1e-10;
  std::uint64_t seed = 1;
  bool hermitian_c = true;
  bool rk_reference = false;
  std::string out_dir = ".";

  lindblad::LindbladModel model() const {
    return lindblad::LindbladModel{num_sites, coupling, field, gamma};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct KeyValue {
  std::string value;
  int line = 0;
};

inline double parse_double(const std::string& where, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": malformed number '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(where + ": malformed number '" + v + "'");
  return out;
}

inline long parse_long(const std::string& where, const std::string& v) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": malformed integer '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(where + ": malformed integer '" + v + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& where, const std::string& v) {
  std::size_t pos = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": malformed unsigned integer '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(where + ": malformed unsigned integer '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where + ": malformed boolean '" + v + "' (expected true/false/1/0)");
}

inline void require_integral(const std::string& name, double density, int num_sites) {
  const double exact = density * num_sites;
  if (std::abs(exact - std::round(exact)) > 1e-9 || exact < 0) {
    std::ostringstream os;
    os << name << " * N = " << exact << " must be a non-negative integer (" << name << "="
       << density << ", N=" << num_sites << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace detail

/// Flat key=value format, one key per line, '#' starts a comment. Unknown
/// keys, malformed values and duplicate keys are hard errors naming the line.
inline ExperimentConfig parse_config(std::istream& is, const std::string& name) {
  using detail::KeyValue;
  std::map<std::string, KeyValue> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key=value, got '" +
                        line + "'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (!entries.emplace(key, KeyValue{value, line_no}).second) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  auto take = [&](const char* key) -> const KeyValue* {
    const auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    return &it->second;
  };
  auto where = [&](const char* key, const KeyValue* kv) {
    return name + ":" + std::to_string(kv->line) + ": key '" + std::string(key) + "'";
  };
  auto set_double = [&](const char* key, double& field) {
    if (const auto* kv = take(key)) field = detail::parse_double(where(key, kv), kv->value);
  };
  auto set_bool = [&](const char* key, bool& field) {
    if (const auto* kv = take(key)) field = detail::parse_bool(where(key, kv), kv->value);
  };

  static const char* known[] = {"N",          "Jx",        "Jy",           "Jz",
                                "Bx",         "By",        "Bz",           "gamma",
                                "mode",       "alpha",     "beta",         "dt_base",
                                "rcond",      "max_iters", "cost_threshold", "seed",
                                "hermitian_c", "rk_reference", "out"};
  for (const auto& [key, kv] : entries) {
    bool ok = false;
    for (const char* k : known) ok = ok || (key == k);
    if (!ok) {
      throw ConfigError(name + ":" + std::to_string(kv.line) + ": unknown key '" + key + "'");
    }
  }

  const auto* n_kv = take("N");
  if (!n_kv) throw ConfigError(name + ": missing required key 'N'");
  cfg.num_sites = static_cast<int>(detail::parse_long(where("N", n_kv), n_kv->value));

  const auto* mode_kv = take("mode");
  if (!mode_kv) throw ConfigError(name + ": missing required key 'mode'");
  cfg.mode = mode_from_string(mode_kv->value);

  set_double("Jx", cfg.coupling[0]);
  set_double("Jy", cfg.coupling[1]);
  set_double("Jz", cfg.coupling[2]);
  set_double("Bx", cfg.field[0]);
  set_double("By", cfg.field[1]);
  set_double("Bz", cfg.field[2]);
  set_double("gamma", cfg.gamma);
  set_double("alpha", cfg.alpha);
  set_double("beta", cfg.beta);
  set_double("dt_base", cfg.dt_base);
  set_double("rcond", cfg.rcond);
  set_double("cost_threshold", cfg.cost_threshold);
  set_bool("hermitian_c", cfg.hermitian_c);
  set_bool("rk_reference", cfg.rk_reference);
  if (const auto* kv = take("max_iters"))
    cfg.max_iters = detail::parse_long(where("max_iters", kv), kv->value);
  if (const auto* kv = take("seed")) cfg.seed = detail::parse_u64(where("seed", kv), kv->value);
  if (const auto* kv = take("out")) cfg.out_dir = kv->value;
  if (cfg.beta < 0.0) cfg.beta = cfg.alpha;

  if (cfg.num_sites < 2) throw ConfigError(name + ": N must be at least 2");
  if (!(cfg.gamma > 0.0)) throw ConfigError(name + ": gamma must be positive");
  if (!(cfg.dt_base > 0.0)) throw ConfigError(name + ": dt_base must be positive");
  if (cfg.max_iters < 1) throw ConfigError(name + ": max_iters must be at least 1");
  detail::require_integral("alpha", cfg.alpha, cfg.num_sites);
  detail::require_integral("beta", cfg.beta, cfg.num_sites);
  return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  return parse_config(is, path.string());
}

}  // namespace olnqs::cli
