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

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "olnqs/config.hpp"
#include "olnqs/observables.hpp"
#include "olnqs/variational.hpp"
#include "olnqs/version.hpp"

namespace olnqs::cli {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

/// Verbosity from the OLNQS_LOG environment variable: quiet|info|debug.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("OLNQS_LOG");
    if (!env) return LogLevel::info;
    const std::string v(env);
    if (v == "quiet" || v == "0") return LogLevel::quiet;
    if (v == "debug" || v == "2") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

namespace detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// One trajectory.csv row; ln_d_rk stays empty unless a reference distance
// was computed. Rows are flushed as written so an aborted run keeps its
// partial trajectory.
inline void write_row(std::ostream& csv, long n, double t,
                      const observables::MagnetizationVector& mag, double cost,
                      double step_norm, double dt_eff, std::optional<double> ln_d_rk) {
  csv << n << ',' << fmt(t) << ',' << fmt(mag.x) << ',' << fmt(mag.y) << ',' << fmt(mag.z)
      << ',' << fmt(cost) << ',' << fmt(step_norm) << ',' << fmt(dt_eff) << ',';
  if (ln_d_rk) csv << fmt(*ln_d_rk);
  csv << '\n';
  csv.flush();
}

inline void log_progress(long n, double t, double cost) {
  const LogLevel level = log_level();
  if (level == LogLevel::quiet) return;
  if (level == LogLevel::info && n % 200 != 0) return;
  std::fprintf(stderr, "[olnqs] n=%ld t=%.4f cost=%.3e\n", n, t, cost);
}

inline void echo_config(std::ostream& os, const ExperimentConfig& cfg) {
  os << "N=" << cfg.num_sites << '\n';
  os << "Jx=" << fmt(cfg.coupling[0]) << '\n';
  os << "Jy=" << fmt(cfg.coupling[1]) << '\n';
  os << "Jz=" << fmt(cfg.coupling[2]) << '\n';
  os << "Bx=" << fmt(cfg.field[0]) << '\n';
  os << "By=" << fmt(cfg.field[1]) << '\n';
  os << "Bz=" << fmt(cfg.field[2]) << '\n';
  os << "gamma=" << fmt(cfg.gamma) << '\n';
  os << "mode=" << mode_name(cfg.mode) << '\n';
  os << "alpha=" << fmt(cfg.alpha) << '\n';
  os << "beta=" << fmt(cfg.beta) << '\n';
  os << "dt_base=" << fmt(cfg.dt_base) << '\n';
  os << "rcond=" << fmt(cfg.rcond) << '\n';
  os << "max_iters=" << cfg.max_iters << '\n';
  os << "cost_threshold=" << fmt(cfg.cost_threshold) << '\n';
  os << "seed=" << cfg.seed << '\n';
  os << "hermitian_c=" << (cfg.hermitian_c ? "true" : "false") << '\n';
  os << "rk_reference=" << (cfg.rk_reference ? "true" : "false") << '\n';
  os << "out=" << cfg.out_dir << '\n';
}

}  // namespace detail

/// Parameter-count / invariant-dimension table for N = 2..n_max: N,
/// N_p(alpha=1), N_p(alpha=2), dim I_G and the full coefficient count 4^N.
inline void table1_report(int n_max, std::ostream& os, bool csv = false) {
  if (n_max < 2 || n_max > 12) throw std::domain_error("table1 report supports 2 <= N <= 12");
  if (csv) {
    os << "N,Np_alpha1,Np_alpha2,dim_IG,dim_squared\n";
  } else {
    os << "  N  Np(alpha=1)  Np(alpha=2)     dim[I_G]      4^N\n";
  }
  bool flagged = false;
  for (int n = 2; n <= n_max; ++n) {
    const long np1 = ansatz::param_count(n, 1.0);
    const long np2 = ansatz::param_count(n, 2.0);
    const auto group = symmetry::SymmetryGroup::build(n);
    const std::int64_t dim_ig = symmetry::invariant_dimension(group);
    const std::int64_t d2 = std::int64_t{1} << (2 * n);
    const bool flag = (n == 8);
    flagged = flagged || flag;
    if (csv) {
      os << n << ',' << np1 << (flag ? "*" : "") << ',' << np2 << ',' << dim_ig << ',' << d2
         << '\n';
    } else {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%3d  %10ld%s  %11ld  %11lld  %8lld\n", n, np1,
                    flag ? "*" : " ", np2, static_cast<long long>(dim_ig),
                    static_cast<long long>(d2));
      os << buf;
    }
  }
  if (flagged) {
    os << "# note: N=8 alpha=1: the formula (2*alpha+1)*N + 2*alpha*N^2 gives 152; "
          "a frequently quoted value for this entry is 132.\n";
  }
}

/// Runs one experiment end to end: writes out/trajectory.csv (header
/// n,t,Mx,My,Mz,cost,step_norm,dt_eff,ln_d_rk) and out/summary.txt.
/// Returns 0 on success, 3 on numeric failure (partial CSV is kept).
inline int run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();

  fs::create_directories(cfg.out_dir);
  std::ofstream csv(fs::path(cfg.out_dir) / "trajectory.csv");
  if (!csv) throw ConfigError("cannot create trajectory.csv under " + cfg.out_dir);
  csv << "n,t,Mx,My,Mz,cost,step_norm,dt_eff,ln_d_rk\n";

  const lindblad::LindbladModel model = cfg.model();
  model.validate();
  const lindblad::Liouvillian liou(model);

  long final_n = 0;
  double final_t = 0.0, final_cost = 0.0;
  observables::MagnetizationVector final_mag;
  std::optional<double> final_ln_d;

  try {
    if (cfg.mode == RunMode::rk) {
      DensityMatrix rho = lindblad::maximally_mixed(cfg.num_sites);
      auto record = [&](long n, double t, const DensityMatrix& state) {
        const double cost = variational::cost_normalized(state, liou);
        const auto mag = observables::mean_magnetization(state);
        detail::write_row(csv, n, t, mag, cost, std::sqrt(cost), cfg.dt_base, std::nullopt);
        detail::log_progress(n, t, cost);
        final_n = n;
        final_t = t;
        final_cost = cost;
        final_mag = mag;
      };
      record(0, 0.0, rho);
      liou.evolve(rho, cfg.dt_base, cfg.max_iters, record);
    } else {
      std::optional<symmetry::SymmetryGroup> group_storage;
      const symmetry::SymmetryGroup* group = nullptr;
      ansatz::AnsatzKind kind = ansatz::AnsatzKind::plain_rbm;
      if (cfg.mode == RunMode::invariant) {
        group_storage.emplace(symmetry::SymmetryGroup::build(cfg.num_sites));
        group = &*group_storage;
        kind = ansatz::AnsatzKind::invariant;
      }
      const ansatz::AnsatzEvaluator evaluator(cfg.num_sites);
      variational::VariationalState state{
          ansatz::init_params(cfg.num_sites, cfg.alpha, cfg.beta, cfg.seed, cfg.hermitian_c),
          kind};

      std::optional<DensityMatrix> rk_state;
      if (cfg.rk_reference) rk_state = lindblad::maximally_mixed(cfg.num_sites);

      auto observer = [&](variational::IterationReport& report, const DensityMatrix& rho) {
        if (rk_state) {
          report.log_distance_to_reference =
              observables::frobenius_distance(rho, *rk_state).log_value;
          *rk_state = liou.rk4_step(*rk_state, cfg.dt_base);
        }
        detail::write_row(csv, report.iteration, report.time, report.magnetization,
                          report.cost, report.step_norm, report.dt_effective,
                          report.log_distance_to_reference);
        detail::log_progress(report.iteration, report.time, report.cost);
        final_n = report.iteration;
        final_t = report.time;
        final_cost = report.cost;
        final_mag = report.magnetization;
        final_ln_d = report.log_distance_to_reference;
      };

      variational::RunOptions run;
      run.max_iters = cfg.max_iters;
      run.cost_threshold = cfg.cost_threshold;
      run.seed = cfg.seed;

      if (cfg.mode == RunMode::rbm || cfg.mode == RunMode::invariant) {
        variational::TdvpOptions options;
        options.dt_base = cfg.dt_base;
        options.rcond = cfg.rcond;
        variational::run_tdvp(std::move(state), liou, evaluator, group, options, run, observer);
      } else {
        variational::GradientOptions options;
        options.learning_rate = cfg.dt_base;
        options.cost = variational::CostKind::normalized;
        options.natural = (cfg.mode == RunMode::natural_gradient);
        options.rcond = cfg.rcond;
        variational::run_gradient(std::move(state), liou, evaluator, group, options, run,
                                  observer);
      }
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::overflow_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }

  const double wall =
      std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - t_start).count();
  std::ofstream summary(fs::path(cfg.out_dir) / "summary.txt");
  summary << "olnqs summary\n";
  summary << "version=" << kVersion << '\n';
  detail::echo_config(summary, cfg);
  summary << "final_iteration=" << final_n << '\n';
  summary << "final_time=" << detail::fmt(final_t) << '\n';
  summary << "final_cost=" << detail::fmt(final_cost) << '\n';
  summary << "final_Mx=" << detail::fmt(final_mag.x) << '\n';
  summary << "final_My=" << detail::fmt(final_mag.y) << '\n';
  summary << "final_Mz=" << detail::fmt(final_mag.z) << '\n';
  if (final_ln_d) summary << "final_ln_d_rk=" << detail::fmt(*final_ln_d) << '\n';
  summary << "distance_normalization=trace\n";
  summary << "wall_seconds=" << detail::fmt(wall) << '\n';
  return 0;
}

}  // namespace olnqs::cli
