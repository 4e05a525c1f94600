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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "olnqs/ansatz.hpp"
#include "olnqs/errors.hpp"
#include "olnqs/lindblad.hpp"
#include "olnqs/observables.hpp"

namespace olnqs::variational {

using ansatz::AnsatzEvaluator;
using ansatz::AnsatzKind;
using ansatz::RbmParameters;
using lindblad::Liouvillian;

struct VariationalState {
  RbmParameters params;
  AnsatzKind kind = AnsatzKind::plain_rbm;
  long iteration = 0;
  double time = 0.0;  // accumulated physical time, units of 1/gamma
};

/// Per-iteration telemetry. iteration/time/cost/magnetization describe the
/// state *evaluated* this step (before the parameter update is applied).
struct IterationReport {
  long iteration = 0;
  double time = 0.0;
  double step_norm = 0.0;     // ||S+ f||_2 of the real step vector
  double dt_effective = 0.0;  // adaptive step actually applied
  double cost = 0.0;          // normalized cost ||L rho||^2 / ||rho||^2
  observables::MagnetizationVector magnetization;
  std::optional<double> log_distance_to_reference;
};

/// S_ij = <t_i, t_j> + <t_j, t_i> = 2 Re Gram(i, j); real symmetric PSD.
inline Eigen::MatrixXd assemble_s_matrix(const Eigen::MatrixXcd& tangent_stack) {
  const Eigen::MatrixXd s = 2.0 * (tangent_stack.adjoint() * tangent_stack).real();
  return 0.5 * (s + s.transpose());
}

/// f_i = <t_i, L rho> + <L rho, t_i> = 2 Re <t_i, L rho>.
inline Eigen::VectorXd assemble_f_vector(const Eigen::MatrixXcd& tangent_stack,
                                         const Eigen::VectorXcd& lrho_vec) {
  if (tangent_stack.rows() != lrho_vec.size()) {
    throw std::invalid_argument("tangent stack and L[rho] vector differ in length");
  }
  return 2.0 * (tangent_stack.adjoint() * lrho_vec).real();
}

namespace detail {

inline Eigen::MatrixXcd stack_tangents(const std::vector<DensityMatrix>& tangents) {
  if (tangents.empty()) return {};
  const Eigen::Index rows = tangents.front().size();
  Eigen::MatrixXcd stack(rows, static_cast<Eigen::Index>(tangents.size()));
  for (std::size_t k = 0; k < tangents.size(); ++k) {
    if (tangents[k].size() != rows || tangents[k].rows() != tangents.front().rows()) {
      throw std::invalid_argument("tangent matrices differ in shape");
    }
    stack.col(static_cast<Eigen::Index>(k)) = hilbert::vectorize(tangents[k]);
  }
  return stack;
}

}  // namespace detail

inline Eigen::MatrixXd assemble_s_matrix(const std::vector<DensityMatrix>& tangents) {
  return assemble_s_matrix(detail::stack_tangents(tangents));
}

inline Eigen::VectorXd assemble_f_vector(const std::vector<DensityMatrix>& tangents,
                                         const DensityMatrix& lrho) {
  return assemble_f_vector(detail::stack_tangents(tangents), hilbert::vectorize(lrho));
}

/// Minimum-norm least-squares solution S+ f, with singular values below
/// rcond * sigma_max treated as zero.
inline Eigen::VectorXd pseudo_solve(const Eigen::MatrixXd& s, const Eigen::VectorXd& f,
                                    double rcond = 1e-12) {
  if (s.rows() != s.cols() || s.rows() != f.size()) {
    throw std::invalid_argument("pseudo_solve requires square S with matching f");
  }
  if (!s.allFinite() || !f.allFinite()) {
    throw NumericError("non-finite entries in the linear system");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rcond);
  return svd.solve(f);
}

/// Step-norm clamp: dt / N when the raw step norm N exceeds one, dt otherwise,
/// so the applied update never exceeds norm dt.
inline double adaptive_step(double dt_base, double step_norm) {
  if (!(dt_base > 0.0)) throw std::domain_error("dt_base must be positive");
  return (step_norm >= 1.0) ? dt_base / step_norm : dt_base;
}

inline double cost_unnormalized(const DensityMatrix& rho, const Liouvillian& liou) {
  return liou.apply(rho).squaredNorm();
}

inline double cost_normalized(const DensityMatrix& rho, const Liouvillian& liou) {
  const double norm2 = rho.squaredNorm();
  if (norm2 == 0.0) throw std::domain_error("cost of the zero matrix is undefined");
  return cost_unnormalized(rho, liou) / norm2;
}

enum class CostKind { normalized, unnormalized };

namespace detail {

// Shared gradient core. All inner products are taken at the evaluation's
// rescaled gauge; the normalized gradient is gauge-free as is, the
// unnormalized one is mapped back to the literal scale.
inline Eigen::VectorXd gradient_from_evaluation(const ansatz::AnsatzEvaluation& eval,
                                                const Liouvillian& liou, CostKind which) {
  const DensityMatrix lrho = liou.apply(eval.rho);
  const DensityMatrix m = liou.apply_adjoint(lrho);
  const Eigen::VectorXd g_quad =
      2.0 * (eval.tangent_stack.adjoint() * hilbert::vectorize(m)).real();
  if (which == CostKind::unnormalized) {
    return std::exp(2.0 * eval.log_scale) * g_quad;
  }
  const double norm2 = eval.rho.squaredNorm();
  const double cost = lrho.squaredNorm() / norm2;
  const Eigen::VectorXd overlap =
      2.0 * (eval.tangent_stack.adjoint() * hilbert::vectorize(eval.rho)).real();
  return (g_quad - cost * overlap) / norm2;
}

}  // namespace detail

/// Gradient of the chosen cost with respect to the real parameter vector,
/// built from the tangent stack and one adjoint Liouvillian application.
inline Eigen::VectorXd cost_gradient(const RbmParameters& params, AnsatzKind kind,
                                     const Liouvillian& liou,
                                     const AnsatzEvaluator& evaluator,
                                     const symmetry::SymmetryGroup* group,
                                     CostKind which) {
  const auto eval = evaluator.evaluate(params, kind, group);
  return detail::gradient_from_evaluation(eval, liou, which);
}

struct TdvpOptions {
  double dt_base = 1e-2;
  double rcond = 1e-12;
  double log_offset = 0.0;
};

/// One step of the pseudoinverse scheme: evaluate rho and tangents, apply
/// the Liouvillian, assemble S and f, then chi += dt(N) S+ f with
/// N = ||S+ f||_2. The invariant kind stays invariant structurally.
inline IterationReport tdvp_iterate(VariationalState& state, const Liouvillian& liou,
                                    const AnsatzEvaluator& evaluator,
                                    const symmetry::SymmetryGroup* group,
                                    const TdvpOptions& options = {},
                                    DensityMatrix* rho_out = nullptr) {
  ansatz::EvalOptions eval_options;
  eval_options.log_offset = options.log_offset;
  const auto eval = evaluator.evaluate(state.params, state.kind, group, eval_options);
#ifndef NDEBUG
  if (state.kind == AnsatzKind::invariant &&
      observables::symmetry_residual(eval.rho, *group) >= 1e-10) {
    throw std::logic_error("invariant ansatz lost its symmetry");
  }
#endif
  const DensityMatrix lrho = liou.apply(eval.rho);

  const Eigen::MatrixXd s = assemble_s_matrix(eval.tangent_stack);
  const Eigen::VectorXd f = assemble_f_vector(eval.tangent_stack, hilbert::vectorize(lrho));
  const Eigen::VectorXd z = pseudo_solve(s, f, options.rcond);
  const double step_norm = z.norm();
  const double dt_eff = adaptive_step(options.dt_base, step_norm);

  IterationReport report;
  report.iteration = state.iteration;
  report.time = state.time;
  report.step_norm = step_norm;
  report.dt_effective = dt_eff;
  report.cost = lrho.squaredNorm() / eval.rho.squaredNorm();
  report.magnetization = observables::mean_magnetization(eval.rho);

  Eigen::VectorXd chi = state.params.flatten();
  chi += dt_eff * z;
  state.params.unflatten(chi);
  ++state.iteration;
  state.time += dt_eff;

  if (rho_out) *rho_out = eval.rho;
  return report;
}

struct GradientOptions {
  double learning_rate = 1e-3;  // d_nu
  CostKind cost = CostKind::normalized;
  bool natural = false;  // precondition with S+ as in the pseudoinverse scheme
  double rcond = 1e-12;
  double log_offset = 0.0;
};

/// One steepest-descent step chi -= d_nu grad C; with `natural` set the
/// direction is S+ grad C and the adaptive step clamp is applied.
inline IterationReport gradient_iterate(VariationalState& state, const Liouvillian& liou,
                                        const AnsatzEvaluator& evaluator,
                                        const symmetry::SymmetryGroup* group,
                                        const GradientOptions& options = {},
                                        DensityMatrix* rho_out = nullptr) {
  ansatz::EvalOptions eval_options;
  eval_options.log_offset = options.log_offset;
  const auto eval = evaluator.evaluate(state.params, state.kind, group, eval_options);
  const Eigen::VectorXd grad = detail::gradient_from_evaluation(eval, liou, options.cost);

  Eigen::VectorXd direction;
  double step_norm = 0.0, dt_eff = 0.0;
  if (options.natural) {
    const Eigen::MatrixXd s = assemble_s_matrix(eval.tangent_stack);
    direction = pseudo_solve(s, grad, options.rcond);
    step_norm = direction.norm();
    dt_eff = adaptive_step(options.learning_rate, step_norm);
  } else {
    direction = grad;
    step_norm = grad.norm();
    dt_eff = options.learning_rate;
  }

  IterationReport report;
  report.iteration = state.iteration;
  report.time = state.time;
  report.step_norm = step_norm;
  report.dt_effective = dt_eff;
  report.cost = liou.apply(eval.rho).squaredNorm() / eval.rho.squaredNorm();
  report.magnetization = observables::mean_magnetization(eval.rho);

  Eigen::VectorXd chi = state.params.flatten();
  chi -= dt_eff * direction;
  state.params.unflatten(chi);
  ++state.iteration;
  state.time += dt_eff;

  if (rho_out) *rho_out = eval.rho;
  return report;
}

struct RunOptions {
  long max_iters = 1000;
  double cost_threshold = 1e-10;  // stop early once the normalized cost drops below
  long checkpoint_every = 0;      // 0 disables checkpointing
  std::string checkpoint_path;
  std::uint64_t seed = 0;  // recorded in checkpoints
};

/// The observer may fill in report fields (e.g. the reference distance)
/// before the caller logs them; it also sees the evaluated state.
using IterationObserver = std::function<void(IterationReport&, const DensityMatrix&)>;

namespace detail {

template <typename StepFn>
VariationalState run_loop(VariationalState state, const RunOptions& run, StepFn&& step,
                          const IterationObserver& observer) {
  for (long it = 0; it < run.max_iters; ++it) {
    DensityMatrix rho;
    IterationReport report;
    try {
      report = step(state, rho);
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(state.iteration) + ": " + e.what());
    }
    if (observer) observer(report, rho);
    if (run.checkpoint_every > 0 && (it + 1) % run.checkpoint_every == 0 &&
        !run.checkpoint_path.empty()) {
      ansatz::write_checkpoint(run.checkpoint_path,
                               {state.params, state.kind, state.iteration, state.time, run.seed});
    }
    if (report.cost < run.cost_threshold) break;
  }
  return state;
}

}  // namespace detail

inline VariationalState run_tdvp(VariationalState state, const Liouvillian& liou,
                                 const AnsatzEvaluator& evaluator,
                                 const symmetry::SymmetryGroup* group,
                                 const TdvpOptions& options, const RunOptions& run,
                                 const IterationObserver& observer = {}) {
  return detail::run_loop(
      std::move(state), run,
      [&](VariationalState& st, DensityMatrix& rho) {
        return tdvp_iterate(st, liou, evaluator, group, options, &rho);
      },
      observer);
}

inline VariationalState run_gradient(VariationalState state, const Liouvillian& liou,
                                     const AnsatzEvaluator& evaluator,
                                     const symmetry::SymmetryGroup* group,
                                     const GradientOptions& options, const RunOptions& run,
                                     const IterationObserver& observer = {}) {
  return detail::run_loop(
      std::move(state), run,
      [&](VariationalState& st, DensityMatrix& rho) {
        return gradient_iterate(st, liou, evaluator, group, options, &rho);
      },
      observer);
}

}  // namespace olnqs::variational
