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

// Gate suite: runs the project's nine acceptance checks end to end and
// prints one PASS/FAIL line per criterion. Exit code is the number of
// failures. `--only k[,k...]` restricts the run while developing.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "olnqs/experiment.hpp"
#include "olnqs/observables.hpp"
#include "olnqs/variational.hpp"
#include "oracles.hpp"

using namespace olnqs;
using ansatz::AnsatzEvaluator;
using ansatz::AnsatzKind;
using lindblad::LindbladModel;
using lindblad::Liouvillian;
using observables::MagnetizationVector;
using symmetry::SymmetryGroup;
namespace var = olnqs::variational;

namespace {

// Run configuration of the two reproduction studies, mirroring the shipped
// configs/fig*.cfg files: 7000-iteration budgets, and the per-ansatz
// pseudoinverse cutoff (alpha=2 networks carry more near-degenerate tangent
// directions and run with the finer cutoff).
constexpr long kBudget = 7000;
constexpr double kDtBase = 1e-2;
constexpr double kRcondAlpha1 = 1e-5;
constexpr double kRcondAlpha2 = 1e-6;
constexpr std::uint64_t kSeed = 1;

const LindbladModel kChainN5{5, {1.4, 2.0, 1.0}, {-1.0, 1.0, 0.1}, 1.0};
const LindbladModel kChainN4{4, {1.3, 0.1, 1.0}, {0.7, 0.3, 0.1}, 1.0};

// Steady-state magnetization fixtures, frozen from converged reference
// evolutions (dt = 1e-2, residual cost < 1e-20) and cross-validated against
// the dense superoperator null space.
const MagnetizationVector kSteadyN5{0.0911184398, -0.3943785536, -0.1496095409};
const MagnetizationVector kSteadyN4{-0.0339679890, 0.2783348751, -0.1416198505};

struct Reporter {
  int failures = 0;
  int ran = 0;

  void report(int id, const std::string& name, bool ok, const std::string& detail,
              double seconds) {
    std::printf("[%s] criterion %d: %s — %s (%.1f s)\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    ++ran;
    if (!ok) ++failures;
  }
};

struct VariationalOutcome {
  var::VariationalState state;
  DensityMatrix rho;                     // final evaluated matrix
  double final_log_distance = 0.0;       // vs the lockstep reference trajectory
  double worst_symmetry_residual = 0.0;  // over every logged iterate
  MagnetizationVector magnetization;
};

// One reproduction run with a lockstep fixed-step reference evolution,
// mirroring what the CLI does for rk_reference configs.
VariationalOutcome run_study(const LindbladModel& model, AnsatzKind kind, double alpha,
                             long budget, const SymmetryGroup* group, double rcond) {
  const Liouvillian liou(model);
  const AnsatzEvaluator evaluator(model.num_sites);

  DensityMatrix reference = lindblad::maximally_mixed(model.num_sites);
  VariationalOutcome out{
      {ansatz::init_params(model.num_sites, alpha, alpha, kSeed), kind}, {}, 0.0, 0.0, {}};
  var::TdvpOptions options;
  options.dt_base = kDtBase;
  options.rcond = rcond;
  var::RunOptions run;
  run.max_iters = budget;
  run.cost_threshold = 1e-10;

  out.state = var::run_tdvp(
      std::move(out.state), liou, evaluator, group, options, run,
      [&](var::IterationReport& report, const DensityMatrix& rho) {
        report.log_distance_to_reference =
            observables::frobenius_distance(rho, reference).log_value;
        reference = liou.rk4_step(reference, kDtBase);
        out.final_log_distance = *report.log_distance_to_reference;
        out.magnetization = report.magnetization;
        if (group) {
          out.worst_symmetry_residual = std::max(
              out.worst_symmetry_residual, observables::symmetry_residual(rho, *group));
        }
        out.rho = rho;
      });
  return out;
}

double mag_error(const MagnetizationVector& a, const MagnetizationVector& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

int main(int argc, char** argv) {
  // Single-threaded dense algebra: the reproduction runs are chaotic enough
  // that a different gemm summation order lands on a different plateau, and
  // the frozen expectations below were produced single-threaded.
  Eigen::setNbThreads(1);

  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (int id; ss >> id;) {
        only.insert(id);
        if (ss.peek() == ',') ss.ignore();
      }
    }
  }
  auto enabled = [&](int id) { return only.empty() || only.count(id) > 0; };

  Reporter reporter;
  using clock = std::chrono::steady_clock;
  auto timed = [&](int id, const std::string& name, auto&& body) {
    if (!enabled(id)) return;
    const auto t0 = clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - t0).count();
    reporter.report(id, name, ok, detail, secs);
  };

  // Shared state across the reproduction criteria.
  VariationalOutcome inv_n5, rbm_n5;
  bool have_n5 = false;

  timed(1, "parameter-count table reproduction", [&](std::string& detail) {
    const auto t0 = clock::now();
    std::ostringstream os;
    cli::table1_report(8, os, /*csv=*/true);
    const double secs =
        std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - t0).count();

    const long expected_np1[] = {14, 27, 44, 65, 90, 119, 152};
    const long expected_np2[] = {26, 51, 84, 125, 174, 231, 296};
    const long expected_dim[] = {10, 20, 55, 136, 430, 1300, 4435};
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);  // header
    bool ok = true;
    for (int n = 2; n <= 8; ++n) {
      std::getline(is, line);
      std::vector<std::string> cells;
      std::stringstream row(line);
      for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
      if (cells.size() != 5) {
        ok = false;
        continue;
      }
      const bool flagged = cells[1].back() == '*';
      if (flagged) cells[1].pop_back();
      ok = ok && std::stol(cells[0]) == n && std::stol(cells[1]) == expected_np1[n - 2] &&
           std::stol(cells[2]) == expected_np2[n - 2] &&
           std::stol(cells[3]) == expected_dim[n - 2] &&
           std::stol(cells[4]) == (1L << (2 * n)) && flagged == (n == 8);
    }
    std::getline(is, line);
    ok = ok && line.find("152") != std::string::npos && line.find("132") != std::string::npos;
    ok = ok && secs < 1.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "values exact, N=8 cell flagged, %.3f s", secs);
    detail = buf;
    return ok;
  });

  timed(2, "weak-symmetry residual", [&](std::string& detail) {
    double worst = 0.0;
    for (int n = 2; n <= 6; ++n) {
      LindbladModel model = kChainN5;
      model.num_sites = n;
      worst = std::max(worst, symmetry::check_weak_symmetry(model, SymmetryGroup::build(n)));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max residual %.2e", worst);
    detail = buf;
    return worst < 1e-12;
  });

  timed(3, "dense-superoperator oracle equivalence", [&](std::string& detail) {
    std::mt19937_64 rng(2026);
    bool ok = true;
    double worst_mag_err = 0.0;
    for (int n = 2; n <= 4; ++n) {
      LindbladModel model = kChainN4;
      model.num_sites = n;
      const Liouvillian liou(model);
      const Eigen::MatrixXcd m = oracles::dense_liouvillian_matrix(model);
      for (int rep = 0; rep < 5; ++rep) {
        const DensityMatrix rho = oracles::random_matrix(liou.dim(), rng);
        ok = ok && (hilbert::vectorize(liou.apply(rho)) - m * hilbert::vectorize(rho)).norm() <
                       1e-12 * rho.norm();
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      ok = ok && sv(sv.size() - 2) > 1e-6 * sv(0);

      const DensityMatrix null_state = observables::trace_normalize(
          hilbert::matricize(svd.matrixV().col(m.cols() - 1), liou.dim()));
      const DensityMatrix rk_state =
          liou.relax_to_steady_state(lindblad::maximally_mixed(n), 1e-2, 1e-11, 40000);
      const double err = mag_error(observables::mean_magnetization(null_state),
                                   observables::mean_magnetization(rk_state));
      worst_mag_err = std::max(worst_mag_err, err);
      ok = ok && err < 1e-6;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "null-vector vs reference magnetization max err %.2e",
                  worst_mag_err);
    detail = buf;
    return ok;
  });

  timed(4, "tangent correctness", [&](std::string& detail) {
    const int n = 3;
    const auto group = SymmetryGroup::build(n);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      for (auto kind : {AnsatzKind::plain_rbm, AnsatzKind::invariant}) {
        const auto params = ansatz::init_params(n, 1.0, 1.0, seed);
        const auto analytic = ansatz::tangent_vectors(params, kind, &group);
        const auto numeric = oracles::finite_difference_tangents(params, kind, &group);
        double floor = 0.0;
        for (const auto& t : analytic) floor = std::max(floor, t.norm());
        floor *= 1e-12;
        for (std::size_t k = 0; k < analytic.size(); ++k) {
          worst = std::max(worst, (analytic[k] - numeric[k]).norm() /
                                      std::max(analytic[k].norm(), floor));
        }
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max relative tangent error %.2e", worst);
    detail = buf;
    return worst < 1e-6;
  });

  timed(5, "N=5 reproduction and expressivity comparison", [&](std::string& detail) {
    const Liouvillian liou(kChainN5);
    const DensityMatrix rk_steady = liou.evolve(lindblad::maximally_mixed(5), kDtBase, 4000);
    const auto rk_mag = observables::mean_magnetization(rk_steady);
    if (mag_error(rk_mag, kSteadyN5) > 1e-6) {
      detail = "reference integrator drifted from its frozen fixture";
      return false;
    }

    const auto group = SymmetryGroup::build(5);
    inv_n5 = run_study(kChainN5, AnsatzKind::invariant, 1.0, kBudget, &group, kRcondAlpha1);
    rbm_n5 = run_study(kChainN5, AnsatzKind::plain_rbm, 1.0, kBudget, nullptr, kRcondAlpha1);
    have_n5 = true;

    const double distance = observables::frobenius_distance(inv_n5.rho, rk_steady).value;
    const double err = mag_error(inv_n5.magnetization, rk_mag);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "distance %.4f, max |dM| %.4f, ln_d inv %.2f vs plain %.2f", distance, err,
                  inv_n5.final_log_distance, rbm_n5.final_log_distance);
    detail = buf;
    return distance < 5e-2 && err < 2e-2 &&
           inv_n5.final_log_distance < rbm_n5.final_log_distance;
  });

  timed(6, "N=4 reproduction and hidden-density trend", [&](std::string& detail) {
    const Liouvillian liou(kChainN4);
    const DensityMatrix rk_steady = liou.evolve(lindblad::maximally_mixed(4), kDtBase, 4000);
    const auto rk_mag = observables::mean_magnetization(rk_steady);
    if (mag_error(rk_mag, kSteadyN4) > 1e-6) {
      detail = "reference integrator drifted from its frozen fixture";
      return false;
    }

    const auto group = SymmetryGroup::build(4);
    const auto alpha1 = run_study(kChainN4, AnsatzKind::invariant, 1.0, kBudget, &group, kRcondAlpha1);
    const auto alpha2 = run_study(kChainN4, AnsatzKind::invariant, 2.0, kBudget, &group, kRcondAlpha2);
    const double err1 = mag_error(alpha1.magnetization, rk_mag);
    const double err2 = mag_error(alpha2.magnetization, rk_mag);
    const double d1 = observables::frobenius_distance(alpha1.rho, rk_steady).value;
    const double d2 = observables::frobenius_distance(alpha2.rho, rk_steady).value;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max |dM| %.4f (a=1) %.4f (a=2), distance %.4f vs %.4f",
                  err1, err2, d1, d2);
    detail = buf;
    return err1 < 2e-2 && err2 < 2e-2 && d2 <= d1;
  });

  timed(7, "symmetry preservation along the optimization", [&](std::string& detail) {
    if (!have_n5) {
      const auto group = SymmetryGroup::build(5);
      inv_n5 = run_study(kChainN5, AnsatzKind::invariant, 1.0, kBudget, &group, kRcondAlpha1);
      have_n5 = true;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst residual %.2e", inv_n5.worst_symmetry_residual);
    detail = buf;
    return inv_n5.worst_symmetry_residual < 1e-10;
  });

  timed(8, "scale-gauge invariance of the iteration report", [&](std::string& detail) {
    const Liouvillian liou(kChainN5);
    const auto group = SymmetryGroup::build(5);
    const AnsatzEvaluator evaluator(5);
    var::TdvpOptions options;
    options.dt_base = kDtBase;
    options.rcond = kRcondAlpha1;

    // Warm up a short distance from the initialization point, then apply
    // one iteration with and without the injected factor 1e+-30.
    var::VariationalState warm{ansatz::init_params(5, 1.0, 1.0, kSeed),
                               AnsatzKind::invariant};
    for (int it = 0; it < 50; ++it) var::tdvp_iterate(warm, liou, evaluator, &group, options);

    auto probe = [&](double offset) {
      var::VariationalState state = warm;
      var::TdvpOptions shifted = options;
      shifted.log_offset = offset;
      return var::tdvp_iterate(state, liou, evaluator, &group, shifted);
    };
    const auto base = probe(0.0);
    double worst = 0.0;
    bool ok = true;
    for (double offset : {30.0 * std::log(10.0), -30.0 * std::log(10.0)}) {
      const auto rep = probe(offset);
      for (auto [a, b] : {std::pair{rep.time, base.time},
                          {rep.step_norm, base.step_norm},
                          {rep.dt_effective, base.dt_effective},
                          {rep.cost, base.cost},
                          {rep.magnetization.x, base.magnetization.x},
                          {rep.magnetization.y, base.magnetization.y},
                          {rep.magnetization.z, base.magnetization.z}}) {
        ok = ok && close_rel(a, b, 1e-10);
        worst =
            std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst relative field deviation %.2e", worst);
    detail = buf;
    return ok;
  });

  timed(9, "property suite", [&](std::string& detail) {
    std::mt19937_64 rng(4096);
    std::string failed;

    // Trace annihilation and hermiticity preservation up to N=6.
    for (int n = 2; n <= 6; ++n) {
      LindbladModel model = kChainN5;
      model.num_sites = n;
      const Liouvillian liou(model);
      for (int rep = 0; rep < 3; ++rep) {
        const DensityMatrix rho = oracles::random_matrix(liou.dim(), rng);
        const DensityMatrix lrho = liou.apply(rho);
        if (std::abs(lrho.trace()) > 1e-12 * rho.norm()) failed += " trace";
        if ((lrho.adjoint() - liou.apply(rho.adjoint())).norm() > 1e-12 * rho.norm())
          failed += " hermiticity";
      }
    }

    // Integrator order on the N=2 model.
    {
      const Liouvillian liou(LindbladModel{2, kChainN4.coupling, kChainN4.field, 1.0});
      const DensityMatrix rho0 = observables::trace_normalize(
          oracles::random_hermitian(4, rng) + 8.0 * DensityMatrix::Identity(4, 4));
      auto endpoint = [&](double dt) { return liou.evolve(rho0, dt, std::lround(0.4 / dt)); };
      const DensityMatrix reference = endpoint(3.125e-4);
      const double e1 = (endpoint(0.05) - reference).norm();
      const double e2 = (endpoint(0.025) - reference).norm();
      const double order = std::log2(e1 / e2);
      if (order < 3.7 || order > 4.3) failed += " rk-order";
    }

    // Pseudoinverse least-squares minimality on a rank-deficient system.
    {
      std::normal_distribution<double> normal;
      Eigen::MatrixXd basis(6, 6);
      for (Eigen::Index j = 0; j < 6; ++j)
        for (Eigen::Index i = 0; i < 6; ++i) basis(i, j) = normal(rng);
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(basis).householderQ();
      Eigen::VectorXd evals(6);
      evals << 2.5, 1.0, 0.4, 0.0, 0.0, 0.0;
      const Eigen::MatrixXd s = q * evals.asDiagonal() * q.transpose();
      Eigen::VectorXd f(6);
      for (Eigen::Index i = 0; i < 6; ++i) f(i) = normal(rng);
      const Eigen::VectorXd z = var::pseudo_solve(s, f);
      for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd y(6);
        for (Eigen::Index i = 0; i < 6; ++i) y(i) = normal(rng);
        if ((s * z - f).norm() > (s * y - f).norm() + 1e-12) failed += " pinv-ls";
      }
      if ((q.rightCols(3).transpose() * z).norm() > 1e-10 * z.norm()) failed += " pinv-norm";
    }

    // Burnside vs explicit enumeration.
    for (int n = 2; n <= 6; ++n) {
      const auto group = SymmetryGroup::build(n);
      if (symmetry::invariant_dimension(group) != symmetry::orbit_table(group).orbit_count())
        failed += " burnside";
    }

    detail = failed.empty()
                 ? "trace, hermiticity, rk order, pseudoinverse, burnside all green"
                 : ("failed:" + failed);
    return failed.empty();
  });

  std::printf("%d of %d criteria failed\n", reporter.failures, reporter.ran);
  return reporter.failures;
}
