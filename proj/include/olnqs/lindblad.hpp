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

#include <functional>
#include <stdexcept>
#include <string>

#include "olnqs/hilbert.hpp"

namespace olnqs::lindblad {

/// Dissipative XYZ chain: nearest-neighbour couplings J = (J_x, J_y, J_z)
/// and uniform field B = (B_x, B_y, B_z), both in units of gamma, with
/// uniform single-site decay of rate gamma. Periodic boundary conditions
/// are implied, never stored.
struct LindbladModel {
  int num_sites = 0;
  Eigen::Vector3d coupling = Eigen::Vector3d::Zero();
  Eigen::Vector3d field = Eigen::Vector3d::Zero();
  double gamma = 1.0;

  void validate() const {
    if (num_sites < 2) throw std::domain_error("model requires at least 2 sites");
    if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
  }
};

/// H = sum_i sum_{k=x,y,z} (J_k sigma^k_i sigma^k_{i+1} + B_k sigma^k_i)
/// with periodic wrap. The i sum runs over all N sites, so at N=2 the single
/// bond is counted twice; the formula is implemented literally.
inline DensityMatrix build_hamiltonian(const LindbladModel& model) {
  using hilbert::flip_site;
  using hilbert::spin_at;
  const int n = model.num_sites;
  const std::size_t dim = hilbert::dimension(n);
  const double jx = model.coupling[0], jy = model.coupling[1], jz = model.coupling[2];
  const double bx = model.field[0], by = model.field[1], bz = model.field[2];

  DensityMatrix h = DensityMatrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    for (std::size_t s = 0; s < dim; ++s) {
      const double si = spin_at(s, i, n);
      const double sip = spin_at(s, ip, n);
      // zz bond and z field act diagonally.
      h(s, s) += jz * si * sip + bz * si;
      // xx and yy bonds both flip the two bond sites.
      const std::size_t s2 = flip_site(flip_site(s, i, n), ip, n);
      h(s2, s) += Complex(jx - jy * si * sip, 0.0);
      // x and y fields flip one site; sigma^y_i |s> = i s_i |flip_i s>.
      h(flip_site(s, i, n), s) += Complex(bx, by * si);
    }
  }
  return h;
}

inline DensityMatrix maximally_mixed(int num_sites) {
  const auto dim = static_cast<Eigen::Index>(hilbert::dimension(num_sites));
  return DensityMatrix::Identity(dim, dim) / static_cast<double>(dim);
}

/// Applies the generator of the master equation and its adjoint without ever
/// materializing the dim^2 x dim^2 superoperator: the Hamiltonian enters
/// through two dense products, the dissipator through an elementwise sweep.
class Liouvillian {
 public:
  explicit Liouvillian(const LindbladModel& model)
      : model_(model), hamiltonian_(build_hamiltonian(model)) {}

  const LindbladModel& model() const { return model_; }
  const DensityMatrix& hamiltonian() const { return hamiltonian_; }
  Eigen::Index dim() const { return hamiltonian_.rows(); }

  /// L[rho] = -i[H, rho] + gamma sum_j (s-_j rho s+_j - {s+_j s-_j, rho}/2).
  DensityMatrix apply(const DensityMatrix& rho) const {
    check_shape(rho);
    DensityMatrix out = Complex(0, -1) * (hamiltonian_ * rho - rho * hamiltonian_);
    add_dissipator(rho, out, /*adjoint=*/false);
    return out;
  }

  /// L†[a] = +i[H, a] + gamma sum_j (s+_j a s-_j - {s+_j s-_j, a}/2), the
  /// Frobenius adjoint: <L†[a], b> = <a, L[b]> for all a, b.
  DensityMatrix apply_adjoint(const DensityMatrix& a) const {
    check_shape(a);
    DensityMatrix out = Complex(0, +1) * (hamiltonian_ * a - a * hamiltonian_);
    add_dissipator(a, out, /*adjoint=*/true);
    return out;
  }

  /// One classical fourth-order Runge-Kutta step of d rho/dt = L[rho].
  DensityMatrix rk4_step(const DensityMatrix& rho, double dt) const {
    if (!(dt > 0.0)) throw std::domain_error("rk4 step requires dt > 0");
    const DensityMatrix k1 = apply(rho);
    const DensityMatrix k2 = apply(rho + (0.5 * dt) * k1);
    const DensityMatrix k3 = apply(rho + (0.5 * dt) * k2);
    const DensityMatrix k4 = apply(rho + dt * k3);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  using StepObserver = std::function<void(long n, double t, const DensityMatrix&)>;

  /// Fixed-step RK4 loop; the observer sees (n, t_n = n dt, rho_n) after
  /// every step, n = 1..n_steps.
  DensityMatrix evolve(DensityMatrix rho, double dt, long n_steps,
                       const StepObserver& observer = {}) const {
    for (long n = 1; n <= n_steps; ++n) {
      rho = rk4_step(rho, dt);
      if (observer) observer(n, dt * static_cast<double>(n), rho);
    }
    return rho;
  }

  /// Integrates until ||L[rho]||_F / ||rho||_F drops below `tol` (checked
  /// every `check_every` steps) or `max_steps` is exhausted.
  DensityMatrix relax_to_steady_state(DensityMatrix rho, double dt, double tol,
                                      long max_steps, long check_every = 50) const {
    for (long n = 1; n <= max_steps; ++n) {
      rho = rk4_step(rho, dt);
      if (n % check_every == 0 && apply(rho).norm() <= tol * rho.norm()) break;
    }
    return rho;
  }

 private:
  void check_shape(const DensityMatrix& rho) const {
    if (rho.rows() != dim() || rho.cols() != dim()) {
      throw std::invalid_argument("density matrix shape " +
                                  std::to_string(rho.rows()) + "x" +
                                  std::to_string(rho.cols()) +
                                  " does not match dim " + std::to_string(dim()));
    }
  }

  // Dissipator in matrix-element form. Forward direction: amplitude flows
  // from pairs with site j up to pairs with site j down. Adjoint swaps the
  // flow direction; the anticommutator half is shared.
  void add_dissipator(const DensityMatrix& in, DensityMatrix& out, bool adjoint) const {
    using hilbert::flip_site;
    using hilbert::spin_at;
    const int n = model_.num_sites;
    const double g = model_.gamma;
    const auto d = static_cast<std::size_t>(dim());
    for (int j = 0; j < n; ++j) {
      for (std::size_t t = 0; t < d; ++t) {
        const bool t_up = spin_at(t, j, n) > 0;
        for (std::size_t s = 0; s < d; ++s) {
          const bool s_up = spin_at(s, j, n) > 0;
          const double occupation = (s_up ? 1.0 : 0.0) + (t_up ? 1.0 : 0.0);
          Complex v = (-0.5 * g * occupation) * in(s, t);
          if (!adjoint && !s_up && !t_up) {
            v += g * in(flip_site(s, j, n), flip_site(t, j, n));
          } else if (adjoint && s_up && t_up) {
            v += g * in(flip_site(s, j, n), flip_site(t, j, n));
          }
          out(s, t) += v;
        }
      }
    }
  }

  LindbladModel model_;
  DensityMatrix hamiltonian_;
};

}  // namespace olnqs::lindblad
