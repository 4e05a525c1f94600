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

#include "olnqs/hilbert.hpp"
#include "olnqs/symmetry.hpp"

namespace olnqs::observables {

/// Per-spin mean magnetization (M_x, M_y, M_z).
struct MagnetizationVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline DensityMatrix trace_normalize(const DensityMatrix& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw std::domain_error("degenerate trace");
  return rho / tr;
}

/// Tr[sigma^axis_site rho] / Tr[rho] for axis 0 = x, 1 = y, 2 = z,
/// evaluated from matrix elements without building the Pauli operator.
inline Complex site_expectation(const DensityMatrix& rho, int axis, int site) {
  using hilbert::flip_site;
  using hilbert::spin_at;
  const Eigen::Index dim = rho.rows();
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(dim))));
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw std::domain_error("degenerate trace");

  Complex sum = 0.0;
  for (Eigen::Index s = 0; s < dim; ++s) {
    const double spin = spin_at(s, site, n);
    switch (axis) {
      case 0:  // Tr[sx rho] = sum_s rho(flip s, s)
        sum += rho(flip_site(s, site, n), s);
        break;
      case 1:  // <s| sy = -i s_site <flip s|
        sum += Complex(0.0, -spin) * rho(flip_site(s, site, n), s);
        break;
      case 2:
        sum += spin * rho(s, s);
        break;
      default:
        throw std::invalid_argument("axis must be 0, 1 or 2");
    }
  }
  return sum / tr;
}

/// Complex-valued magnetization components before taking real parts; the
/// imaginary residue vanishes for Hermitian inputs.
struct RawMagnetization {
  Complex x{0.0};
  Complex y{0.0};
  Complex z{0.0};
};

inline RawMagnetization mean_magnetization_raw(const DensityMatrix& rho) {
  const Eigen::Index dim = rho.rows();
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(dim))));
  RawMagnetization raw;
  for (int j = 0; j < n; ++j) {
    raw.x += site_expectation(rho, 0, j);
    raw.y += site_expectation(rho, 1, j);
    raw.z += site_expectation(rho, 2, j);
  }
  raw.x /= n;
  raw.y /= n;
  raw.z /= n;
  return raw;
}

/// (1/N) sum_j Tr[sigma^k_j rho] / Tr[rho], k = x, y, z.
inline MagnetizationVector mean_magnetization(const DensityMatrix& rho) {
  const RawMagnetization raw = mean_magnetization_raw(rho);
  return MagnetizationVector{raw.x.real(), raw.y.real(), raw.z.real()};
}

struct DistanceResult {
  double value = 0.0;
  double log_value = 0.0;  // ln of the distance
};

/// Frobenius distance between the trace-normalized operands; the ansatz is
/// not trace-one, so both sides are normalized before comparing.
inline DistanceResult frobenius_distance(const DensityMatrix& rho_a,
                                         const DensityMatrix& rho_b) {
  if (rho_a.rows() != rho_b.rows() || rho_a.cols() != rho_b.cols()) {
    throw std::invalid_argument("distance operands differ in shape");
  }
  const double d = (trace_normalize(rho_a) - trace_normalize(rho_b)).norm();
  return DistanceResult{d, std::log(d)};
}

/// max_g ||g rho g† - rho||_F / ||rho||_F.
inline double symmetry_residual(const DensityMatrix& rho,
                                const symmetry::SymmetryGroup& group) {
  const double scale = rho.norm();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int g = 0; g < group.size(); ++g) {
    worst = std::max(worst, (group.conjugated(g, rho) - rho).norm() / scale);
  }
  return worst;
}

}  // namespace olnqs::observables
