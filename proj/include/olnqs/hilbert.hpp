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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace olnqs {

using Complex = std::complex<double>;

/// Dense matrix of basis-pair amplitudes. Used alike for states rho,
/// Liouvillian images and tangent directions; physical states are Hermitian
/// and, once normalized, trace-one.
using DensityMatrix = Eigen::MatrixXcd;

namespace hilbert {

/// One element |sigma> of the sigma_z product basis. spins[j] is the
/// orientation (+1 or -1) of site j, 0-based.
struct SpinConfiguration {
  std::vector<int> spins;

  int size() const { return static_cast<int>(spins.size()); }
  bool operator==(const SpinConfiguration&) const = default;
};

/// A projector label |sigma><eta|. Both members must have the same length.
struct BasisPair {
  SpinConfiguration bra;  // sigma
  SpinConfiguration ket;  // eta
};

inline std::size_t dimension(int num_sites) {
  return std::size_t{1} << num_sites;
}

// Global bit convention, shared by every module: site 0 occupies the most
// significant bit of the basis index, and a 0 bit encodes spin up (+1).
// Index 0 is therefore the all-up configuration.

inline int spin_at(std::size_t index, int site, int num_sites) {
  return ((index >> (num_sites - 1 - site)) & 1u) ? -1 : +1;
}

inline std::size_t flip_site(std::size_t index, int site, int num_sites) {
  return index ^ (std::size_t{1} << (num_sites - 1 - site));
}

inline SpinConfiguration index_to_config(std::size_t index, int num_sites) {
  if (index >= dimension(num_sites)) {
    throw std::out_of_range("basis index " + std::to_string(index) +
                            " out of range for " + std::to_string(num_sites) +
                            " sites");
  }
  SpinConfiguration cfg;
  cfg.spins.resize(num_sites);
  for (int j = 0; j < num_sites; ++j) cfg.spins[j] = spin_at(index, j, num_sites);
  return cfg;
}

inline std::size_t config_to_index(const SpinConfiguration& cfg) {
  std::size_t index = 0;
  for (int spin : cfg.spins) index = (index << 1) | (spin < 0 ? 1u : 0u);
  return index;
}

/// Row-major (bra-major) pair index: |sigma><eta| lives at
/// index(sigma) * 2^N + index(eta) of the vectorized basis.
inline std::size_t pair_index(std::size_t bra_index, std::size_t ket_index,
                              int num_sites) {
  return bra_index * dimension(num_sites) + ket_index;
}

inline std::size_t pair_index(const BasisPair& pair) {
  if (pair.bra.size() != pair.ket.size()) {
    throw std::invalid_argument("basis pair members differ in length");
  }
  return pair_index(config_to_index(pair.bra), config_to_index(pair.ket),
                    pair.bra.size());
}

/// Vectorization fixed by pair_index: vec(rho)[pair_index(s, t)] = rho(s, t).
/// With this convention vec(A rho B) = (A kron B^T) vec(rho), which is how
/// tests build the dense superoperator.
inline Eigen::VectorXcd vectorize(const DensityMatrix& rho) {
  const Eigen::Index dim = rho.rows();
  Eigen::VectorXcd v(dim * dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    for (Eigen::Index t = 0; t < dim; ++t) v(s * dim + t) = rho(s, t);
  return v;
}

inline DensityMatrix matricize(const Eigen::VectorXcd& v, Eigen::Index dim) {
  if (v.size() != dim * dim) {
    throw std::invalid_argument("vector length does not match dim^2");
  }
  DensityMatrix rho(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    for (Eigen::Index t = 0; t < dim; ++t) rho(s, t) = v(s * dim + t);
  return rho;
}

}  // namespace hilbert
}  // namespace olnqs
