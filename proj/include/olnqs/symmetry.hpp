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

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <random>
#include <set>
#include <vector>

#include "olnqs/hilbert.hpp"
#include "olnqs/lindblad.hpp"

namespace olnqs::symmetry {

/// A permutation of the lattice sites: map[i] is the destination site of
/// site i (0-based). Always a bijection of {0, ..., N-1}.
struct SitePermutation {
  std::vector<int> map;

  int size() const { return static_cast<int>(map.size()); }
  bool operator==(const SitePermutation&) const = default;
  bool operator<(const SitePermutation& other) const { return map < other.map; }
};

inline SitePermutation identity_permutation(int num_sites) {
  SitePermutation p;
  p.map.resize(num_sites);
  for (int i = 0; i < num_sites; ++i) p.map[i] = i;
  return p;
}

/// Chain translation: site i moves to site i+1 (periodic).
inline SitePermutation translation_generator(int num_sites) {
  SitePermutation p;
  p.map.resize(num_sites);
  for (int i = 0; i < num_sites; ++i) p.map[i] = (i + 1) % num_sites;
  return p;
}

/// Full reversal of the chain.
inline SitePermutation reflection_generator(int num_sites) {
  SitePermutation p;
  p.map.resize(num_sites);
  for (int i = 0; i < num_sites; ++i) p.map[i] = num_sites - 1 - i;
  return p;
}

/// compose(a, b): apply b first, then a.
inline SitePermutation compose(const SitePermutation& a, const SitePermutation& b) {
  SitePermutation out;
  out.map.resize(b.size());
  for (int i = 0; i < b.size(); ++i) out.map[i] = a.map[b.map[i]];
  return out;
}

inline hilbert::SpinConfiguration permute(const SitePermutation& g,
                                          const hilbert::SpinConfiguration& cfg) {
  hilbert::SpinConfiguration out;
  out.spins.resize(cfg.spins.size());
  for (int i = 0; i < cfg.size(); ++i) out.spins[g.map[i]] = cfg.spins[i];
  return out;
}

/// (s_1, ..., s_N) -> (s_N, s_1, ..., s_{N-1})
inline hilbert::SpinConfiguration translation_apply(const hilbert::SpinConfiguration& cfg) {
  return permute(translation_generator(cfg.size()), cfg);
}

/// (s_1, ..., s_N) -> (s_N, ..., s_1); an involution.
inline hilbert::SpinConfiguration reflection_apply(const hilbert::SpinConfiguration& cfg) {
  return permute(reflection_generator(cfg.size()), cfg);
}

/// The weak-symmetry group of the periodic chain: Z_2 (identity + swap) for
/// N = 2, the dihedral group of 2N elements {T^k, R T^k} for N >= 3.
/// Permutations act on basis indices through precomputed index maps; dense
/// permutation matrices are never formed.
class SymmetryGroup {
 public:
  static SymmetryGroup build(int num_sites) {
    if (num_sites < 2) throw std::domain_error("symmetry group requires N >= 2");
    const SitePermutation t = translation_generator(num_sites);
    const SitePermutation r = reflection_generator(num_sites);

    std::set<SitePermutation> seen;
    std::vector<SitePermutation> elements;
    auto add = [&](const SitePermutation& g) {
      if (seen.insert(g).second) elements.push_back(g);
    };
    add(identity_permutation(num_sites));
    SitePermutation power = identity_permutation(num_sites);
    for (int k = 1; k <= num_sites; ++k) {
      power = compose(t, power);
      add(power);               // rotations T^k
      add(compose(r, power));   // reflections R T^k
    }

    SymmetryGroup group;
    group.num_sites_ = num_sites;
    group.elements_ = std::move(elements);
    group.verify_closure();
    group.build_index_maps();
    return group;
  }

  int num_sites() const { return num_sites_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const std::vector<SitePermutation>& elements() const { return elements_; }

  /// Basis-index permutation of element g: index_map(g)[s] is the index of
  /// the configuration obtained by applying g to configuration s.
  const std::vector<std::int32_t>& index_map(int element) const {
    return index_maps_[element];
  }

  /// g rho g† for the permutation operator g|s> = |g(s)>.
  DensityMatrix conjugated(int element, const DensityMatrix& rho) const {
    const auto& perm = index_maps_[element];
    DensityMatrix out(rho.rows(), rho.cols());
    for (Eigen::Index t = 0; t < rho.cols(); ++t)
      for (Eigen::Index s = 0; s < rho.rows(); ++s)
        out(perm[s], perm[t]) = rho(s, t);
    return out;
  }

 private:
  void verify_closure() const {
    std::set<SitePermutation> members(elements_.begin(), elements_.end());
    for (const auto& a : elements_)
      for (const auto& b : elements_)
        if (!members.count(compose(a, b)))
          throw std::logic_error("symmetry group is not closed under composition");
  }

  void build_index_maps() {
    const std::size_t dim = hilbert::dimension(num_sites_);
    index_maps_.resize(elements_.size());
    for (std::size_t g = 0; g < elements_.size(); ++g) {
      index_maps_[g].resize(dim);
      for (std::size_t s = 0; s < dim; ++s) {
        index_maps_[g][s] = static_cast<std::int32_t>(hilbert::config_to_index(
            permute(elements_[g], hilbert::index_to_config(s, num_sites_))));
      }
    }
  }

  int num_sites_ = 0;
  std::vector<SitePermutation> elements_;
  std::vector<std::vector<std::int32_t>> index_maps_;
};

/// Partition of all 4^N projector labels under the simultaneous action
/// (sigma, eta) -> (g(sigma), g(eta)).
struct OrbitTable {
  std::vector<std::int32_t> orbit_id;        // per pair index, length 4^N
  std::vector<std::size_t> representative;   // pair index of each orbit's seed
  std::vector<std::int64_t> orbit_size;

  std::int64_t orbit_count() const { return static_cast<std::int64_t>(orbit_size.size()); }
};

inline OrbitTable orbit_table(const SymmetryGroup& group) {
  const std::size_t dim = hilbert::dimension(group.num_sites());
  const std::size_t pairs = dim * dim;
  OrbitTable table;
  table.orbit_id.assign(pairs, -1);

  for (std::size_t s = 0; s < dim; ++s) {
    for (std::size_t t = 0; t < dim; ++t) {
      const std::size_t p = s * dim + t;
      if (table.orbit_id[p] >= 0) continue;
      const auto id = static_cast<std::int32_t>(table.representative.size());
      table.representative.push_back(p);
      std::int64_t count = 0;
      for (int g = 0; g < group.size(); ++g) {
        const auto& perm = group.index_map(g);
        const std::size_t q = static_cast<std::size_t>(perm[s]) * dim + perm[t];
        if (table.orbit_id[q] < 0) {
          table.orbit_id[q] = id;
          ++count;
        }
      }
      table.orbit_size.push_back(count);
    }
  }
  return table;
}

/// dim I_G by Burnside's lemma: (1/|G|) sum_g 4^{c(g)} with c(g) the number
/// of cycles of g on the sites. O(|G| N); the explicit orbit enumeration is
/// the independent check used in tests.
inline std::int64_t invariant_dimension(const SymmetryGroup& group) {
  std::int64_t total = 0;
  for (const auto& g : group.elements()) {
    std::vector<bool> visited(g.size(), false);
    int cycles = 0;
    for (int i = 0; i < g.size(); ++i) {
      if (visited[i]) continue;
      ++cycles;
      for (int j = i; !visited[j]; j = g.map[j]) visited[j] = true;
    }
    total += std::int64_t{1} << (2 * cycles);  // 4^cycles
  }
  return total / group.size();
}

/// Group average of a projector: (1/|G|) sum_g g|sigma><eta|g†. Commutes
/// with every group element; trace equals delta_{sigma,eta}.
inline DensityMatrix symmetrized_projector(const hilbert::BasisPair& pair,
                                           const SymmetryGroup& group) {
  const auto dim = static_cast<Eigen::Index>(hilbert::dimension(group.num_sites()));
  const auto s = hilbert::config_to_index(pair.bra);
  const auto t = hilbert::config_to_index(pair.ket);
  const double weight = 1.0 / group.size();
  DensityMatrix out = DensityMatrix::Zero(dim, dim);
  for (int g = 0; g < group.size(); ++g) {
    const auto& perm = group.index_map(g);
    out(perm[s], perm[t]) += weight;
  }
  return out;
}

/// Largest violation of g L[rho] g† = L[g rho g†] over all group elements
/// and a deterministic set of random test matrices, relative to ||rho||_F.
inline double check_weak_symmetry(const lindblad::LindbladModel& model,
                                  const SymmetryGroup& group, int num_tests = 20,
                                  std::uint64_t seed = 0x5EED5EEDu) {
  const lindblad::Liouvillian liou(model);
  const auto dim = liou.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  double worst = 0.0;
  for (int k = 0; k < num_tests; ++k) {
    DensityMatrix rho(dim, dim);
    for (Eigen::Index t = 0; t < dim; ++t)
      for (Eigen::Index s = 0; s < dim; ++s) rho(s, t) = Complex(normal(rng), normal(rng));
    const DensityMatrix lrho = liou.apply(rho);
    const double scale = rho.norm();
    for (int g = 0; g < group.size(); ++g) {
      const double residual =
          (group.conjugated(g, lrho) - liou.apply(group.conjugated(g, rho))).norm() / scale;
      worst = std::max(worst, residual);
    }
  }
  return worst;
}

inline void write_orbit_csv(const OrbitTable& table, std::ostream& os) {
  os << "pair_index,orbit_id,orbit_size\n";
  for (std::size_t p = 0; p < table.orbit_id.size(); ++p) {
    const auto id = table.orbit_id[p];
    os << p << ',' << id << ',' << table.orbit_size[id] << '\n';
  }
}

}  // namespace olnqs::symmetry
