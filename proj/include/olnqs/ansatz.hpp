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
#include <cstdio>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "olnqs/errors.hpp"
#include "olnqs/hilbert.hpp"
#include "olnqs/symmetry.hpp"

namespace olnqs::ansatz {

enum class AnsatzKind { plain_rbm, invariant };

/// Complex parameter blocks of the density-operator network. The real
/// variational vector chi flattens them in the order (a, b, c, W row-major,
/// X row-major), every complex entry contributing adjacent (Re, Im) slots.
/// With the hermitian_c constraint active Im(c) is pinned to zero and its
/// slots are removed from chi, which makes the represented matrix Hermitian.
struct RbmParameters {
  Eigen::VectorXcd visible_bias;    // a, length N
  Eigen::VectorXcd hidden_bias;     // b, length M
  Eigen::VectorXcd mixing_bias;     // c, length L
  Eigen::MatrixXcd mixing_weights;  // W, L x N
  Eigen::MatrixXcd hidden_weights;  // X, M x N
  bool hermitian_c = true;

  int num_sites() const { return static_cast<int>(visible_bias.size()); }
  int num_hidden() const { return static_cast<int>(hidden_bias.size()); }
  int num_mixing() const { return static_cast<int>(mixing_bias.size()); }

  /// N_p = N + M + L + N(L + M)
  long complex_count() const {
    const long n = num_sites(), m = num_hidden(), l = num_mixing();
    return n + m + l + n * (l + m);
  }

  /// Length of chi: 2 N_p, minus L when hermitian_c removes the Im(c) slots.
  long real_count() const {
    return 2 * complex_count() - (hermitian_c ? num_mixing() : 0);
  }

  Eigen::VectorXd flatten() const {
    Eigen::VectorXd chi(real_count());
    Eigen::Index k = 0;
    auto push = [&](Complex z, bool with_imag) {
      chi(k++) = z.real();
      if (with_imag) chi(k++) = z.imag();
    };
    for (Eigen::Index j = 0; j < visible_bias.size(); ++j) push(visible_bias(j), true);
    for (Eigen::Index m = 0; m < hidden_bias.size(); ++m) push(hidden_bias(m), true);
    for (Eigen::Index l = 0; l < mixing_bias.size(); ++l) push(mixing_bias(l), !hermitian_c);
    for (Eigen::Index l = 0; l < mixing_weights.rows(); ++l)
      for (Eigen::Index i = 0; i < mixing_weights.cols(); ++i) push(mixing_weights(l, i), true);
    for (Eigen::Index m = 0; m < hidden_weights.rows(); ++m)
      for (Eigen::Index i = 0; i < hidden_weights.cols(); ++i) push(hidden_weights(m, i), true);
    return chi;
  }

  void unflatten(const Eigen::VectorXd& chi) {
    if (chi.size() != real_count()) {
      throw std::invalid_argument("chi length " + std::to_string(chi.size()) +
                                  " does not match parameter shape " +
                                  std::to_string(real_count()));
    }
    Eigen::Index k = 0;
    auto pull = [&](bool with_imag) {
      const double re = chi(k++);
      const double im = with_imag ? chi(k++) : 0.0;
      return Complex(re, im);
    };
    for (Eigen::Index j = 0; j < visible_bias.size(); ++j) visible_bias(j) = pull(true);
    for (Eigen::Index m = 0; m < hidden_bias.size(); ++m) hidden_bias(m) = pull(true);
    for (Eigen::Index l = 0; l < mixing_bias.size(); ++l) mixing_bias(l) = pull(!hermitian_c);
    for (Eigen::Index l = 0; l < mixing_weights.rows(); ++l)
      for (Eigen::Index i = 0; i < mixing_weights.cols(); ++i) mixing_weights(l, i) = pull(true);
    for (Eigen::Index m = 0; m < hidden_weights.rows(); ++m)
      for (Eigen::Index i = 0; i < hidden_weights.cols(); ++i) hidden_weights(m, i) = pull(true);
  }
};

namespace detail {

inline long hidden_count(int num_sites, double density, const char* name) {
  const double exact = density * num_sites;
  const long rounded = std::lround(exact);
  if (std::abs(exact - static_cast<double>(rounded)) > 1e-9 || rounded < 0) {
    throw std::domain_error(std::string(name) + " * N = " + std::to_string(exact) +
                            " is not a non-negative integer");
  }
  return rounded;
}

// Uniform double in [-0.01, 0.01] from the top 53 bits of the generator
// output; fully specified so that a seed pins the parameters bit for bit.
inline double uniform_small(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  return 0.02 * u - 0.01;
}

}  // namespace detail

/// Complex parameter count with M = L = alpha N: (2 alpha + 1) N + 2 alpha N^2.
inline long param_count(int num_sites, double alpha) {
  const long m = detail::hidden_count(num_sites, alpha, "alpha");
  return num_sites + 2 * m + 2 * m * num_sites;
}

/// Every free real component i.i.d. uniform on [-0.01, 0.01] from a seeded
/// deterministic generator, drawn in chi order.
inline RbmParameters init_params(int num_sites, double alpha, double beta,
                                 std::uint64_t seed, bool hermitian_c = true) {
  const long m = detail::hidden_count(num_sites, alpha, "alpha");
  const long l = detail::hidden_count(num_sites, beta, "beta");
  RbmParameters p;
  p.visible_bias = Eigen::VectorXcd::Zero(num_sites);
  p.hidden_bias = Eigen::VectorXcd::Zero(m);
  p.mixing_bias = Eigen::VectorXcd::Zero(l);
  p.mixing_weights = Eigen::MatrixXcd::Zero(l, num_sites);
  p.hidden_weights = Eigen::MatrixXcd::Zero(m, num_sites);
  p.hermitian_c = hermitian_c;

  std::mt19937_64 rng(seed);
  Eigen::VectorXd chi(p.real_count());
  for (Eigen::Index k = 0; k < chi.size(); ++k) chi(k) = detail::uniform_small(rng);
  p.unflatten(chi);
  return p;
}

/// log cosh(z) evaluated as z + log(1 + exp(-2z)) - log 2 on the mirrored
/// half-plane Re z >= 0; the branch ambiguity of the complex log is a
/// multiple of 2 pi i and cancels on exponentiation.
inline Complex ln_cosh(Complex z) {
  const Complex w = (z.real() < 0.0) ? -z : z;
  return w + std::log(0.5 * (1.0 + std::exp(-2.0 * w)));
}

/// ln rho_chi(sigma, eta): visible terms a.sigma + a*.eta, mixing cosh
/// factors coupling sigma and eta, and hidden cosh factors acting on each
/// side separately.
inline Complex rbm_log_element(const RbmParameters& p, const hilbert::BasisPair& pair) {
  const int n = p.num_sites();
  if (pair.bra.size() != n || pair.ket.size() != n) {
    throw std::invalid_argument("basis pair size does not match parameter sites");
  }
  Complex log = std::log(8.0);
  for (int j = 0; j < n; ++j) {
    log += p.visible_bias(j) * static_cast<double>(pair.bra.spins[j]) +
           std::conj(p.visible_bias(j)) * static_cast<double>(pair.ket.spins[j]);
  }
  for (int l = 0; l < p.num_mixing(); ++l) {
    Complex theta = p.mixing_bias(l);
    for (int i = 0; i < n; ++i) {
      theta += p.mixing_weights(l, i) * static_cast<double>(pair.bra.spins[i]) +
               std::conj(p.mixing_weights(l, i)) * static_cast<double>(pair.ket.spins[i]);
    }
    log += ln_cosh(theta);
  }
  for (int m = 0; m < p.num_hidden(); ++m) {
    Complex theta_bra = p.hidden_bias(m);
    Complex theta_ket = std::conj(p.hidden_bias(m));
    for (int i = 0; i < n; ++i) {
      theta_bra += p.hidden_weights(m, i) * static_cast<double>(pair.bra.spins[i]);
      theta_ket += std::conj(p.hidden_weights(m, i)) * static_cast<double>(pair.ket.spins[i]);
    }
    log += ln_cosh(theta_bra) + ln_cosh(theta_ket);
  }
  if (!std::isfinite(log.real()) || !std::isfinite(log.imag())) {
    throw NumericError("cosh singularity in ansatz element");
  }
  return log;
}

/// Result of one full ansatz evaluation. Entries carry a common factor
/// exp(-log_scale) relative to the literal matrix elements; every downstream
/// quantity (S, f, costs, observables) is invariant under that global scale.
struct AnsatzEvaluation {
  DensityMatrix rho;
  Eigen::MatrixXcd tangent_stack;  // 4^N x K; column k = vec(d rho / d chi_k)
  double log_scale = 0.0;
};

struct EvalOptions {
  bool with_tangents = true;
  bool rescale = true;     // subtract the max log modulus before exponentiating
  double log_offset = 0.0; // adds a constant to every log element (scale-gauge hook)
};

/// Evaluates the network and its tangent stack over the full basis. Holds
/// the per-site spin table so repeated evaluations share it.
class AnsatzEvaluator {
 public:
  explicit AnsatzEvaluator(int num_sites)
      : num_sites_(num_sites),
        dim_(static_cast<Eigen::Index>(hilbert::dimension(num_sites))),
        spins_(num_sites, dim_) {
    for (Eigen::Index s = 0; s < dim_; ++s)
      for (int j = 0; j < num_sites; ++j)
        spins_(j, s) = static_cast<double>(hilbert::spin_at(s, j, num_sites));
  }

  int num_sites() const { return num_sites_; }
  Eigen::Index dim() const { return dim_; }

  AnsatzEvaluation evaluate(const RbmParameters& p, AnsatzKind kind,
                            const symmetry::SymmetryGroup* group = nullptr,
                            const EvalOptions& options = {}) const {
    if (p.num_sites() != num_sites_) {
      throw std::invalid_argument("parameter sites do not match evaluator");
    }
    if (kind == AnsatzKind::invariant &&
        (group == nullptr || group->num_sites() != num_sites_)) {
      throw std::invalid_argument("invariant ansatz requires a matching symmetry group");
    }
    const Eigen::Index m = p.num_hidden();
    const Eigen::Index l = p.num_mixing();
    const Eigen::MatrixXcd spins_c = spins_.cast<Complex>();

    // Per-configuration tables: a.sigma, the hidden angles and their tanh,
    // and the partial mixing angles (the conjugate half is added per pair).
    const Eigen::RowVectorXcd va = p.visible_bias.transpose() * spins_c;
    const Eigen::MatrixXcd tx = (p.hidden_weights * spins_c).colwise() + p.hidden_bias;
    const Eigen::MatrixXcd thx = tx.array().tanh();
    const Eigen::MatrixXcd tw = p.mixing_weights * spins_c;
    Eigen::RowVectorXcd hsum = Eigen::RowVectorXcd::Zero(dim_);
    for (Eigen::Index s = 0; s < dim_; ++s)
      for (Eigen::Index mm = 0; mm < m; ++mm) hsum(s) += ln_cosh(tx(mm, s));

    const bool tangents = options.with_tangents;
    Eigen::MatrixXcd log_elements(dim_, dim_);
    Eigen::MatrixXcd thw(l, tangents ? dim_ * dim_ : 0);
    const double log8 = std::log(8.0);
    double max_log = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < dim_; ++t) {
      for (Eigen::Index s = 0; s < dim_; ++s) {
        Complex log = log8 + va(s) + std::conj(va(t)) + hsum(s) + std::conj(hsum(t)) +
                      options.log_offset;
        for (Eigen::Index ll = 0; ll < l; ++ll) {
          const Complex theta = p.mixing_bias(ll) + tw(ll, s) + std::conj(tw(ll, t));
          log += ln_cosh(theta);
          if (tangents) thw(ll, s * dim_ + t) = std::tanh(theta);
        }
        if (!std::isfinite(log.real()) || !std::isfinite(log.imag())) {
          throw NumericError("cosh singularity in ansatz at pair (" +
                             std::to_string(s) + "," + std::to_string(t) + ")");
        }
        log_elements(s, t) = log;
        max_log = std::max(max_log, log.real());
      }
    }

    double shift = 0.0;
    if (options.rescale) {
      shift = max_log;
    } else if (max_log > 700.0) {
      Eigen::Index ws = 0, wt = 0;
      log_elements.real().maxCoeff(&ws, &wt);
      throw std::overflow_error("ansatz entry overflows exp at pair (" +
                                std::to_string(ws) + "," + std::to_string(wt) + ")");
    }

    AnsatzEvaluation result;
    result.log_scale = shift;
    DensityMatrix plain(dim_, dim_);
    for (Eigen::Index t = 0; t < dim_; ++t)
      for (Eigen::Index s = 0; s < dim_; ++s)
        plain(s, t) = std::exp(log_elements(s, t) - shift);

    Eigen::MatrixXcd stack;
    if (tangents) {
      stack.resize(dim_ * dim_, p.real_count());
      fill_tangents(p, plain, thx, thw, stack);
    }

    if (kind == AnsatzKind::plain_rbm) {
      result.rho = std::move(plain);
      result.tangent_stack = std::move(stack);
      return result;
    }

    // Invariant kind: average the matrix and every tangent over the group,
    // rho_inv(s, t) = (1/|G|) sum_g rho(g s, g t).
    const int gsize = group->size();
    const double weight = 1.0 / gsize;
    std::vector<std::vector<std::int64_t>> pair_perm(gsize);
    for (int g = 0; g < gsize; ++g) {
      const auto& perm = group->index_map(g);
      pair_perm[g].resize(dim_ * dim_);
      for (Eigen::Index s = 0; s < dim_; ++s)
        for (Eigen::Index t = 0; t < dim_; ++t)
          pair_perm[g][s * dim_ + t] = static_cast<std::int64_t>(perm[s]) * dim_ + perm[t];
    }

    DensityMatrix averaged = DensityMatrix::Zero(dim_, dim_);
    for (int g = 0; g < gsize; ++g) {
      const auto& perm = group->index_map(g);
      for (Eigen::Index t = 0; t < dim_; ++t)
        for (Eigen::Index s = 0; s < dim_; ++s)
          averaged(s, t) += weight * plain(perm[s], perm[t]);
    }
    result.rho = std::move(averaged);

    if (tangents) {
      Eigen::MatrixXcd inv_stack = Eigen::MatrixXcd::Zero(dim_ * dim_, stack.cols());
      for (Eigen::Index k = 0; k < stack.cols(); ++k) {
        auto dst = inv_stack.col(k);
        const auto src = stack.col(k);
        for (int g = 0; g < gsize; ++g) {
          const auto& pp = pair_perm[g];
          for (Eigen::Index pidx = 0; pidx < dim_ * dim_; ++pidx)
            dst(pidx) += weight * src(pp[pidx]);
        }
      }
      result.tangent_stack = std::move(inv_stack);
    }
    return result;
  }

 private:
  // dlog slots in chi order; each tangent entry is rho(s,t) * dlog(s,t).
  void fill_tangents(const RbmParameters& p, const DensityMatrix& plain,
                     const Eigen::MatrixXcd& thx, const Eigen::MatrixXcd& thw,
                     Eigen::MatrixXcd& stack) const {
    const Complex iu(0.0, 1.0);
    Eigen::Index col = 0;
    auto fill = [&](auto&& dlog) {
      auto column = stack.col(col++);
      for (Eigen::Index s = 0; s < dim_; ++s)
        for (Eigen::Index t = 0; t < dim_; ++t)
          column(s * dim_ + t) = plain(s, t) * dlog(s, t);
    };
    for (int j = 0; j < num_sites_; ++j) {
      fill([&](Eigen::Index s, Eigen::Index t) { return Complex(spins_(j, s) + spins_(j, t)); });
      fill([&](Eigen::Index s, Eigen::Index t) { return iu * (spins_(j, s) - spins_(j, t)); });
    }
    for (Eigen::Index m = 0; m < p.num_hidden(); ++m) {
      fill([&](Eigen::Index s, Eigen::Index t) { return thx(m, s) + std::conj(thx(m, t)); });
      fill([&](Eigen::Index s, Eigen::Index t) { return iu * (thx(m, s) - std::conj(thx(m, t))); });
    }
    for (Eigen::Index l = 0; l < p.num_mixing(); ++l) {
      fill([&](Eigen::Index s, Eigen::Index t) { return thw(l, s * dim_ + t); });
      if (!p.hermitian_c) {
        fill([&](Eigen::Index s, Eigen::Index t) { return iu * thw(l, s * dim_ + t); });
      }
    }
    for (Eigen::Index l = 0; l < p.num_mixing(); ++l) {
      for (int i = 0; i < num_sites_; ++i) {
        fill([&](Eigen::Index s, Eigen::Index t) {
          return thw(l, s * dim_ + t) * (spins_(i, s) + spins_(i, t));
        });
        fill([&](Eigen::Index s, Eigen::Index t) {
          return thw(l, s * dim_ + t) * iu * (spins_(i, s) - spins_(i, t));
        });
      }
    }
    for (Eigen::Index m = 0; m < p.num_hidden(); ++m) {
      for (int i = 0; i < num_sites_; ++i) {
        fill([&](Eigen::Index s, Eigen::Index t) {
          return thx(m, s) * spins_(i, s) + std::conj(thx(m, t)) * spins_(i, t);
        });
        fill([&](Eigen::Index s, Eigen::Index t) {
          return iu * (thx(m, s) * spins_(i, s) - std::conj(thx(m, t)) * spins_(i, t));
        });
      }
    }
  }

  int num_sites_;
  Eigen::Index dim_;
  Eigen::MatrixXd spins_;
};

/// Literal-scale dense matrix: entries exp(rbm_log_element), group-averaged
/// for the invariant kind. Throws std::overflow_error naming the offending
/// pair if exp overflows; use AnsatzEvaluator::evaluate for rescaled work.
inline DensityMatrix dense_matrix(const RbmParameters& p, AnsatzKind kind,
                                  const symmetry::SymmetryGroup* group = nullptr) {
  AnsatzEvaluator evaluator(p.num_sites());
  EvalOptions options;
  options.with_tangents = false;
  options.rescale = false;
  return evaluator.evaluate(p, kind, group, options).rho;
}

/// Literal-scale tangent matrices d rho / d chi_k, one per real parameter.
inline std::vector<DensityMatrix> tangent_vectors(const RbmParameters& p, AnsatzKind kind,
                                                  const symmetry::SymmetryGroup* group = nullptr) {
  AnsatzEvaluator evaluator(p.num_sites());
  EvalOptions options;
  options.rescale = false;
  const AnsatzEvaluation eval = evaluator.evaluate(p, kind, group, options);
  const Eigen::Index dim = evaluator.dim();
  std::vector<DensityMatrix> tangents;
  tangents.reserve(eval.tangent_stack.cols());
  for (Eigen::Index k = 0; k < eval.tangent_stack.cols(); ++k) {
    tangents.push_back(hilbert::matricize(eval.tangent_stack.col(k), dim));
  }
  return tangents;
}

// ---------------------------------------------------------------------------
// Checkpoint format: a small self-describing text record. chi is written in
// hexadecimal floating point, so the write/read round trip is exact.

struct Checkpoint {
  RbmParameters params;
  AnsatzKind kind = AnsatzKind::plain_rbm;
  long iteration = 0;
  double time = 0.0;
  std::uint64_t seed = 0;
};

inline void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  char buf[64];
  auto hex = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%a", x);
    return std::string(buf);
  };
  os << "olnqs-checkpoint 1\n";
  os << "kind " << (ckpt.kind == AnsatzKind::invariant ? "invariant" : "plain-rbm") << '\n';
  os << "iteration " << ckpt.iteration << '\n';
  os << "time " << hex(ckpt.time) << '\n';
  os << "sites " << ckpt.params.num_sites() << '\n';
  os << "hidden " << ckpt.params.num_hidden() << '\n';
  os << "mixing " << ckpt.params.num_mixing() << '\n';
  os << "hermitian_c " << (ckpt.params.hermitian_c ? 1 : 0) << '\n';
  os << "seed " << ckpt.seed << '\n';
  const Eigen::VectorXd chi = ckpt.params.flatten();
  os << "chi " << chi.size() << '\n';
  for (Eigen::Index k = 0; k < chi.size(); ++k) os << hex(chi(k)) << '\n';
}

inline Checkpoint read_checkpoint(std::istream& is) {
  auto fail = [](const std::string& what) -> void {
    throw std::runtime_error("malformed checkpoint: " + what);
  };
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "olnqs-checkpoint" || version != 1)
    fail("bad header");

  Checkpoint ckpt;
  int sites = 0;
  long hidden = 0, mixing = 0;
  int hermitian = 1;
  long chi_len = -1;
  std::string key;
  while (chi_len < 0 && is >> key) {
    if (key == "kind") {
      is >> word;
      ckpt.kind = (word == "invariant") ? AnsatzKind::invariant : AnsatzKind::plain_rbm;
    } else if (key == "iteration") {
      is >> ckpt.iteration;
    } else if (key == "time") {
      is >> word;
      ckpt.time = std::strtod(word.c_str(), nullptr);
    } else if (key == "sites") {
      is >> sites;
    } else if (key == "hidden") {
      is >> hidden;
    } else if (key == "mixing") {
      is >> mixing;
    } else if (key == "hermitian_c") {
      is >> hermitian;
    } else if (key == "seed") {
      is >> ckpt.seed;
    } else if (key == "chi") {
      is >> chi_len;
    } else {
      fail("unknown key '" + key + "'");
    }
    if (!is) fail("truncated value for '" + key + "'");
  }
  if (chi_len < 0) fail("missing chi block");

  RbmParameters& p = ckpt.params;
  p.visible_bias = Eigen::VectorXcd::Zero(sites);
  p.hidden_bias = Eigen::VectorXcd::Zero(hidden);
  p.mixing_bias = Eigen::VectorXcd::Zero(mixing);
  p.mixing_weights = Eigen::MatrixXcd::Zero(mixing, sites);
  p.hidden_weights = Eigen::MatrixXcd::Zero(hidden, sites);
  p.hermitian_c = hermitian != 0;
  if (chi_len != p.real_count()) fail("chi length does not match shape");

  Eigen::VectorXd chi(chi_len);
  for (long k = 0; k < chi_len; ++k) {
    if (!(is >> word)) fail("truncated chi block");
    chi(k) = std::strtod(word.c_str(), nullptr);
  }
  p.unflatten(chi);
  return ckpt;
}

inline void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open checkpoint file " + path);
  write_checkpoint(os, ckpt);
}

inline Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open checkpoint file " + path);
  return read_checkpoint(is);
}

}  // namespace olnqs::ansatz
