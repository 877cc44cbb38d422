// Copyright 2026 The ANQS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "anqs/common.hpp"
#include "anqs/pauli.hpp"
#include "anqs/physicality.hpp"
#include "anqs/symmetry.hpp"

namespace anqs {

/// In-sector basis vectors in lexicographic order of their bit strings
/// (qubit 0 most significant), with a reverse index.
class SectorBasis {
 public:
  explicit SectorBasis(const PhysicalityOracle& oracle, std::size_t cap = std::size_t{1} << 18) : n_(oracle.n_qubits()) {
    const auto& codec = oracle.codec();
    // Depth-first, 0 before 1: emits leaves in lexicographic order.
    struct Frame {
      basis_t prefix;
      eigen_key_t key;
      std::size_t depth;
    };
    std::vector<Frame> stack{{0, codec.root(), 0}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      if (f.depth == n_) {
        if (states_.size() >= cap) throw CapacityError("sector dimension exceeds the cap of " + std::to_string(cap));
        states_.push_back(f.prefix);
        continue;
      }
      for (int b = 1; b >= 0; --b) {
        const eigen_key_t child = codec.step(f.key, f.depth, b);
        if (oracle.is_phys(f.depth + 1, child))
          stack.push_back({f.prefix | (static_cast<basis_t>(b) << f.depth), child, f.depth + 1});
      }
    }
    sorted_.resize(states_.size());
    for (std::size_t k = 0; k < states_.size(); ++k) sorted_[k] = {states_[k], k};
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t size() const noexcept { return states_.size(); }
  std::size_t n_qubits() const noexcept { return n_; }
  basis_t operator[](std::size_t k) const { return states_[k]; }
  const std::vector<basis_t>& states() const noexcept { return states_; }

  std::optional<std::size_t> index_of(basis_t x) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::pair<basis_t, std::size_t>{x, 0});
    if (it != sorted_.end() && it->first == x) return it->second;
    return std::nullopt;
  }

 private:
  std::size_t n_;
  std::vector<basis_t> states_;
  std::vector<std::pair<basis_t, std::size_t>> sorted_;
};

/// H restricted to the sector, entries <basis[i]|H|basis[j]>. Couplings to
/// vectors outside the sector are dropped.
inline Eigen::MatrixXcd sector_matrix(const QubitHamiltonian& h, const SectorBasis& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (const auto& c : h.connected_configurations(basis[static_cast<std::size_t>(j)]))
      if (auto i = basis.index_of(c.x)) m(static_cast<Eigen::Index>(*i), j) += c.element;
  return m;
}

/// Full 2^N matrix in integer basis order (row/column index = basis vector).
inline Eigen::MatrixXcd dense_matrix(const QubitHamiltonian& h) {
  if (h.n_qubits() > 14) throw CapacityError("dense matrix limited to 14 qubits");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << h.n_qubits());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (const auto& c : h.connected_configurations(static_cast<basis_t>(j))) m(static_cast<Eigen::Index>(c.x), j) += c.element;
  return m;
}

struct LanczosOptions {
  std::size_t krylov_dim = 40;
  std::size_t max_restarts = 200;
  double tolerance = 1e-10;
};

/// Lowest eigenvalue of a Hermitian operator given as y = A x, by restarted
/// Lanczos with full reorthogonalization. Restarts from the current Ritz
/// vector until the residual |beta_m y_m| falls below tolerance * max(1, |theta|).
template <class MatVec>
double lanczos_ground(MatVec&& apply, std::size_t dim, const LanczosOptions& opt = {}) {
  using Vec = Eigen::VectorXcd;
  const auto n = static_cast<Eigen::Index>(dim);
  Vec v0(n);
  SplitMix64 rng(0x1a2b3c4dULL);
  for (Eigen::Index i = 0; i < n; ++i)
    v0(i) = complex_t(static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5, static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5);
  v0.normalize();

  double theta = 0.0;
  for (std::size_t restart = 0; restart < opt.max_restarts; ++restart) {
    const std::size_t m = std::min(opt.krylov_dim, dim);
    std::vector<Vec> basis{v0};
    std::vector<double> alpha, beta;
    Vec w(n);
    for (std::size_t j = 0; j < m; ++j) {
      apply(basis[j], w);
      alpha.push_back(basis[j].dot(w).real());
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) w -= q * q.dot(w);
      const double b = w.norm();
      beta.push_back(b);
      if (b < 1e-13 || j + 1 == m) break;
      basis.push_back(w / b);
    }
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    theta = es.eigenvalues()(0);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    const double residual = std::abs(beta.back() * y(k - 1));
    Vec ritz = Vec::Zero(n);
    for (Eigen::Index i = 0; i < k; ++i) ritz += basis[static_cast<std::size_t>(i)] * y(i);
    if (residual <= opt.tolerance * std::max(1.0, std::abs(theta)) || static_cast<std::size_t>(k) == dim) return theta;
    v0 = ritz.normalized();
  }
  return theta;
}

struct GroundStateOptions {
  std::size_t max_dimension = std::size_t{1} << 18;
  std::size_t dense_below = 2048;
  std::size_t threads = 1;
  LanczosOptions lanczos;
};

/// Lowest eigenvalue of H (offset included) within the ensemble's sector, or
/// over the full space when no ensemble is given.
inline double ground_energy(const QubitHamiltonian& h, const std::optional<SymmetryEnsemble>& ensemble = std::nullopt,
                            const GroundStateOptions& opt = {}) {
  const PhysicalityOracle oracle(ensemble ? *ensemble : SymmetryEnsemble(h.n_qubits()));
  if (oracle.n_qubits() != h.n_qubits()) throw InputError("ensemble and Hamiltonian qubit counts differ");
  const SectorBasis basis(oracle, opt.max_dimension);
  if (basis.size() < opt.dense_below) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sector_matrix(h, basis), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }
  std::vector<std::vector<std::pair<std::size_t, complex_t>>> rows(basis.size());
  parallel_chunks(basis.size(), 1024, opt.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& c : h.matrix_row(basis[i]))
        if (auto j = basis.index_of(c.x)) rows[i].emplace_back(*j, c.element);
  });
  auto apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    parallel_chunks(rows.size(), 1024, opt.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        complex_t acc{};
        for (const auto& [j, v] : rows[i]) acc += v * x(static_cast<Eigen::Index>(j));
        y(static_cast<Eigen::Index>(i)) = acc;
      }
    });
  };
  return lanczos_ground(apply, basis.size(), opt.lanczos);
}

/// H = J sum_<ij> (X_i X_j + Y_i Y_j + Z_i Z_j) / 4 over nearest neighbours.
inline QubitHamiltonian build_heisenberg(std::size_t n, double j, bool periodic) {
  if (n < 2) throw InputError("Heisenberg chain needs at least two sites");
  std::vector<PauliTerm> terms;
  const std::size_t bonds = periodic && n > 2 ? n : n - 1;
  for (std::size_t b = 0; b < bonds; ++b) {
    const basis_t pair = (basis_t{1} << b) | (basis_t{1} << ((b + 1) % n));
    terms.push_back({0.25 * j, PauliString(n, pair, 0)});
    terms.push_back({0.25 * j, PauliString(n, pair, pair)});
    terms.push_back({0.25 * j, PauliString(n, 0, pair)});
  }
  return QubitHamiltonian(n, terms);
}

}  // namespace anqs
