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

#include <compare>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anqs/common.hpp"

namespace anqs {

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline char to_char(Pauli p) {
  constexpr char letters[] = {'I', 'X', 'Y', 'Z'};
  return letters[static_cast<int>(p)];
}

/// Tensor product of single-qubit Paulis stored as two masks: `flip` marks
/// X or Y (the bits the string flips), `phase` marks Z or Y (the bits that
/// contribute a sign).
class PauliString {
 public:
  PauliString() = default;

  PauliString(std::size_t n_qubits, basis_t flip, basis_t phase) : n_(n_qubits), flip_(flip), phase_(phase) {
    check_qubit_count(n_qubits);
    check_basis(flip, n_qubits);
    check_basis(phase, n_qubits);
  }

  static PauliString identity(std::size_t n_qubits) { return {n_qubits, 0, 0}; }

  /// "XXIZ": character k acts on qubit k.
  static PauliString parse(std::string_view letters) {
    check_qubit_count(letters.size());
    basis_t flip = 0, phase = 0;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      const basis_t bit = basis_t{1} << i;
      switch (letters[i]) {
        case 'I': break;
        case 'X': flip |= bit; break;
        case 'Y': flip |= bit; phase |= bit; break;
        case 'Z': phase |= bit; break;
        default: throw InputError("invalid Pauli letter '" + std::string(1, letters[i]) + "' in '" + std::string(letters) + "'");
      }
    }
    return {letters.size(), flip, phase};
  }

  std::size_t size() const noexcept { return n_; }
  basis_t flip_mask() const noexcept { return flip_; }
  basis_t phase_mask() const noexcept { return phase_; }
  int y_count() const noexcept { return popcount(flip_ & phase_); }
  bool is_identity() const noexcept { return flip_ == 0 && phase_ == 0; }
  bool is_diagonal() const noexcept { return flip_ == 0; }

  Pauli operator[](std::size_t i) const noexcept {
    const int f = bit_at(flip_, i), p = bit_at(phase_, i);
    if (f) return p ? Pauli::Y : Pauli::X;
    return p ? Pauli::Z : Pauli::I;
  }

  std::string str() const {
    std::string s(n_, 'I');
    for (std::size_t i = 0; i < n_; ++i) s[i] = to_char((*this)[i]);
    return s;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  std::size_t n_ = 0;
  basis_t flip_ = 0;
  basis_t phase_ = 0;
};

/// i^k for integer k.
inline complex_t i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// Product a*b = phase * c. Writing a string as i^{|x&z|} X^x Z^z, the
/// product picks up (-1)^{|z_a & x_b|} from commuting Z^{z_a} past X^{x_b}.
inline std::pair<complex_t, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size()) throw InputError("Pauli string length mismatch in product");
  const basis_t flip = a.flip_mask() ^ b.flip_mask();
  const basis_t phase = a.phase_mask() ^ b.phase_mask();
  const int k = a.y_count() + b.y_count() + 2 * popcount(a.phase_mask() & b.flip_mask()) - popcount(flip & phase);
  return {i_pow(k), PauliString(a.size(), flip, phase)};
}

struct PauliTerm {
  complex_t coefficient;
  PauliString letters;
};

struct AppliedTerm {
  basis_t x;
  complex_t amplitude;
};

/// Action of coefficient * P on |x>: returns x' and <x'|coefficient*P|x>.
inline AppliedTerm apply_term(const PauliTerm& term, basis_t x) {
  check_basis(x, term.letters.size());
  const auto& p = term.letters;
  const double sign = (popcount(x & p.phase_mask()) & 1) ? -1.0 : 1.0;
  return {x ^ p.flip_mask(), term.coefficient * i_pow(p.y_count()) * sign};
}

struct Connection {
  basis_t x;
  complex_t element;
};

/// Weighted sum of Pauli strings plus a real identity offset. Construction
/// canonicalizes: duplicate strings are merged, identity strings move into the
/// offset and terms below the drop threshold are removed.
class QubitHamiltonian {
 public:
  static constexpr double default_drop_threshold = 1e-12;

  QubitHamiltonian() = default;

  QubitHamiltonian(std::size_t n_qubits, std::span<const PauliTerm> terms, double constant_offset = 0.0,
                   double drop_threshold = default_drop_threshold)
      : n_(n_qubits), constant_(constant_offset) {
    check_qubit_count(n_qubits);
    std::map<PauliString, complex_t> merged;
    complex_t identity = constant_offset;
    for (const auto& t : terms) {
      if (t.letters.size() != n_qubits)
        throw InputError("term '" + t.letters.str() + "' does not match qubit count " + std::to_string(n_qubits));
      if (t.letters.is_identity())
        identity += t.coefficient;
      else
        merged[t.letters] += t.coefficient;
    }
    if (std::abs(identity.imag()) > drop_threshold) throw InputError("identity coefficient has a nonzero imaginary part");
    constant_ = identity.real();
    for (const auto& [letters, c] : merged)
      if (std::abs(c) >= drop_threshold) terms_.push_back({c, letters});
    build_groups();
  }

  QubitHamiltonian(std::size_t n_qubits, std::initializer_list<PauliTerm> terms, double constant_offset = 0.0)
      : QubitHamiltonian(n_qubits, std::span<const PauliTerm>(terms.begin(), terms.size()), constant_offset) {}

  std::size_t n_qubits() const noexcept { return n_; }
  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
  double constant_offset() const noexcept { return constant_; }

  bool is_hermitian(double tol = 1e-12) const {
    return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) { return std::abs(t.coefficient.imag()) <= tol; });
  }

  /// Column of x: every x' with nonzero <x'|H|x>, diagonal entry first.
  std::vector<Connection> connected_configurations(basis_t x) const {
    check_basis(x, n_);
    std::vector<Connection> out;
    out.reserve(groups_.size() + 1);
    for (const auto& g : groups_) {
      complex_t amp = g.flip == 0 ? complex_t{constant_} : complex_t{};
      for (const auto& [phase, c] : g.terms) amp += (popcount(x & phase) & 1) ? -c : c;
      if (std::abs(amp) > zero_tolerance) out.push_back({x ^ g.flip, amp});
    }
    if (groups_.empty() || groups_.front().flip != 0)
      if (constant_ != 0.0) out.insert(out.begin(), Connection{x, constant_});
    return out;
  }

  /// Row of x: every x' with nonzero <x|H|x'>. Equal to the conjugated column
  /// for Hermitian operators.
  std::vector<Connection> matrix_row(basis_t x) const {
    check_basis(x, n_);
    std::vector<Connection> out;
    out.reserve(groups_.size() + 1);
    for (const auto& g : groups_) {
      const basis_t xp = x ^ g.flip;
      complex_t amp = g.flip == 0 ? complex_t{constant_} : complex_t{};
      for (const auto& [phase, c] : g.terms) amp += (popcount(xp & phase) & 1) ? -c : c;
      if (std::abs(amp) > zero_tolerance) out.push_back({xp, amp});
    }
    if (groups_.empty() || groups_.front().flip != 0)
      if (constant_ != 0.0) out.insert(out.begin(), Connection{x, constant_});
    return out;
  }

  /// <x|H|x>.
  double diagonal(basis_t x) const {
    double e = constant_;
    if (!groups_.empty() && groups_.front().flip == 0)
      for (const auto& [phase, c] : groups_.front().terms) e += ((popcount(x & phase) & 1) ? -c : c).real();
    return e;
  }

  std::size_t n_flip_groups() const noexcept { return groups_.size(); }

 private:
  static constexpr double zero_tolerance = 1e-14;

  // Terms sharing a flip mask map |x> to the same |x'>; their phase factors
  // i^{#Y} are folded into the stored coefficient.
  struct FlipGroup {
    basis_t flip;
    std::vector<std::pair<basis_t, complex_t>> terms;
  };

  void build_groups() {
    std::map<basis_t, std::vector<std::pair<basis_t, complex_t>>> by_flip;
    for (const auto& t : terms_)
      by_flip[t.letters.flip_mask()].emplace_back(t.letters.phase_mask(), t.coefficient * i_pow(t.letters.y_count()));
    groups_.clear();
    for (auto& [flip, ts] : by_flip) groups_.push_back({flip, std::move(ts)});
  }

  std::size_t n_ = 0;
  double constant_ = 0.0;
  std::vector<PauliTerm> terms_;
  std::vector<FlipGroup> groups_;
};

/// Diagonal Z-type symmetries: a GF(2) basis of Z-support masks m with
/// |m & flip(t)| even for every term t, i.e. the nullspace of the X/Y-support
/// matrix. Ordered by ascending free column.
inline std::vector<basis_t> discover_z2(const QubitHamiltonian& h) {
  const std::size_t n = h.n_qubits();
  std::vector<basis_t> rows;
  rows.reserve(h.terms().size());
  for (const auto& t : h.terms()) rows.push_back(t.letters.flip_mask());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::erase(rows, basis_t{0});

  // Reduced row echelon form over GF(2).
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    const basis_t bit = basis_t{1} << col;
    auto it = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                           [&](basis_t r) { return r & bit; });
    if (it == rows.end()) continue;
    std::swap(rows[rank], *it);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && (rows[r] & bit)) rows[r] ^= rows[rank];
    pivot_col.push_back(col);
    ++rank;
  }

  basis_t pivots = 0;
  for (auto c : pivot_col) pivots |= basis_t{1} << c;

  std::vector<basis_t> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (pivots & (basis_t{1} << free)) continue;
    basis_t v = basis_t{1} << free;
    // Each pivot variable equals the sum of the free variables in its row.
    for (std::size_t r = 0; r < rank; ++r)
      if (rows[r] & (basis_t{1} << free)) v |= basis_t{1} << pivot_col[r];
    basis.push_back(v);
  }
  return basis;
}

/// Z-string with the given support, as letters over {I, Z}.
inline std::string z_string(basis_t mask, std::size_t n) {
  std::string s(n, 'I');
  for (std::size_t i = 0; i < n; ++i)
    if (bit_at(mask, i)) s[i] = 'Z';
  return s;
}

}  // namespace anqs
