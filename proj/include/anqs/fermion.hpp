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

#include <array>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "anqs/common.hpp"
#include "anqs/pauli.hpp"

namespace anqs {

/// Spatial-orbital integrals in chemist notation. Indices are 0-based; all
/// tables are dense.
class IntegralSet {
 public:
  IntegralSet() = default;

  IntegralSet(std::size_t n_spatial, int n_electrons, double core_energy = 0.0, int ms2 = 0)
      : n_spatial_(n_spatial),
        n_electrons_(n_electrons),
        ms2_(ms2),
        core_energy_(core_energy),
        one_body_(n_spatial * n_spatial, 0.0),
        two_body_(n_spatial * n_spatial * n_spatial * n_spatial, 0.0) {
    if (n_spatial == 0 || 2 * n_spatial > max_qubits) throw InputError("number of spatial orbitals must be in [1, 32]");
    if (n_electrons < 0 || static_cast<std::size_t>(n_electrons) > 2 * n_spatial)
      throw InputError("number of electrons must be in [0, 2 * NORB]");
  }

  std::size_t n_spatial() const noexcept { return n_spatial_; }
  std::size_t n_spin_orbitals() const noexcept { return 2 * n_spatial_; }
  int n_electrons() const noexcept { return n_electrons_; }
  int ms2() const noexcept { return ms2_; }
  double core_energy() const noexcept { return core_energy_; }
  void set_core_energy(double e) noexcept { core_energy_ = e; }

  double one_body(std::size_t p, std::size_t q) const { return one_body_[p * n_spatial_ + q]; }

  /// (pq|rs)
  double two_body(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const {
    return two_body_[((p * n_spatial_ + q) * n_spatial_ + r) * n_spatial_ + s];
  }

  void set_one_body(std::size_t p, std::size_t q, double v) {
    one_body_[p * n_spatial_ + q] = v;
    one_body_[q * n_spatial_ + p] = v;
  }

  /// Sets (pq|rs) and its seven permutational images.
  void set_two_body(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double v) {
    for (auto [a, b, c, d] : std::array<std::array<std::size_t, 4>, 8>{{{p, q, r, s},
                                                                         {q, p, r, s},
                                                                         {p, q, s, r},
                                                                         {q, p, s, r},
                                                                         {r, s, p, q},
                                                                         {s, r, p, q},
                                                                         {r, s, q, p},
                                                                         {s, r, q, p}}})
      two_body_[((a * n_spatial_ + b) * n_spatial_ + c) * n_spatial_ + d] = v;
  }

  /// Checks the index symmetries of both tables.
  void validate(double tol = 1e-10) const {
    const std::size_t m = n_spatial_;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q)
        if (std::abs(one_body(p, q) - one_body(q, p)) > tol) throw InputError("one-body integrals are not symmetric");
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q)
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t s = 0; s < m; ++s) {
            const double v = two_body(p, q, r, s);
            for (double w : {two_body(q, p, r, s), two_body(p, q, s, r), two_body(r, s, p, q)})
              if (std::abs(v - w) > tol) throw InputError("two-body integrals lack 8-fold symmetry");
          }
  }

  friend bool operator==(const IntegralSet&, const IntegralSet&) = default;

 private:
  std::size_t n_spatial_ = 0;
  int n_electrons_ = 0;
  int ms2_ = 0;
  double core_energy_ = 0.0;
  std::vector<double> one_body_;
  std::vector<double> two_body_;
};

namespace detail {

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline double parse_fortran_double(std::string tok, std::size_t line) {
  for (auto& c : tok)
    if (c == 'D' || c == 'd') c = 'E';
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("non-numeric field '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("non-numeric field '" + tok + "'", line);
  return v;
}

inline long parse_index(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("non-integer index '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("non-integer index '" + tok + "'", line);
  return v;
}

}  // namespace detail

/// Reads a FCIDUMP file. The namelist header must provide NORB and NELEC;
/// ORBSYM and ISYM are accepted and ignored. Lines "e i 0 0 0" (orbital
/// energies) are skipped.
inline IntegralSet parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  std::size_t header_line = 0;
  bool in_header = false, header_done = false;

  while (!header_done && std::getline(in, line)) {
    ++line_no;
    std::string u = detail::upper(line);
    if (!in_header) {
      if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) throw ParseError("expected '&FCI' namelist header", line_no);
      in_header = true;
      header_line = line_no;
      u = u.substr(pos + 4);
    }
    const auto end_amp = u.find("&END");
    const auto end_slash = u.find('/');
    const auto end = std::min(end_amp, end_slash);
    if (end != std::string::npos) {
      header += " " + u.substr(0, end);
      header_done = true;
    } else {
      header += " " + u;
    }
  }
  if (!header_done) throw ParseError("unterminated namelist header", header_line ? header_line : line_no);

  std::map<std::string, std::vector<std::string>> fields;
  {
    static const std::regex key_re(R"(([A-Z_][A-Z0-9_]*)\s*=)");
    std::vector<std::pair<std::string, std::size_t>> keys;  // name, value start
    std::vector<std::size_t> key_starts;
    for (std::sregex_iterator it(header.begin(), header.end(), key_re), end; it != end; ++it) {
      keys.emplace_back((*it)[1].str(), static_cast<std::size_t>(it->position() + it->length()));
      key_starts.push_back(static_cast<std::size_t>(it->position()));
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const std::size_t stop = k + 1 < keys.size() ? key_starts[k + 1] : header.size();
      std::string body = header.substr(keys[k].second, stop - keys[k].second);
      for (auto& c : body)
        if (c == ',') c = ' ';
      std::istringstream ss(body);
      std::vector<std::string> vals;
      for (std::string v; ss >> v;) vals.push_back(v);
      fields[keys[k].first] = std::move(vals);
    }
  }
  auto header_int = [&](const std::string& key, bool required, long fallback) -> long {
    auto it = fields.find(key);
    if (it == fields.end()) {
      if (required) throw ParseError("header is missing " + key, header_line);
      return fallback;
    }
    if (it->second.size() != 1) throw ParseError("header field " + key + " must hold one integer", header_line);
    return detail::parse_index(it->second.front(), header_line);
  };
  const long norb = header_int("NORB", true, 0);
  const long nelec = header_int("NELEC", true, 0);
  const long ms2 = header_int("MS2", false, 0);
  if (norb <= 0 || 2 * norb > static_cast<long>(max_qubits)) throw ParseError("NORB out of range", header_line);
  if (nelec < 0 || nelec > 2 * norb) throw ParseError("NELEC out of range", header_line);

  IntegralSet ints(static_cast<std::size_t>(norb), static_cast<int>(nelec), 0.0, static_cast<int>(ms2));
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5) throw ParseError("expected 'value i j k l'", line_no);
    const double v = detail::parse_fortran_double(tok[0], line_no);
    std::array<long, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      idx[k] = detail::parse_index(tok[k + 1], line_no);
      if (idx[k] < 0 || idx[k] > norb) throw ParseError("orbital index out of range", line_no);
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      ints.set_core_energy(v);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      ints.set_one_body(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v);
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      ints.set_two_body(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
                        static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1), v);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      // orbital energy
    } else {
      throw ParseError("unsupported index pattern", line_no);
    }
  }
  return ints;
}

inline IntegralSet parse_fcidump(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

/// Writes each distinct nonzero integral once, with 17 significant digits.
inline void write_fcidump(const IntegralSet& ints, std::ostream& out) {
  const std::size_t m = ints.n_spatial();
  out << " &FCI NORB=" << m << ",NELEC=" << ints.n_electrons() << ",MS2=" << ints.ms2() << ",\n  ORBSYM=";
  for (std::size_t i = 0; i < m; ++i) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  out << std::setprecision(17);
  auto pair_index = [](std::size_t a, std::size_t b) { return a * (a + 1) / 2 + b; };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l <= k; ++l) {
          if (pair_index(i, j) < pair_index(k, l)) continue;
          const double v = ints.two_body(i, j, k, l);
          if (v != 0.0) out << v << ' ' << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1 << '\n';
        }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (ints.one_body(i, j) != 0.0) out << ints.one_body(i, j) << ' ' << i + 1 << ' ' << j + 1 << " 0 0\n";
  out << ints.core_energy() << " 0 0 0 0\n";
}

namespace detail {

using LadderTerms = std::array<std::pair<complex_t, PauliString>, 2>;

/// a_j (creation=false) or a_j^dagger as Z_0..Z_{j-1} (X_j +/- iY_j)/2.
inline LadderTerms ladder(std::size_t n, std::size_t j, bool creation) {
  const basis_t string = low_mask(j);
  const basis_t bit = basis_t{1} << j;
  const complex_t y_coeff = creation ? complex_t{0.0, -0.5} : complex_t{0.0, 0.5};
  return {{{complex_t{0.5, 0.0}, PauliString(n, bit, string)}, {y_coeff, PauliString(n, bit, string | bit)}}};
}

template <std::size_t K>
void accumulate_product(double coeff, const std::array<const LadderTerms*, K>& ops, std::size_t n,
                        std::map<PauliString, complex_t>& acc) {
  for (unsigned choice = 0; choice < (1U << K); ++choice) {
    complex_t c = coeff;
    PauliString p = PauliString::identity(n);
    for (std::size_t k = 0; k < K; ++k) {
      const auto& [ck, pk] = (*ops[k])[(choice >> k) & 1U];
      auto [phase, prod] = multiply(p, pk);
      c *= ck * phase;
      p = prod;
    }
    acc[p] += c;
  }
}

}  // namespace detail

/// Jordan-Wigner image of
///   sum_pq h_pq a+_p a_q + 1/2 sum_pqrs (pq|rs) a+_p a+_r a_s a_q
/// over interleaved spin-orbitals: spatial k -> qubit 2k (up), 2k+1 (down).
inline QubitHamiltonian jordan_wigner(const IntegralSet& ints, double drop_threshold = QubitHamiltonian::default_drop_threshold) {
  ints.validate();
  const std::size_t n = ints.n_spin_orbitals();
  std::vector<detail::LadderTerms> create, annihilate;
  for (std::size_t j = 0; j < n; ++j) {
    create.push_back(detail::ladder(n, j, true));
    annihilate.push_back(detail::ladder(n, j, false));
  }
  auto spatial = [](std::size_t so) { return so / 2; };
  auto spin = [](std::size_t so) { return so % 2; };

  std::map<PauliString, complex_t> acc;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      if (spin(p) != spin(q)) continue;
      const double h = ints.one_body(spatial(p), spatial(q));
      if (h == 0.0) continue;
      detail::accumulate_product<2>(h, {&create[p], &annihilate[q]}, n, acc);
    }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      if (spin(p) != spin(q)) continue;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          if (spin(r) != spin(s) || p == r || q == s) continue;
          const double g = ints.two_body(spatial(p), spatial(q), spatial(r), spatial(s));
          if (g == 0.0) continue;
          detail::accumulate_product<4>(0.5 * g, {&create[p], &create[r], &annihilate[s], &annihilate[q]}, n, acc);
        }
    }

  std::vector<PauliTerm> terms;
  terms.reserve(acc.size());
  for (const auto& [p, c] : acc) {
    if (std::abs(c.imag()) > 1e-10) throw InputError("Jordan-Wigner expansion produced a complex coefficient");
    terms.push_back({complex_t{c.real(), 0.0}, p});
  }
  return QubitHamiltonian(n, terms, ints.core_energy(), drop_threshold);
}

/// |1...1 0...0> with n_electrons leading ones.
inline basis_t hf_state(std::size_t n_qubits, std::size_t n_electrons) {
  check_qubit_count(n_qubits);
  if (n_electrons > n_qubits)
    throw InputError("cannot place " + std::to_string(n_electrons) + " electrons in " + std::to_string(n_qubits) + " orbitals");
  return low_mask(n_electrons);
}

}  // namespace anqs
