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
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "anqs/common.hpp"

namespace anqs {

enum class Composition { additive, multiplicative };

/// A quantum-number symmetry diagonal in the computational basis whose
/// eigenvalue is a fold of per-qubit local values. Multiplicative symmetries
/// store the parity p of the eigenvalue (-1)^p and compose by XOR.
class SymmetryDescriptor {
 public:
  SymmetryDescriptor(std::string name, Composition kind, std::vector<std::array<int, 2>> local_values)
      : name_(std::move(name)), kind_(kind), local_(std::move(local_values)) {
    check_qubit_count(local_.size());
    if (kind_ == Composition::multiplicative)
      for (const auto& lv : local_)
        if ((lv[0] != 0 && lv[0] != 1) || (lv[1] != 0 && lv[1] != 1))
          throw InputError("multiplicative local values must be parities in {0, 1}");
  }

  const std::string& name() const noexcept { return name_; }
  Composition kind() const noexcept { return kind_; }
  std::size_t n_qubits() const noexcept { return local_.size(); }
  int local(std::size_t i, int bit) const { return local_[i][static_cast<std::size_t>(bit)]; }

  int compose(int acc, int v) const noexcept { return kind_ == Composition::additive ? acc + v : (acc ^ v); }

  /// Fold over the first `depth` qubits.
  int partial(basis_t x, std::size_t depth) const {
    int acc = 0;
    for (std::size_t i = 0; i < depth; ++i) acc = compose(acc, local(i, bit_at(x, i)));
    return acc;
  }

  int eval(basis_t x) const { return partial(x, n_qubits()); }

  /// Bounds on every partial eigenvalue, the empty prefix included.
  std::pair<int, int> partial_range() const {
    if (kind_ == Composition::multiplicative) return {0, 1};
    int lo = 0, hi = 0;
    for (const auto& lv : local_) {
      lo += std::min({0, lv[0], lv[1]});
      hi += std::max({0, lv[0], lv[1]});
    }
    return {lo, hi};
  }

  /// Bounds on full eigenvalues.
  std::pair<int, int> full_range() const {
    if (kind_ == Composition::multiplicative) return {0, 1};
    int lo = 0, hi = 0;
    for (const auto& lv : local_) {
      lo += std::min(lv[0], lv[1]);
      hi += std::max(lv[0], lv[1]);
    }
    return {lo, hi};
  }

  /// Support of a multiplicative descriptor: qubits whose bit flips the parity.
  basis_t sensitivity() const {
    basis_t m = 0;
    for (std::size_t i = 0; i < local_.size(); ++i)
      if (local_[i][0] != local_[i][1]) m |= basis_t{1} << i;
    return m;
  }

 private:
  std::string name_;
  Composition kind_;
  std::vector<std::array<int, 2>> local_;
};

/// Electron count: sum of bits.
inline SymmetryDescriptor particle_number(std::size_t n) {
  return {"particle_number", Composition::additive, std::vector<std::array<int, 2>>(n, {0, 1})};
}

/// Twice the spin projection for interleaved spin-orbitals: even 0-based
/// qubits carry +1, odd ones -1.
inline SymmetryDescriptor spin_projection(std::size_t n) {
  if (n % 2 != 0) throw InputError("spin projection needs an even number of spin-orbitals");
  std::vector<std::array<int, 2>> lv(n);
  for (std::size_t i = 0; i < n; ++i) lv[i] = {0, i % 2 == 0 ? 1 : -1};
  return {"spin_projection", Composition::additive, std::move(lv)};
}

/// Twice the total magnetization, with |0> = up and |1> = down.
inline SymmetryDescriptor magnetization(std::size_t n) {
  return {"magnetization", Composition::additive, std::vector<std::array<int, 2>>(n, {1, -1})};
}

/// Z-string parity over the given support.
inline SymmetryDescriptor z2_descriptor(basis_t mask, std::size_t n) {
  check_qubit_count(n);
  if (mask == 0) throw InputError("Z2 symmetry mask must be nonzero");
  check_basis(mask, n);
  std::vector<std::array<int, 2>> lv(n, {0, 0});
  std::string name = "z2:";
  for (std::size_t i = 0; i < n; ++i) {
    if (bit_at(mask, i)) lv[i] = {0, 1};
    name += bit_at(mask, i) ? 'Z' : 'I';
  }
  return {std::move(name), Composition::multiplicative, std::move(lv)};
}

/// Ordered descriptors with their target eigenvalues s_ref.
class SymmetryEnsemble {
 public:
  explicit SymmetryEnsemble(std::size_t n_qubits) : n_(n_qubits) { check_qubit_count(n_qubits); }

  SymmetryEnsemble& add(SymmetryDescriptor d, int target) {
    if (d.n_qubits() != n_) throw InputError("descriptor '" + d.name() + "' has the wrong qubit count");
    const auto [lo, hi] = d.full_range();
    if (target < lo || target > hi)
      throw InputError("target " + std::to_string(target) + " for '" + d.name() + "' is outside [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
    descriptors_.push_back(std::move(d));
    targets_.push_back(target);
    return *this;
  }

  std::size_t n_qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return descriptors_.size(); }
  bool empty() const noexcept { return descriptors_.empty(); }
  const std::vector<SymmetryDescriptor>& descriptors() const noexcept { return descriptors_; }
  const std::vector<int>& targets() const noexcept { return targets_; }

  std::vector<int> eval(basis_t x) const {
    std::vector<int> s;
    s.reserve(size());
    for (const auto& d : descriptors_) s.push_back(d.eval(x));
    return s;
  }

  bool contains(basis_t x) const {
    for (std::size_t m = 0; m < size(); ++m)
      if (descriptors_[m].eval(x) != targets_[m]) return false;
    return true;
  }

  /// Same ensemble with every multiplicative descriptor removed.
  SymmetryEnsemble additive_only() const {
    SymmetryEnsemble out(n_);
    for (std::size_t m = 0; m < size(); ++m)
      if (descriptors_[m].kind() == Composition::additive) out.add(descriptors_[m], targets_[m]);
    return out;
  }

 private:
  std::size_t n_;
  std::vector<SymmetryDescriptor> descriptors_;
  std::vector<int> targets_;
};

/// Sector containing x_ref: every target is the descriptor's eigenvalue on x_ref.
inline SymmetryEnsemble fix_sector(std::span<const SymmetryDescriptor> descriptors, basis_t x_ref, std::size_t n_qubits) {
  check_basis(x_ref, n_qubits);
  SymmetryEnsemble e(n_qubits);
  for (const auto& d : descriptors) e.add(d, d.eval(x_ref));
  return e;
}

using eigen_key_t = std::uint64_t;

/// Packs a vector of partial eigenvalues into one integer. Multiplicative
/// parities occupy the low bits, so composing with a local value is an XOR
/// on those bits plus an integer add on the offset additive digits above.
class EigenKeyCodec {
 public:
  explicit EigenKeyCodec(const SymmetryEnsemble& ensemble) : n_(ensemble.n_qubits()) {
    const auto& ds = ensemble.descriptors();
    components_.resize(ds.size());
    std::uint64_t stride = 1;
    auto place = [&](std::size_t m) {
      const auto [lo, hi] = ds[m].partial_range();
      const auto width = static_cast<std::uint64_t>(hi - lo + 1);
      if (stride > (std::uint64_t{1} << 62) / width) throw CapacityError("symmetry spectrum too large for a 64-bit key");
      components_[m] = {lo, width, stride};
      stride *= width;
    };
    for (std::size_t m = 0; m < ds.size(); ++m)
      if (ds[m].kind() == Composition::multiplicative) place(m);
    for (std::size_t m = 0; m < ds.size(); ++m)
      if (ds[m].kind() == Composition::additive) place(m);
    key_space_ = stride;

    steps_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (int b = 0; b < 2; ++b) {
        Step st{};
        for (std::size_t m = 0; m < ds.size(); ++m) {
          const int v = ds[m].local(i, b);
          if (ds[m].kind() == Composition::multiplicative) {
            if (v) st.flip |= components_[m].stride;
          } else {
            st.add += static_cast<std::int64_t>(v) * static_cast<std::int64_t>(components_[m].stride);
          }
        }
        steps_[i][static_cast<std::size_t>(b)] = st;
      }
    root_ = encode(std::vector<int>(ds.size(), 0));
    target_ = encode(ensemble.targets());
  }

  std::size_t n_qubits() const noexcept { return n_; }
  std::size_t n_components() const noexcept { return components_.size(); }
  eigen_key_t root() const noexcept { return root_; }
  eigen_key_t target() const noexcept { return target_; }
  std::uint64_t key_space() const noexcept { return key_space_; }

  /// Key after appending bit b at qubit i (0-based).
  eigen_key_t step(eigen_key_t key, std::size_t i, int b) const noexcept {
    const Step& st = steps_[i][static_cast<std::size_t>(b)];
    return static_cast<eigen_key_t>(static_cast<std::int64_t>(key ^ st.flip) + st.add);
  }

  /// Key of the first `depth` bits of x.
  eigen_key_t key_of(basis_t x, std::size_t depth) const noexcept {
    eigen_key_t k = root_;
    for (std::size_t i = 0; i < depth; ++i) k = step(k, i, bit_at(x, i));
    return k;
  }

  eigen_key_t encode(std::span<const int> values) const {
    if (values.size() != components_.size()) throw InputError("eigenvalue vector has the wrong length");
    eigen_key_t k = 0;
    for (std::size_t m = 0; m < components_.size(); ++m) {
      const auto& c = components_[m];
      const long digit = static_cast<long>(values[m]) - c.offset;
      if (digit < 0 || static_cast<std::uint64_t>(digit) >= c.width)
        throw InputError("partial eigenvalue outside the descriptor's spectrum");
      k += static_cast<eigen_key_t>(digit) * c.stride;
    }
    return k;
  }

  std::vector<int> decode(eigen_key_t key) const {
    std::vector<int> v(components_.size());
    for (std::size_t m = 0; m < components_.size(); ++m) {
      const auto& c = components_[m];
      v[m] = static_cast<int>((key / c.stride) % c.width) + c.offset;
    }
    return v;
  }

 private:
  struct Component {
    int offset;
    std::uint64_t width;
    std::uint64_t stride;
  };
  struct Step {
    eigen_key_t flip = 0;
    std::int64_t add = 0;
  };

  std::size_t n_;
  std::vector<Component> components_;
  std::vector<std::array<Step, 2>> steps_;
  std::uint64_t key_space_ = 1;
  eigen_key_t root_ = 0;
  eigen_key_t target_ = 0;
};

}  // namespace anqs
