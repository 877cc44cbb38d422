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

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "anqs/common.hpp"
#include "anqs/symmetry.hpp"

namespace anqs {

using big_int = boost::multiprecision::cpp_int;

/// Decides whether a partial basis vector has any completion inside the
/// target sector. Physicality depends on the prefix only through its partial
/// eigenvalue key, so the answer is tabulated per (depth, key).
///
/// `depth` counts fixed bits: depth 0 is the root, depth N a full vector.
/// The table is built eagerly: keys reachable from the root are enumerated
/// level by level, then a backward sweep fills in
///   phys(d, k) = phys(d+1, step(k, d, 0)) || phys(d+1, step(k, d, 1)),
///   phys(N, k) = (k == target).
/// After construction the oracle is immutable and safe to share.
class PhysicalityOracle {
 public:
  explicit PhysicalityOracle(SymmetryEnsemble ensemble) : ensemble_(std::move(ensemble)), codec_(ensemble_) {
    const std::size_t n = ensemble_.n_qubits();
    table_.resize(n + 1);
    table_[0].push_back({codec_.root(), false});
    for (std::size_t d = 0; d < n; ++d) {
      auto& next = table_[d + 1];
      next.reserve(2 * table_[d].size());
      for (const auto& [k, _] : table_[d])
        for (int b = 0; b < 2; ++b) next.push_back({codec_.step(k, d, b), false});
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end(), [](auto& a, auto& b) { return a.first == b.first; }), next.end());
    }
    for (auto& [k, phys] : table_[n]) phys = (k == codec_.target());
    for (std::size_t d = n; d-- > 0;)
      for (auto& [k, phys] : table_[d]) phys = find(d + 1, codec_.step(k, d, 0)) || find(d + 1, codec_.step(k, d, 1));
    if (!table_[0].front().second) throw ConfigError("target symmetry sector is empty: no basis vector attains s_ref");
  }

  const SymmetryEnsemble& ensemble() const noexcept { return ensemble_; }
  const EigenKeyCodec& codec() const noexcept { return codec_; }
  std::size_t n_qubits() const noexcept { return ensemble_.n_qubits(); }

  bool is_phys(std::size_t depth, eigen_key_t key) const {
    if (depth > n_qubits()) throw InputError("depth beyond the number of qubits");
    const auto& level = table_[depth];
    auto it = std::lower_bound(level.begin(), level.end(), key, [](const auto& e, eigen_key_t k) { return e.first < k; });
    if (it != level.end() && it->first == key) return it->second;
    // Not reachable from the root; answered by the same recursion, uncached.
    std::map<std::pair<std::size_t, eigen_key_t>, bool> memo;
    return evaluate(depth, key, memo);
  }

  /// Physicality of the two children of a physical node.
  std::pair<bool, bool> child_physicality(std::size_t depth, eigen_key_t key) const {
    if (depth >= n_qubits()) throw InputError("a leaf has no children");
    if (!is_phys(depth, key)) throw ContractViolation("child_physicality called on an unphysical node");
    return {is_phys(depth + 1, codec_.step(key, depth, 0)), is_phys(depth + 1, codec_.step(key, depth, 1))};
  }

  /// Number of cached (depth, key) entries.
  std::size_t table_size() const noexcept {
    std::size_t s = 0;
    for (const auto& l : table_) s += l.size();
    return s;
  }

  std::size_t level_size(std::size_t depth) const { return table_.at(depth).size(); }

 private:
  bool find(std::size_t depth, eigen_key_t key) const {
    const auto& level = table_[depth];
    auto it = std::lower_bound(level.begin(), level.end(), key, [](const auto& e, eigen_key_t k) { return e.first < k; });
    return it != level.end() && it->first == key && it->second;
  }

  bool evaluate(std::size_t depth, eigen_key_t key, std::map<std::pair<std::size_t, eigen_key_t>, bool>& memo) const {
    if (depth == n_qubits()) return key == codec_.target();
    if (auto it = memo.find({depth, key}); it != memo.end()) return it->second;
    const bool r = evaluate(depth + 1, codec_.step(key, depth, 0), memo) || evaluate(depth + 1, codec_.step(key, depth, 1), memo);
    memo[{depth, key}] = r;
    return r;
  }

  SymmetryEnsemble ensemble_;
  EigenKeyCodec codec_;
  std::vector<std::vector<std::pair<eigen_key_t, bool>>> table_;
};

/// Exact number of basis vectors in the sector: the physicality recursion
/// with OR replaced by a sum, run forward over reachable keys.
inline big_int count_sector(const SymmetryEnsemble& ensemble) {
  const EigenKeyCodec codec(ensemble);
  std::vector<std::pair<eigen_key_t, big_int>> level{{codec.root(), big_int(1)}};
  for (std::size_t d = 0; d < ensemble.n_qubits(); ++d) {
    std::vector<std::pair<eigen_key_t, big_int>> next;
    next.reserve(2 * level.size());
    for (const auto& [k, c] : level)
      for (int b = 0; b < 2; ++b) next.emplace_back(codec.step(k, d, b), c);
    std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    level.clear();
    for (auto& [k, c] : next) {
      if (!level.empty() && level.back().first == k)
        level.back().second += c;
      else
        level.emplace_back(k, std::move(c));
    }
  }
  for (const auto& [k, c] : level)
    if (k == codec.target()) return c;
  return 0;
}

}  // namespace anqs
