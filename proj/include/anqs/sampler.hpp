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

#include <cstdint>
#include <random>
#include <vector>

#include "anqs/common.hpp"
#include "anqs/model.hpp"
#include "anqs/physicality.hpp"

namespace anqs {

/// k ~ Binomial(n, p). Probabilities within 1e-12 of [0, 1] are clamped.
template <class URBG>
std::uint64_t sample_binomial(std::uint64_t n, double p, URBG& rng) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw InputError("binomial probability outside [0, 1]: " + std::to_string(p));
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(n), p);
  return static_cast<std::uint64_t>(dist(rng));
}

struct SampleEntry {
  basis_t x;
  std::uint64_t count;

  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

/// Unique sampled vectors with occurrence counts.
struct SamplingStatistics {
  std::vector<SampleEntry> entries;
  std::uint64_t requested = 0;
  std::uint64_t retained = 0;

  std::size_t n_unique() const noexcept { return entries.size(); }
  bool empty() const noexcept { return retained == 0; }
};

/// Random stream for one node of the sampling tree. Depends only on the
/// node's position, never on the order in which nodes are visited.
inline SplitMix64 node_stream(std::uint64_t stream, std::size_t depth, basis_t prefix) {
  return SplitMix64(hash_combine(hash_combine(stream, depth), prefix));
}

/// Level-synchronous statistics sampling. Every frontier node carrying
/// n_in samples splits them as n_0 ~ B(n_in, p(0|prefix)), n_1 = n_in - n_0
/// under the (masked) conditional; zero-count children are dropped and so are
/// counts routed to unphysical children (which under masking have p = 0
/// except in the DU tail).
inline SamplingStatistics sample_statistics(const AnqsModel& model, const MaskingContext& ctx, std::uint64_t n_samples,
                                            std::uint64_t stream) {
  struct Node {
    basis_t prefix;
    eigen_key_t key;
    std::uint64_t count;
  };
  const std::size_t n = model.n_qubits();
  const auto& oracle = *ctx.oracle;
  if (oracle.n_qubits() != n) throw InputError("oracle and model qubit counts differ");
  if (n_samples == 0) throw InputError("number of samples must be positive");

  SamplingStatistics stats;
  stats.requested = n_samples;
  std::vector<Node> frontier{{0, oracle.codec().root(), n_samples}};
  std::vector<basis_t> prefixes;
  std::vector<LogAmpPair> amps;
  for (std::size_t d = 0; d < n && !frontier.empty(); ++d) {
    prefixes.resize(frontier.size());
    for (std::size_t k = 0; k < frontier.size(); ++k) prefixes[k] = frontier[k].prefix;
    amps.resize(frontier.size());
    model.conditional_batch(d, prefixes, amps);

    std::vector<Node> next;
    next.reserve(2 * frontier.size());
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      const Node& node = frontier[k];
      const LogAmpPair la = apply_mask(amps[k], ctx, d, node.key);
      const double p0 = born_probability(la[0]), p1 = born_probability(la[1]);
      auto rng = node_stream(stream, d, node.prefix);
      const std::uint64_t n0 = sample_binomial(node.count, p0 / (p0 + p1), rng);
      const std::array<std::uint64_t, 2> split{n0, node.count - n0};
      for (int b = 0; b < 2; ++b) {
        if (split[static_cast<std::size_t>(b)] == 0) continue;
        const eigen_key_t child = oracle.codec().step(node.key, d, b);
        if (!oracle.is_phys(d + 1, child)) continue;
        next.push_back({node.prefix | (static_cast<basis_t>(b) << d), child, split[static_cast<std::size_t>(b)]});
      }
    }
    frontier = std::move(next);
  }

  stats.entries.reserve(frontier.size());
  for (const auto& node : frontier) {
    if (!oracle.ensemble().contains(node.prefix)) throw ContractViolation("sampler emitted a vector outside the sector");
    stats.entries.push_back({node.prefix, node.count});
    stats.retained += node.count;
  }
  std::sort(stats.entries.begin(), stats.entries.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  return stats;
}

}  // namespace anqs
