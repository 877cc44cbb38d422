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

#include <gtest/gtest.h>

#include <boost/math/special_functions/binomial.hpp>

#include <chrono>
#include <random>
#include <set>

#include "anqs/physicality.hpp"
#include "test_support.hpp"

using namespace anqs;
using namespace anqs::testing;

namespace {

SymmetryEnsemble electrons(std::size_t n, int n_e) {
  SymmetryEnsemble e(n);
  e.add(particle_number(n), n_e);
  return e;
}

SymmetryEnsemble electrons_spin(std::size_t n, int n_e, int sz2) {
  SymmetryEnsemble e(n);
  e.add(particle_number(n), n_e).add(spin_projection(n), sz2);
  return e;
}

}  // namespace

TEST(IsPhys, TerminationRule) {
  const PhysicalityOracle o(electrons(4, 2));
  const auto& c = o.codec();
  const int two = 2, one = 1;
  EXPECT_TRUE(o.is_phys(4, c.encode(std::span<const int>(&two, 1))));
  EXPECT_FALSE(o.is_phys(4, c.encode(std::span<const int>(&one, 1))));
}

TEST(IsPhys, PrunesThirdOne) {
  const PhysicalityOracle o(electrons(4, 2));
  const auto& c = o.codec();
  const eigen_key_t after11 = c.key_of(parse_bits("11"), 2);
  EXPECT_TRUE(o.is_phys(2, after11));
  EXPECT_FALSE(o.is_phys(3, c.step(after11, 2, 1)));
  EXPECT_EQ(o.child_physicality(2, after11), std::make_pair(true, false));
}

TEST(IsPhys, SixQubitExample) {
  SymmetryEnsemble e(6);
  e.add(particle_number(6), 3).add(spin_projection(6), 1);
  const PhysicalityOracle o(e);
  const std::vector<int> partial{2, 2};
  const bool expect = [&] {
    // every 3-bit prefix with two up electrons
    for (basis_t p = 0; p < 8; ++p)
      if (particle_number(6).partial(p, 3) == 2 && spin_projection(6).partial(p, 3) == 2)
        return brute_physical(e, p, 3);
    return false;
  }();
  EXPECT_EQ(o.is_phys(3, o.codec().encode(partial)), expect);
}

TEST(ChildPhysicality, ForcedRootAndContract) {
  const PhysicalityOracle o(electrons(2, 2));
  EXPECT_EQ(o.child_physicality(0, o.codec().root()), std::make_pair(false, true));
  const eigen_key_t dead = o.codec().key_of(0b00, 1);
  EXPECT_FALSE(o.is_phys(1, dead));
  EXPECT_THROW(o.child_physicality(1, dead), ContractViolation);
}

TEST(Oracle, EmptySectorIsConfigError) {
  SymmetryEnsemble e(4);
  e.add(particle_number(4), 1).add(spin_projection(4), 2);
  EXPECT_THROW(PhysicalityOracle{e}, ConfigError);
}

TEST(Oracle, AgreesWithBruteForceOnEveryNode) {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const auto e = random_ensemble(n, rng);
    const PhysicalityOracle o(e);
    for (std::size_t depth = 0; depth <= n; ++depth)
      for (basis_t p = 0; p < (basis_t{1} << depth); ++p) {
        const eigen_key_t key = o.codec().key_of(p, depth);
        const bool phys = o.is_phys(depth, key);
        ASSERT_EQ(phys, brute_physical(e, p, depth)) << "n=" << n << " depth=" << depth;
        if (depth == n) continue;
        const bool c0 = o.is_phys(depth + 1, o.codec().step(key, depth, 0));
        const bool c1 = o.is_phys(depth + 1, o.codec().step(key, depth, 1));
        ASSERT_EQ(phys, c0 || c1);  // monotone consistency
        if (phys) {
          ASSERT_EQ(o.child_physicality(depth, key), std::make_pair(c0, c1));
        }
      }
  }
}

TEST(Oracle, UnreachableKeysAnsweredConsistently) {
  const PhysicalityOracle o(electrons(6, 3));
  const int five = 5;
  // partial count 5 after two bits is unreachable and has no completion
  EXPECT_FALSE(o.is_phys(2, o.codec().encode(std::span<const int>(&five, 1))));
  EXPECT_FALSE(o.is_phys(2, o.codec().encode(std::span<const int>(&five, 1))));
}

TEST(Oracle, TableSizeBound) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 4 + rep;
    const auto e = random_ensemble(n, rng);
    const PhysicalityOracle o(e);
    std::size_t spectra = 1;
    for (const auto& d : e.descriptors()) {
      std::set<int> values;
      for (std::size_t depth = 0; depth <= n; ++depth)
        for (basis_t p = 0; p < (basis_t{1} << depth); ++p) values.insert(d.partial(p, depth));
      spectra *= values.size();
    }
    EXPECT_LE(o.table_size(), (n + 1) * spectra);
  }
}

TEST(CountSector, MatchesBruteForceAndBinomials) {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rep % 13;
    const auto e = random_ensemble(n, rng);
    EXPECT_EQ(count_sector(e), big_int(brute_sector(e).size())) << "n=" << n;
  }
  EXPECT_EQ(count_sector(electrons(2, 1)), 2);
  for (std::size_t n : {4u, 8u, 14u, 20u})
    for (int up = 0; up <= static_cast<int>(n / 2); up += 2)
      for (int down = 0; down <= static_cast<int>(n / 2); down += 3) {
        const double expect = boost::math::binomial_coefficient<double>(static_cast<unsigned>(n / 2), up) *
                              boost::math::binomial_coefficient<double>(static_cast<unsigned>(n / 2), down);
        EXPECT_EQ(count_sector(electrons_spin(n, up + down, up - down)), big_int(static_cast<std::uint64_t>(expect)));
      }
}

TEST(CountSector, MolecularSectorsWithoutZ2) {
  const std::vector<std::tuple<std::size_t, int, std::uint64_t>> rows{
      {12, 4, 225}, {14, 10, 441}, {20, 14, 14400}, {20, 12, 44100}, {28, 20, 1002001}, {36, 28, 9363600}};
  for (auto [n, ne, expect] : rows) {
    const auto start = std::chrono::steady_clock::now();
    EXPECT_EQ(count_sector(electrons_spin(n, ne, 0)), big_int(expect)) << "N=" << n;
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
  }
}

TEST(EigenKeyClasses, EqualKeysHaveEqualSubtrees) {
  std::mt19937_64 rng(47);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const auto e = random_ensemble(n, rng);
    const EigenKeyCodec codec(e);
    for (std::size_t depth = 0; depth <= n; ++depth) {
      std::map<eigen_key_t, bool> seen;
      for (basis_t p = 0; p < (basis_t{1} << depth); ++p) {
        const bool phys = brute_physical(e, p, depth);
        const auto [it, fresh] = seen.emplace(codec.key_of(p, depth), phys);
        if (!fresh) {
          ASSERT_EQ(it->second, phys);
        }
      }
    }
  }
}
