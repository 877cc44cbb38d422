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

#include <random>

#include "anqs/io.hpp"
#include "anqs/model.hpp"
#include "test_support.hpp"

using namespace anqs;
using namespace anqs::testing;

namespace {

SymmetryEnsemble electrons(std::size_t n, int n_e) {
  SymmetryEnsemble e(n);
  e.add(particle_number(n), n_e);
  return e;
}

void set_complex(AnqsModel& m, std::size_t complex_index, complex_t v) {
  m.parameters()[2 * complex_index] = v.real();
  m.parameters()[2 * complex_index + 1] = v.imag();
}

/// max |a - b| / max |b|
double relative_error(const std::vector<complex_t>& a, const std::vector<complex_t>& b) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num = std::max(num, std::abs(a[k] - b[k]));
    den = std::max(den, std::abs(b[k]));
  }
  return num / std::max(den, 1e-300);
}

std::vector<complex_t> finite_difference_score(AnqsModel& m, const MaskingContext& ctx, basis_t x, double step = 1e-5) {
  std::vector<complex_t> o(m.n_parameters());
  auto params = m.parameters();
  for (std::size_t r = 0; r < params.size(); ++r) {
    const double keep = params[r];
    params[r] = keep + step;
    const complex_t up = log_psi(m, ctx, x);
    params[r] = keep - step;
    const complex_t down = log_psi(m, ctx, x);
    params[r] = keep;
    const complex_t d = (up - down) / (2 * step);
    o[r] = {d.real(), -d.imag()};
  }
  return o;
}

}  // namespace

TEST(Conditional, NormalizedForRandomWeightsAndInputs) {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 5; ++rep) {
    const auto m = AnqsModel::random({7, 8, -0.01}, rng(), 1.0 + rep);
    for (std::size_t d = 0; d < 7; ++d)
      for (int k = 0; k < 20; ++k) {
        const auto a = m.conditional_log_amps(d, rng());
        EXPECT_NEAR(std::exp(2 * a[0].real()) + std::exp(2 * a[1].real()), 1.0, 1e-10);
      }
  }
}

TEST(Conditional, ZeroWeightsGiveUniform) {
  const AnqsModel m({5, 4, -0.01});
  for (std::size_t d = 0; d < 5; ++d) {
    const auto a = m.conditional_log_amps(d, 0b10110);
    EXPECT_NEAR(std::abs(a[0] - complex_t(-0.5 * std::log(2.0))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1] - complex_t(-0.5 * std::log(2.0))), 0.0, 1e-15);
  }
}

TEST(Conditional, HandComputedToyNet) {
  // N = 2, one hidden unit. Conditional 1 owns complex entries 7..14 in the
  // order w1, b1, w2, b2, w3[0], w3[1], b3[0], b3[1].
  AnqsModel m({2, 1, -0.01});
  const complex_t w1{0.3, -0.2}, b1{0.1, 0.4}, w2{-0.7, 0.5}, b2{0.2, -0.3}, w30{1.1, 0.2}, w31{-0.4, 0.9},
      b30{0.05, -0.6}, b31{-0.25, 0.15};
  const complex_t vals[] = {w1, b1, w2, b2, w30, w31, b30, b31};
  for (std::size_t k = 0; k < 8; ++k) set_complex(m, 7 + k, vals[k]);
  EXPECT_EQ(m.parameter_range(1), std::make_pair(std::size_t{14}, std::size_t{30}));

  for (basis_t x0 : {0u, 1u}) {
    const double in = x0 ? 1.0 : -1.0;
    const complex_t h1 = std::tanh(w1 * in + b1);
    const complex_t z2 = w2 * h1 + b2;
    // split LeReLU with slope -0.01 on negative parts
    auto f = [](double v) { return v >= 0 ? v : -0.01 * v; };
    const complex_t h2{f(z2.real()), f(z2.imag())};
    const complex_t z30 = w30 * h2 + b30, z31 = w31 * h2 + b31;
    const double lse = std::log(std::exp(2 * z30.real()) + std::exp(2 * z31.real()));
    const complex_t o0 = z30 - 0.5 * lse, o1 = z31 - 0.5 * lse;
    const auto got = m.conditional_log_amps(1, x0);
    EXPECT_LT(std::abs(got[0] - o0), 1e-12);
    EXPECT_LT(std::abs(got[1] - o1), 1e-12);
  }
}

TEST(Conditional, ConventionalSlopeVariant) {
  AnqsModel negative({2, 1, -0.01}), conventional({2, 1, 0.01});
  for (auto* m : {&negative, &conventional}) {
    set_complex(*m, 7 + 1, {0.0, 0.0});
    set_complex(*m, 7 + 3, {-1.0, 0.0});  // b2 negative so z2 < 0
    set_complex(*m, 7 + 2, {0.0, 0.0});
    set_complex(*m, 7 + 4, {1.0, 0.0});
  }
  const auto a = negative.conditional_log_amps(1, 0), b = conventional.conditional_log_amps(1, 0);
  // z2 = -1: negative slope gives h2 = +0.01, conventional gives -0.01
  EXPECT_NEAR(a[0].real() - a[1].real(), 0.01, 1e-14);
  EXPECT_NEAR(b[0].real() - b[1].real(), -0.01, 1e-14);
}

TEST(Conditional, AutoregressiveCausality) {
  std::mt19937_64 rng(59);
  const auto m = AnqsModel::random({8, 6, -0.01}, 3);
  for (std::size_t d = 0; d < 8; ++d)
    for (int k = 0; k < 10; ++k) {
      const basis_t p = rng() & low_mask(8);
      const basis_t q = (p & low_mask(d)) | (rng() & ~low_mask(d) & low_mask(8));
      const auto a = m.conditional_log_amps(d, p), b = m.conditional_log_amps(d, q);
      EXPECT_EQ(a[0], b[0]);
      EXPECT_EQ(a[1], b[1]);
    }
  EXPECT_THROW(m.conditional_log_amps(8, 0), InputError);
}

TEST(PruneStrategy, ParseAndValidate) {
  EXPECT_FALSE(PruneStrategy::parse("du").is_mask());
  EXPECT_EQ(PruneStrategy::parse("mu").tail(), 0u);
  EXPECT_EQ(PruneStrategy::parse("mu-2").tail(), 2u);
  EXPECT_EQ(PruneStrategy::parse("mu-2").str(), "mu-2");
  EXPECT_THROW(PruneStrategy::parse("mu-x"), InputError);
  EXPECT_THROW(PruneStrategy::parse("mask"), InputError);
  EXPECT_THROW(PruneStrategy::mask(4).validate(4), ConfigError);
  EXPECT_NO_THROW(PruneStrategy::mask(3).validate(4));
  const auto s = PruneStrategy::mask(2);
  EXPECT_TRUE(s.masks(0, 5));
  EXPECT_TRUE(s.masks(2, 5));
  EXPECT_FALSE(s.masks(3, 5));
  EXPECT_FALSE(PruneStrategy::discard().masks(0, 5));
}

TEST(Masking, Examples) {
  const auto m = AnqsModel::random({2, 4, -0.01}, 1);
  const PhysicalityOracle o(electrons(2, 2));
  const MaskingContext ctx(PruneStrategy::mask(0), o);
  const auto root = masked_conditional_log_amps(m, ctx, 0, 0, o.codec().root());
  EXPECT_TRUE(is_log_zero(root[0]));
  EXPECT_EQ(root[1], complex_t(0.0));

  // Last level under MU(0) with particle number: always forced.
  const auto m6 = AnqsModel::random({6, 4, -0.01}, 2);
  const PhysicalityOracle o6(electrons(6, 3));
  const MaskingContext ctx6(PruneStrategy::mask(0), o6);
  for (basis_t p = 0; p < 32; ++p) {
    const eigen_key_t key = o6.codec().key_of(p, 5);
    if (!o6.is_phys(5, key)) continue;
    bool forced = false;
    apply_mask(m6.conditional_log_amps(5, p), ctx6, 5, key, &forced);
    EXPECT_TRUE(forced);
  }
  // Both children physical: raw values pass through bit for bit.
  const auto raw = m6.conditional_log_amps(1, 0b1);
  const auto masked = masked_conditional_log_amps(m6, ctx6, 1, 0b1, o6.codec().key_of(0b1, 1));
  EXPECT_EQ(raw, masked);
  // Unmasked tail under MU(2) and DU: raw.
  const MaskingContext tail(PruneStrategy::mask(2), o6), du(PruneStrategy::discard(), o6);
  const basis_t p = 0b111;
  EXPECT_EQ(masked_conditional_log_amps(m6, tail, 4, p, o6.codec().key_of(p, 4)), m6.conditional_log_amps(4, p));
  EXPECT_EQ(masked_conditional_log_amps(m6, du, 0, 0, o6.codec().root()), m6.conditional_log_amps(0, 0));
}

TEST(LogPsi, SingleQubit) {
  const auto m = AnqsModel::random({1, 4, -0.01}, 5);
  const PhysicalityOracle o{SymmetryEnsemble(1)};
  const MaskingContext ctx(PruneStrategy::discard(), o);
  const auto a = m.conditional_log_amps(0, 0);
  EXPECT_EQ(log_psi(m, ctx, 0), a[0]);
  EXPECT_EQ(log_psi(m, ctx, 1), a[1]);
}

TEST(LogPsi, MaskedSectorNormalization) {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const auto e = random_ensemble(n, rng);
    const PhysicalityOracle o(e);
    const auto m = AnqsModel::random({n, 4, -0.01}, rng(), 3.0);
    const MaskingContext mu(PruneStrategy::mask(0), o), du(PruneStrategy::discard(), o);
    double sum_mu = 0, sum_du = 0;
    for (basis_t x = 0; x < (basis_t{1} << n); ++x) {
      const complex_t lm = log_psi(m, mu, x), ld = log_psi(m, du, x);
      if (e.contains(x)) {
        sum_mu += born_probability(lm);
        sum_du += born_probability(ld);
        EXPECT_NEAR(born_probability(lm), oracle_probability(m, e, PruneStrategy::mask(0), x), 1e-12);
      } else {
        EXPECT_TRUE(is_log_zero(lm));
      }
      complex_t raw = 0;
      for (std::size_t d = 0; d < n; ++d) raw += m.conditional_log_amps(d, x & low_mask(d))[bit_at(x, d)];
      EXPECT_LT(std::abs(ld - raw), 1e-12);
    }
    EXPECT_NEAR(sum_mu, 1.0, 1e-8);
    EXPECT_LE(sum_du, 1.0 + 1e-12);
  }
}

TEST(LogPsi, TailLevelsUnderMuD) {
  std::mt19937_64 rng(67);
  const std::size_t n = 6;
  const auto e = electrons(n, 3);
  const PhysicalityOracle o(e);
  const auto m = AnqsModel::random({n, 4, -0.01}, 9);
  const MaskingContext ctx(PruneStrategy::mask(2), o);
  for (basis_t x = 0; x < 64; ++x) {
    const complex_t l = log_psi(m, ctx, x);
    if (!e.contains(x)) {
      EXPECT_TRUE(is_log_zero(l));
      continue;
    }
    EXPECT_NEAR(born_probability(l), oracle_probability(m, e, PruneStrategy::mask(2), x), 1e-12);
  }
  // batch evaluation agrees with one-at-a-time
  std::vector<basis_t> xs(64);
  std::iota(xs.begin(), xs.end(), basis_t{0});
  std::vector<complex_t> out(64);
  log_psi_batch(m, ctx, xs, out);
  for (basis_t x = 0; x < 64; ++x) EXPECT_LT(std::abs(out[x] - log_psi(m, ctx, x)), 1e-12);
}

TEST(Score, MatchesFiniteDifferences) {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rep % 5;
    const auto e = random_ensemble(n, rng);
    const PhysicalityOracle o(e);
    auto m = AnqsModel::random({n, 3, -0.01}, rng(), 1.0);
    const auto sector = brute_sector(e);
    const basis_t x = sector[rng() % sector.size()];
    for (auto strategy : {PruneStrategy::discard(), PruneStrategy::mask(0)}) {
      const MaskingContext ctx(strategy, o);
      const auto exact = score(m, ctx, x);
      const auto fd = finite_difference_score(m, ctx, x);
      EXPECT_LE(relative_error(exact, fd), 1e-5) << "n=" << n << " " << strategy.str();
    }
  }
}

TEST(Score, ForcedLevelsHaveZeroScore) {
  const auto e = electrons(4, 2);
  const PhysicalityOracle o(e);
  const auto m = AnqsModel::random({4, 4, -0.01}, 4);
  const MaskingContext ctx(PruneStrategy::mask(0), o);
  const auto s = score(m, ctx, parse_bits("1100"));
  // after "11" both remaining bits are forced to 0
  for (std::size_t d : {2u, 3u}) {
    const auto [b, end] = m.parameter_range(d);
    for (std::size_t r = b; r < end; ++r) EXPECT_EQ(s[r], complex_t{});
  }
  const auto [b0, e0] = m.parameter_range(0);
  double norm = 0;
  for (std::size_t r = b0; r < e0; ++r) norm += std::abs(s[r]);
  EXPECT_GT(norm, 0.0);
}

TEST(Checkpoint, RoundTripAndDeterministicInit) {
  const auto m = AnqsModel::random({5, 6, 0.01}, 77);
  const auto back = model_from_checkpoint(json::parse(checkpoint_to_json(m, 77, 12).dump()));
  EXPECT_EQ(back.shape(), m.shape());
  ASSERT_EQ(back.n_parameters(), m.n_parameters());
  for (std::size_t r = 0; r < m.n_parameters(); ++r) EXPECT_EQ(back.parameters()[r], m.parameters()[r]);
  const auto again = AnqsModel::random({5, 6, 0.01}, 77), other = AnqsModel::random({5, 6, 0.01}, 78);
  EXPECT_TRUE(std::equal(again.parameters().begin(), again.parameters().end(), m.parameters().begin()));
  EXPECT_FALSE(std::equal(other.parameters().begin(), other.parameters().end(), m.parameters().begin()));
  EXPECT_THROW(model_from_checkpoint(json::parse(R"({"n_qubits": 2})")), ParseError);
}
