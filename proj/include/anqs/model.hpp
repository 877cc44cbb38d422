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
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anqs/common.hpp"
#include "anqs/physicality.hpp"

namespace anqs {

/// Log-amplitude standing in for ln 0. Kept finite so that arithmetic on it
/// never produces NaN; exponentiated probabilities are forced to exactly 0.
inline constexpr double log_zero = -1e30;

inline bool is_log_zero(const complex_t& v) noexcept { return v.real() <= 0.5 * log_zero; }

inline double born_probability(const complex_t& log_amp) noexcept {
  return is_log_zero(log_amp) ? 0.0 : std::exp(2.0 * log_amp.real());
}

/// How sample counts routed to unphysical subtrees are treated.
///  - discard: counts sent to an unphysical child are dropped (DU).
///  - mask(d): conditionals at depths < N - d are masked so that unphysical
///    children get probability 0; the last d levels behave as DU.
class PruneStrategy {
 public:
  enum class Kind { discard_unphysical, mask_unphysical };

  static PruneStrategy discard() { return {Kind::discard_unphysical, 0}; }
  static PruneStrategy mask(std::size_t tail = 0) { return {Kind::mask_unphysical, tail}; }

  /// "du", "mu" (= "mu-0"), "mu-<d>".
  static PruneStrategy parse(const std::string& s) {
    if (s == "du") return discard();
    if (s == "mu") return mask(0);
    if (s.rfind("mu-", 0) == 0 && s.size() > 3 && s.find_first_not_of("0123456789", 3) == std::string::npos)
      return mask(std::stoul(s.substr(3)));
    throw InputError("unknown pruning strategy '" + s + "' (expected du, mu or mu-<d>)");
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t tail() const noexcept { return tail_; }
  bool is_mask() const noexcept { return kind_ == Kind::mask_unphysical; }

  /// Whether the conditional at `depth` (number of fixed bits) is masked.
  bool masks(std::size_t depth, std::size_t n_qubits) const noexcept {
    return is_mask() && depth + tail_ < n_qubits;
  }

  void validate(std::size_t n_qubits) const {
    if (is_mask() && tail_ >= n_qubits)
      throw ConfigError("mu-" + std::to_string(tail_) + " needs d < N = " + std::to_string(n_qubits));
  }

  std::string str() const { return is_mask() ? "mu-" + std::to_string(tail_) : "du"; }

  friend bool operator==(const PruneStrategy&, const PruneStrategy&) = default;

 private:
  PruneStrategy(Kind k, std::size_t tail) : kind_(k), tail_(tail) {}
  Kind kind_;
  std::size_t tail_;
};

/// Pruning strategy bound to the physicality oracle of the target sector.
struct MaskingContext {
  PruneStrategy strategy;
  const PhysicalityOracle* oracle;

  MaskingContext(PruneStrategy s, const PhysicalityOracle& o) : strategy(s), oracle(&o) { s.validate(o.n_qubits()); }
};

struct NetworkShape {
  std::size_t n_qubits = 0;
  std::size_t hidden = 64;
  /// LeReLU(x) = x for x >= 0, negative_slope * x otherwise.
  double negative_slope = -0.01;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

using LogAmpPair = std::array<complex_t, 2>;

/// Autoregressive ansatz psi(x) = prod_i psi_i(x_i | x_<i). Conditional i is
/// a complex-weight MLP on the i previous bits (encoded as -1/+1):
///   tanh -> affine -> split LeReLU -> affine -> z - LogSumExp(2 Re z)/2.
/// All weights live in one flat real vector holding (re, im) pairs; Eigen
/// matrices are column-major maps onto it.
class AnqsModel {
 public:
  AnqsModel() = default;

  explicit AnqsModel(NetworkShape shape) : shape_(shape) {
    check_qubit_count(shape.n_qubits);
    if (shape.hidden == 0) throw InputError("hidden width must be positive");
    std::size_t offset = 0;
    const std::size_t h = shape.hidden;
    for (std::size_t d = 0; d < shape.n_qubits; ++d) {
      Layout l{};
      l.w1 = offset; offset += h * d;
      l.b1 = offset; offset += h;
      l.w2 = offset; offset += h * h;
      l.b2 = offset; offset += h;
      l.w3 = offset; offset += 2 * h;
      l.b3 = offset; offset += 2;
      layout_.push_back(l);
    }
    params_.assign(2 * offset, 0.0);
  }

  /// Real and imaginary parts drawn from N(0, 1/fan_in); the output layer is
  /// further multiplied by `output_gain`.
  static AnqsModel random(NetworkShape shape, std::uint64_t seed, double output_gain = 1.0) {
    AnqsModel m(shape);
    std::mt19937_64 rng(seed);
    const std::size_t h = shape.hidden;
    for (std::size_t d = 0; d < shape.n_qubits; ++d) {
      const auto& l = m.layout_[d];
      auto fill = [&](std::size_t begin, std::size_t count, std::size_t fan_in, double gain = 1.0) {
        std::normal_distribution<double> dist(0.0, gain / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1))));
        for (std::size_t k = 2 * begin; k < 2 * (begin + count); ++k) m.params_[k] = dist(rng);
      };
      fill(l.w1, h * d, d);
      fill(l.b1, h, d);
      fill(l.w2, h * h, h);
      fill(l.b2, h, h);
      fill(l.w3, 2 * h, h, output_gain);
      fill(l.b3, 2, h, output_gain);
    }
    return m;
  }

  const NetworkShape& shape() const noexcept { return shape_; }
  std::size_t n_qubits() const noexcept { return shape_.n_qubits; }
  std::size_t n_parameters() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  /// Real-parameter range [begin, end) owned by conditional `depth`.
  std::pair<std::size_t, std::size_t> parameter_range(std::size_t depth) const {
    const std::size_t end = depth + 1 < layout_.size() ? layout_[depth + 1].w1 : params_.size() / 2;
    return {2 * layout_.at(depth).w1, 2 * end};
  }

  /// Raw (unmasked) log-amplitudes of x_depth = 0, 1 given the first `depth`
  /// bits of `prefix`. Bits at positions >= depth are ignored.
  LogAmpPair conditional_log_amps(std::size_t depth, basis_t prefix) const {
    LogAmpPair out;
    conditional_batch(depth, std::span<const basis_t>(&prefix, 1), std::span<LogAmpPair>(&out, 1));
    return out;
  }

  void conditional_batch(std::size_t depth, std::span<const basis_t> prefixes, std::span<LogAmpPair> out) const {
    if (depth >= n_qubits()) throw InputError("conditional depth out of range");
    if (out.size() != prefixes.size()) throw InputError("output span size mismatch");
    if (prefixes.empty()) return;
    Forward f = forward(depth, prefixes);
    for (std::size_t b = 0; b < prefixes.size(); ++b) out[b] = {f.out(0, b), f.out(1, b)};
  }

  /// grad += d/dtheta sum_b Re(conj(seed_b) * log psi_depth(bit_b | prefix_b)).
  /// With seed 1 this is the gradient of Re ln psi_depth, with seed i that of
  /// Im ln psi_depth. `grad` is indexed like parameters().
  void conditional_backward(std::size_t depth, std::span<const basis_t> prefixes, std::span<const int> bits,
                            std::span<const complex_t> seeds, std::span<double> grad) const {
    if (prefixes.size() != bits.size() || prefixes.size() != seeds.size()) throw InputError("backward span size mismatch");
    if (grad.size() != params_.size()) throw InputError("gradient buffer has the wrong size");
    if (prefixes.empty()) return;
    const std::size_t h = shape_.hidden;
    const auto batch = static_cast<Eigen::Index>(prefixes.size());
    const Forward f = forward(depth, prefixes);
    const auto& l = layout_[depth];
    auto* g = reinterpret_cast<complex_t*>(grad.data());

    // Cogradients dF/dRe(v) + i dF/dIm(v) for each complex intermediate v.
    Eigen::MatrixXcd g3(2, batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
      const double a0 = 2.0 * f.z3(0, b).real(), a1 = 2.0 * f.z3(1, b).real();
      const double mx = std::max(a0, a1);
      const double e0 = std::exp(a0 - mx), e1 = std::exp(a1 - mx);
      const std::array<double, 2> p{e0 / (e0 + e1), e1 / (e0 + e1)};
      const complex_t s = seeds[static_cast<std::size_t>(b)];
      const int bit = bits[static_cast<std::size_t>(b)];
      for (int r = 0; r < 2; ++r) {
        const double delta = r == bit ? 1.0 : 0.0;
        g3(r, b) = complex_t{s.real() * (delta - p[static_cast<std::size_t>(r)]), s.imag() * delta};
      }
    }
    Eigen::Map<Eigen::MatrixXcd>(g + l.w3, 2, static_cast<Eigen::Index>(h)) += g3 * f.h2.adjoint();
    Eigen::Map<Eigen::VectorXcd>(g + l.b3, 2) += g3.rowwise().sum();

    Eigen::MatrixXcd g2 = w3(depth).adjoint() * g3;
    for (Eigen::Index b = 0; b < batch; ++b)
      for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(h); ++k) {
        const complex_t z = f.z2(k, b);
        const complex_t up = g2(k, b);
        g2(k, b) = {up.real() * lerelu_grad(z.real()), up.imag() * lerelu_grad(z.imag())};
      }
    Eigen::Map<Eigen::MatrixXcd>(g + l.w2, static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h)) += g2 * f.h1.adjoint();
    Eigen::Map<Eigen::VectorXcd>(g + l.b2, static_cast<Eigen::Index>(h)) += g2.rowwise().sum();

    Eigen::MatrixXcd g1 = w2(depth).adjoint() * g2;
    // tanh is holomorphic: cogradient picks up conj(tanh'(z)) = conj(1 - tanh^2).
    g1.array() *= (1.0 - f.h1.array().square()).conjugate();
    if (depth > 0)
      Eigen::Map<Eigen::MatrixXcd>(g + l.w1, static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(depth)) +=
          g1 * f.input.transpose();
    Eigen::Map<Eigen::VectorXcd>(g + l.b1, static_cast<Eigen::Index>(h)) += g1.rowwise().sum();
  }

 private:
  struct Layout {
    std::size_t w1, b1, w2, b2, w3, b3;  // offsets in complex entries
  };

  struct Forward {
    Eigen::MatrixXcd input;  // depth x B, entries +/-1
    Eigen::MatrixXcd h1, z2, h2, z3, out;
  };

  using ConstMap = Eigen::Map<const Eigen::MatrixXcd>;

  const complex_t* cdata() const noexcept { return reinterpret_cast<const complex_t*>(params_.data()); }
  ConstMap w1(std::size_t d) const {
    return {cdata() + layout_[d].w1, static_cast<Eigen::Index>(shape_.hidden), static_cast<Eigen::Index>(d)};
  }
  ConstMap b1(std::size_t d) const { return {cdata() + layout_[d].b1, static_cast<Eigen::Index>(shape_.hidden), 1}; }
  ConstMap w2(std::size_t d) const {
    return {cdata() + layout_[d].w2, static_cast<Eigen::Index>(shape_.hidden), static_cast<Eigen::Index>(shape_.hidden)};
  }
  ConstMap b2(std::size_t d) const { return {cdata() + layout_[d].b2, static_cast<Eigen::Index>(shape_.hidden), 1}; }
  ConstMap w3(std::size_t d) const { return {cdata() + layout_[d].w3, 2, static_cast<Eigen::Index>(shape_.hidden)}; }
  ConstMap b3(std::size_t d) const { return {cdata() + layout_[d].b3, 2, 1}; }

  double lerelu(double x) const noexcept { return x >= 0.0 ? x : shape_.negative_slope * x; }
  double lerelu_grad(double x) const noexcept { return x >= 0.0 ? 1.0 : shape_.negative_slope; }

  Forward forward(std::size_t depth, std::span<const basis_t> prefixes) const {
    const auto batch = static_cast<Eigen::Index>(prefixes.size());
    const auto h = static_cast<Eigen::Index>(shape_.hidden);
    Forward f;
    f.input.resize(static_cast<Eigen::Index>(depth), batch);
    for (Eigen::Index b = 0; b < batch; ++b)
      for (std::size_t j = 0; j < depth; ++j)
        f.input(static_cast<Eigen::Index>(j), b) = bit_at(prefixes[static_cast<std::size_t>(b)], j) ? 1.0 : -1.0;

    Eigen::MatrixXcd z1 = b1(depth).replicate(1, batch);
    if (depth > 0) z1.noalias() += w1(depth) * f.input;
    f.h1 = z1.unaryExpr([](const complex_t& z) { return std::tanh(z); });
    f.z2 = b2(depth).replicate(1, batch);
    f.z2.noalias() += w2(depth) * f.h1;
    f.h2.resize(h, batch);
    for (Eigen::Index b = 0; b < batch; ++b)
      for (Eigen::Index k = 0; k < h; ++k)
        f.h2(k, b) = {lerelu(f.z2(k, b).real()), lerelu(f.z2(k, b).imag())};
    f.z3 = b3(depth).replicate(1, batch);
    f.z3.noalias() += w3(depth) * f.h2;
    f.out = f.z3;
    for (Eigen::Index b = 0; b < batch; ++b) {
      const double a0 = 2.0 * f.z3(0, b).real(), a1 = 2.0 * f.z3(1, b).real();
      const double mx = std::max(a0, a1);
      const double lse = mx + std::log(std::exp(a0 - mx) + std::exp(a1 - mx));
      f.out(0, b) -= 0.5 * lse;
      f.out(1, b) -= 0.5 * lse;
    }
    return f;
  }

  NetworkShape shape_;
  std::vector<Layout> layout_;
  std::vector<double> params_;
};

/// Applies the masking rule to a raw conditional at a node with partial key
/// `key`. At masked depths a node with one unphysical child is forced to the
/// physical one: log-amps (0, log_zero) or (log_zero, 0). Elsewhere the raw
/// pair passes through unchanged. `forced` reports whether masking replaced
/// the pair (the result is then parameter independent).
inline LogAmpPair apply_mask(const LogAmpPair& raw, const MaskingContext& ctx, std::size_t depth, eigen_key_t key,
                             bool* forced = nullptr) {
  if (forced) *forced = false;
  if (!ctx.strategy.masks(depth, ctx.oracle->n_qubits())) return raw;
  const auto [phys0, phys1] = ctx.oracle->child_physicality(depth, key);
  if (phys0 && phys1) return raw;
  if (forced) *forced = true;
  return phys0 ? LogAmpPair{complex_t{0.0}, complex_t{log_zero}} : LogAmpPair{complex_t{log_zero}, complex_t{0.0}};
}

inline LogAmpPair conditional_log_amps(const AnqsModel& model, std::size_t depth, basis_t prefix) {
  return model.conditional_log_amps(depth, prefix);
}

/// Masked conditional for the node reached by `prefix` (key must match).
inline LogAmpPair masked_conditional_log_amps(const AnqsModel& model, const MaskingContext& ctx, std::size_t depth,
                                              basis_t prefix, eigen_key_t key) {
  return apply_mask(model.conditional_log_amps(depth, prefix), ctx, depth, key);
}

/// ln psi for a batch of full basis vectors. Under masking strategies, any x
/// outside the sector gets log_zero; under DU the raw product is returned.
/// Prefixes shared between vectors are evaluated once per depth.
inline void log_psi_batch(const AnqsModel& model, const MaskingContext& ctx, std::span<const basis_t> xs,
                          std::span<complex_t> out) {
  const std::size_t n = model.n_qubits();
  if (out.size() != xs.size()) throw InputError("output span size mismatch");
  if (ctx.oracle->n_qubits() != n) throw InputError("oracle and model qubit counts differ");
  const auto& codec = ctx.oracle->codec();
  std::vector<eigen_key_t> keys(xs.size(), codec.root());
  std::vector<char> alive(xs.size(), 1);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    check_basis(xs[k], n);
    out[k] = 0.0;
  }
  std::vector<basis_t> prefixes;
  std::vector<LogAmpPair> amps;
  for (std::size_t d = 0; d < n; ++d) {
    const basis_t m = low_mask(d);
    prefixes.clear();
    for (std::size_t k = 0; k < xs.size(); ++k)
      if (alive[k]) prefixes.push_back(xs[k] & m);
    std::sort(prefixes.begin(), prefixes.end());
    prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
    amps.resize(prefixes.size());
    model.conditional_batch(d, prefixes, amps);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (!alive[k]) continue;
      const auto idx = static_cast<std::size_t>(std::lower_bound(prefixes.begin(), prefixes.end(), xs[k] & m) - prefixes.begin());
      const int bit = bit_at(xs[k], d);
      const eigen_key_t child = codec.step(keys[k], d, bit);
      if (ctx.strategy.is_mask() && !ctx.oracle->is_phys(d + 1, child)) {
        out[k] = log_zero;
        alive[k] = 0;
        continue;
      }
      const LogAmpPair a = apply_mask(amps[idx], ctx, d, keys[k]);
      out[k] += a[static_cast<std::size_t>(bit)];
      keys[k] = child;
    }
  }
}

inline complex_t log_psi(const AnqsModel& model, const MaskingContext& ctx, basis_t x) {
  complex_t out;
  log_psi_batch(model, ctx, std::span<const basis_t>(&x, 1), std::span<complex_t>(&out, 1));
  return out;
}

/// grad += d/dtheta sum_k Re(conj(seed_k) * ln psi(x_k)) under the context's
/// masking. Forced (masked) conditionals are constants and contribute
/// nothing. Every x must have a finite ln psi.
inline void accumulate_log_psi_gradient(const AnqsModel& model, const MaskingContext& ctx, std::span<const basis_t> xs,
                                        std::span<const complex_t> seeds, std::span<double> grad) {
  const std::size_t n = model.n_qubits();
  if (seeds.size() != xs.size()) throw InputError("seed span size mismatch");
  const auto& codec = ctx.oracle->codec();
  std::vector<eigen_key_t> keys(xs.size(), codec.root());
  std::vector<basis_t> prefixes;
  std::vector<int> bits;
  std::vector<complex_t> level_seeds;
  for (std::size_t d = 0; d < n; ++d) {
    prefixes.clear();
    bits.clear();
    level_seeds.clear();
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const int bit = bit_at(xs[k], d);
      bool forced = false;
      if (ctx.strategy.masks(d, n)) {
        const auto [phys0, phys1] = ctx.oracle->child_physicality(d, keys[k]);
        if (!(bit ? phys1 : phys0)) throw ContractViolation("gradient requested for a vector outside the sector");
        forced = !(phys0 && phys1);
      }
      if (!forced && seeds[k] != complex_t{}) {
        prefixes.push_back(xs[k] & low_mask(d));
        bits.push_back(bit);
        level_seeds.push_back(seeds[k]);
      }
      keys[k] = codec.step(keys[k], d, bit);
    }
    model.conditional_backward(d, prefixes, bits, level_seeds, grad);
  }
}

/// O(x) = grad_theta ln psi*(x): entry r is dRe(ln psi)/dtheta_r - i dIm(ln psi)/dtheta_r.
inline std::vector<complex_t> score(const AnqsModel& model, const MaskingContext& ctx, basis_t x) {
  std::vector<double> g_re(model.n_parameters(), 0.0), g_im(model.n_parameters(), 0.0);
  const complex_t one{1.0, 0.0}, unit_i{0.0, 1.0};
  accumulate_log_psi_gradient(model, ctx, std::span<const basis_t>(&x, 1), std::span<const complex_t>(&one, 1), g_re);
  accumulate_log_psi_gradient(model, ctx, std::span<const basis_t>(&x, 1), std::span<const complex_t>(&unit_i, 1), g_im);
  std::vector<complex_t> o(model.n_parameters());
  for (std::size_t r = 0; r < o.size(); ++r) o[r] = {g_re[r], -g_im[r]};
  return o;
}

}  // namespace anqs
