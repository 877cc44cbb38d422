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

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "anqs/common.hpp"
#include "anqs/model.hpp"
#include "anqs/pauli.hpp"
#include "anqs/sampler.hpp"

namespace anqs {

/// H_loc(x) = sum_x' <x|H|x'> psi(x') / psi(x) for each x, with psi the
/// masked amplitudes of the context. All distinct x' are evaluated in one
/// batched pass. With `check_sector`, a nonzero coupling to an x' outside
/// the sector is reported as a ContractViolation (the Hamiltonian does not
/// respect the chosen symmetries).
inline std::vector<complex_t> local_energies(const AnqsModel& model, const MaskingContext& ctx, const QubitHamiltonian& h,
                                             std::span<const basis_t> xs, std::size_t threads = 1,
                                             bool check_sector = true) {
  if (h.n_qubits() != model.n_qubits()) throw InputError("Hamiltonian and model qubit counts differ");
  const auto& ensemble = ctx.oracle->ensemble();
  std::vector<std::vector<Connection>> rows(xs.size());
  std::vector<basis_t> all;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    rows[k] = h.matrix_row(xs[k]);
    all.push_back(xs[k]);
    for (const auto& c : rows[k]) all.push_back(c.x);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<complex_t> log_amps(all.size());
  parallel_chunks(all.size(), 256, threads, [&](std::size_t begin, std::size_t end) {
    log_psi_batch(model, ctx, std::span<const basis_t>(all).subspan(begin, end - begin),
                  std::span<complex_t>(log_amps).subspan(begin, end - begin));
  });
  auto lookup = [&](basis_t x) {
    return log_amps[static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), x) - all.begin())];
  };

  std::vector<complex_t> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const complex_t lx = lookup(xs[k]);
    if (is_log_zero(lx)) throw ContractViolation("local energy requested where psi(x) = 0");
    complex_t e{};
    for (const auto& c : rows[k]) {
      if (check_sector && c.x != xs[k] && !ensemble.contains(c.x))
        throw ContractViolation("Hamiltonian couples " + format_bits(xs[k], h.n_qubits()) + " to " +
                                format_bits(c.x, h.n_qubits()) + " outside the symmetry sector");
      const complex_t lp = lookup(c.x);
      if (is_log_zero(lp)) continue;
      e += c.element * std::exp(lp - lx);
    }
    out[k] = e;
  }
  return out;
}

inline complex_t local_energy(const AnqsModel& model, const MaskingContext& ctx, const QubitHamiltonian& h, basis_t x) {
  return local_energies(model, ctx, h, std::span<const basis_t>(&x, 1)).front();
}

struct EnergyEstimate {
  double value = 0.0;
  complex_t mean{};
  double variance = 0.0;
  std::size_t n_unique = 0;
  std::uint64_t retained = 0;
};

/// Count-weighted mean of local energies. Weights are n / retained, which is
/// n / N_s whenever no samples were lost.
inline EnergyEstimate estimate_energy(const SamplingStatistics& stats, std::span<const complex_t> local) {
  if (stats.empty()) throw InputError("energy estimate needs at least one retained sample");
  if (local.size() != stats.entries.size()) throw InputError("local energies not aligned with sample entries");
  EnergyEstimate est;
  est.n_unique = stats.n_unique();
  est.retained = stats.retained;
  const double total = static_cast<double>(stats.retained);
  for (std::size_t l = 0; l < local.size(); ++l) est.mean += local[l] * (static_cast<double>(stats.entries[l].count) / total);
  for (std::size_t l = 0; l < local.size(); ++l)
    est.variance += std::norm(local[l] - est.mean) * (static_cast<double>(stats.entries[l].count) / total);
  est.value = est.mean.real();
  return est;
}

/// 2 Re{ <H_loc O> - <H_loc><O> } from explicit score vectors.
inline std::vector<double> estimate_gradient(const SamplingStatistics& stats, std::span<const complex_t> local,
                                             std::span<const std::vector<complex_t>> scores) {
  if (stats.empty()) throw InputError("gradient estimate needs at least one retained sample");
  if (local.size() != stats.entries.size() || scores.size() != stats.entries.size())
    throw InputError("gradient inputs not aligned with sample entries");
  const std::size_t p = scores.front().size();
  const double total = static_cast<double>(stats.retained);
  complex_t mean_e{};
  std::vector<complex_t> mean_o(p), mean_eo(p);
  for (std::size_t l = 0; l < local.size(); ++l) {
    const double w = static_cast<double>(stats.entries[l].count) / total;
    mean_e += w * local[l];
    for (std::size_t r = 0; r < p; ++r) {
      mean_o[r] += w * scores[l][r];
      mean_eo[r] += w * local[l] * scores[l][r];
    }
  }
  std::vector<double> g(p);
  for (std::size_t r = 0; r < p; ++r) g[r] = 2.0 * (mean_eo[r] - mean_e * mean_o[r]).real();
  return g;
}

/// Same quantity as estimate_gradient without materializing scores: one
/// backward pass with seeds w_l (H_loc(x_l) - E).
inline std::vector<double> energy_gradient(const AnqsModel& model, const MaskingContext& ctx, const SamplingStatistics& stats,
                                           std::span<const complex_t> local, std::size_t threads = 1) {
  const EnergyEstimate est = estimate_energy(stats, local);
  const double total = static_cast<double>(stats.retained);
  std::vector<basis_t> xs(stats.entries.size());
  std::vector<complex_t> seeds(stats.entries.size());
  for (std::size_t l = 0; l < xs.size(); ++l) {
    xs[l] = stats.entries[l].x;
    seeds[l] = 2.0 * (static_cast<double>(stats.entries[l].count) / total) * (local[l] - est.mean);
  }
  constexpr std::size_t chunk = 128;
  const std::size_t n_chunks = (xs.size() + chunk - 1) / chunk;
  std::vector<std::vector<double>> partial(n_chunks);
  parallel_chunks(xs.size(), chunk, threads, [&](std::size_t begin, std::size_t end) {
    auto& g = partial[begin / chunk];
    g.assign(model.n_parameters(), 0.0);
    accumulate_log_psi_gradient(model, ctx, std::span<const basis_t>(xs).subspan(begin, end - begin),
                                std::span<const complex_t>(seeds).subspan(begin, end - begin), g);
  });
  std::vector<double> grad(model.n_parameters(), 0.0);
  for (const auto& g : partial)
    for (std::size_t r = 0; r < grad.size(); ++r) grad[r] += g[r];
  return grad;
}

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamOptions&, const AdamOptions&) = default;
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n_parameters, AdamOptions options)
      : options_(options), m_(n_parameters, 0.0), v_(n_parameters, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw InputError("ADAM vector length mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
    for (std::size_t r = 0; r < params.size(); ++r) {
      m_[r] = options_.beta1 * m_[r] + (1.0 - options_.beta1) * grad[r];
      v_[r] = options_.beta2 * v_[r] + (1.0 - options_.beta2) * grad[r] * grad[r];
      params[r] -= options_.learning_rate * (m_[r] / c1) / (std::sqrt(v_[r] / c2) + options_.epsilon);
    }
  }

  std::uint64_t steps() const noexcept { return t_; }
  const AdamOptions& options() const noexcept { return options_; }
  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

 private:
  AdamOptions options_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

/// Piecewise-constant number of samples per iteration. Each stage applies up
/// to and including `until`; the last stage has until = 0 and is open-ended.
class BatchSchedule {
 public:
  struct Stage {
    std::uint64_t until;
    std::uint64_t samples;
    friend bool operator==(const Stage&, const Stage&) = default;
  };

  BatchSchedule() : BatchSchedule(desk()) {}

  explicit BatchSchedule(std::vector<Stage> stages) : stages_(std::move(stages)) {
    if (stages_.empty()) throw ConfigError("batch schedule is empty");
    for (std::size_t k = 0; k < stages_.size(); ++k) {
      if (stages_[k].samples == 0) throw ConfigError("batch schedule stage with zero samples");
      const bool last = k + 1 == stages_.size();
      if (last != (stages_[k].until == 0)) throw ConfigError("only the last batch schedule stage may be open-ended");
      if (k > 0 && !last && stages_[k].until <= stages_[k - 1].until)
        throw ConfigError("batch schedule bounds must be strictly increasing");
    }
  }

  /// 1e3 (t <= 100), 1e4 (t <= 200), 1e5 (t <= 1000), 1e6 after.
  static BatchSchedule desk() { return BatchSchedule({{100, 1000}, {200, 10000}, {1000, 100000}, {0, 1000000}}); }
  /// 1e5 (t <= 100), 1e6 (t <= 200), 1e7 (t <= 1000), 1e8 after.
  static BatchSchedule full() {
    return BatchSchedule({{100, 100000}, {200, 1000000}, {1000, 10000000}, {0, 100000000}});
  }
  static BatchSchedule constant(std::uint64_t samples) { return BatchSchedule({{0, samples}}); }

  /// Samples for 1-based iteration t.
  std::uint64_t samples_at(std::uint64_t t) const {
    for (const auto& s : stages_)
      if (s.until == 0 || t <= s.until) return s.samples;
    return stages_.back().samples;
  }

  const std::vector<Stage>& stages() const noexcept { return stages_; }
  friend bool operator==(const BatchSchedule&, const BatchSchedule&) = default;

 private:
  std::vector<Stage> stages_;
};

struct IterationRecord {
  std::uint64_t iteration = 0;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double variance = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_unique = 0;
  std::uint64_t retained = 0;
  double wall_ms = 0.0;
  bool skipped = false;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  double min_energy = std::numeric_limits<double>::infinity();
  std::uint64_t iteration_of_min = 0;

  void add(const IterationRecord& r) {
    records.push_back(r);
    if (!r.skipped && r.energy < min_energy) {
      min_energy = r.energy;
      iteration_of_min = r.iteration;
    }
  }
};

struct RunAborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::uint64_t iterations = 1000;
  BatchSchedule schedule;
  AdamOptions adam;
  std::uint64_t seed = 0;
  std::size_t max_consecutive_empty = 100;
  std::size_t threads = 1;
  bool record_timing = false;
};

/// Random stream for the sampler at a given iteration.
inline std::uint64_t iteration_stream(std::uint64_t seed, std::uint64_t iteration) {
  return hash_combine(hash_combine(seed, 0x73616d706c65ULL), iteration);
}

/// Variational minimization: sample -> local energies -> energy and gradient
/// estimates -> ADAM. `on_iteration` sees every record as it is produced.
/// Iterations that retain no samples are recorded as skipped without a
/// parameter update; too many in a row abort the run.
inline RunTrace run(AnqsModel& model, const MaskingContext& ctx, const QubitHamiltonian& h, const RunOptions& opt,
                    const std::function<void(const IterationRecord&, const AnqsModel&)>& on_iteration = {}) {
  if (h.n_qubits() != model.n_qubits()) throw InputError("Hamiltonian and model qubit counts differ");
  AdamOptimizer adam(model.n_parameters(), opt.adam);
  RunTrace trace;
  std::size_t empty_streak = 0;
  for (std::uint64_t t = 1; t <= opt.iterations; ++t) {
    const auto start = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = t;
    const SamplingStatistics stats = sample_statistics(model, ctx, opt.schedule.samples_at(t), iteration_stream(opt.seed, t));
    if (stats.empty()) {
      rec.skipped = true;
      if (++empty_streak >= opt.max_consecutive_empty)
        throw RunAborted("no samples retained for " + std::to_string(empty_streak) + " consecutive iterations");
    } else {
      empty_streak = 0;
      std::vector<basis_t> xs(stats.entries.size());
      for (std::size_t l = 0; l < xs.size(); ++l) xs[l] = stats.entries[l].x;
      const auto local = local_energies(model, ctx, h, xs, opt.threads);
      const EnergyEstimate est = estimate_energy(stats, local);
      const auto grad = energy_gradient(model, ctx, stats, local, opt.threads);
      adam.step(model.parameters(), grad);
      rec.energy = est.value;
      rec.variance = est.variance;
      rec.n_unique = est.n_unique;
      rec.retained = est.retained;
    }
    if (opt.record_timing)
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    trace.add(rec);
    if (on_iteration) on_iteration(rec, model);
  }
  return trace;
}

}  // namespace anqs
