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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "anqs/config.hpp"
#include "anqs/ed.hpp"
#include "anqs/io.hpp"
#include "anqs/physicality.hpp"
#include "anqs/sampler.hpp"
#include "anqs/vmc.hpp"

namespace anqs {

/// Problem plus its sector, ready for sampling or diagonalization.
struct Session {
  Problem problem;
  SymmetryEnsemble ensemble;
};

inline Session open_session(const RunConfig& c) {
  Problem p = load_problem(c);
  SymmetryEnsemble e = build_ensemble(c.symmetries, p);
  if (c.check_symmetries && p.hamiltonian && !e.descriptors().empty()) check_hamiltonian_symmetry(*p.hamiltonian, e);
  return {std::move(p), std::move(e)};
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json big_int_to_json(const big_int& v) {
  if (v <= big_int(std::numeric_limits<std::uint64_t>::max())) return static_cast<std::uint64_t>(v);
  return v.str();
}

inline AnqsModel initial_model(const RunConfig& c, std::size_t n_qubits) {
  if (c.init_checkpoint) {
    AnqsModel m = read_checkpoint(*c.init_checkpoint);
    if (m.n_qubits() != n_qubits) throw ConfigError("checkpoint qubit count does not match the Hamiltonian");
    return m;
  }
  NetworkShape shape = c.network;
  shape.n_qubits = n_qubits;
  return AnqsModel::random(shape, hash_combine(c.seed, 0x6d6f64656cULL), c.output_gain);
}

/// Outcome of `run`: the trace plus whether it ended early.
struct RunResult {
  RunTrace trace;
  bool aborted = false;
  std::string abort_reason;
};

/// Runs the optimization and writes trace.csv, summary.json and checkpoints
/// into the configured output directory.
inline RunResult cmd_run(const RunConfig& c, std::ostream* progress = nullptr) {
  Session s = open_session(c);
  if (!s.problem.hamiltonian) throw ConfigError("run needs a Hamiltonian source");
  const QubitHamiltonian& h = *s.problem.hamiltonian;
  const PhysicalityOracle oracle(s.ensemble);
  const MaskingContext ctx(c.strategy, oracle);
  AnqsModel model = initial_model(c, h.n_qubits());

  namespace fs = std::filesystem;
  const fs::path out(c.output_dir);
  fs::create_directories(out);
  std::ofstream trace_csv(out / "trace.csv");
  if (!trace_csv) throw InputError("cannot write to '" + out.string() + "'");
  trace_csv << "iter,energy,variance,n_unique,retained,wall_ms\n";

  RunOptions opt;
  opt.iterations = c.iterations;
  opt.schedule = c.schedule;
  opt.adam = c.adam;
  opt.seed = c.seed;
  opt.max_consecutive_empty = c.max_consecutive_empty;
  opt.threads = c.threads;
  opt.record_timing = c.record_timing;

  auto write_checkpoint = [&](const AnqsModel& m, std::uint64_t t, const fs::path& file) {
    std::ofstream f(file);
    f << checkpoint_to_json(m, c.seed, t).dump() << '\n';
  };

  RunResult result;
  std::uint64_t last = 0;
  auto on_iteration = [&](const IterationRecord& r, const AnqsModel& m) {
    result.trace.add(r);
    last = r.iteration;
    trace_csv << r.iteration << ',' << format_double(r.energy) << ',' << format_double(r.variance) << ',' << r.n_unique
              << ',' << r.retained << ',' << format_double(r.wall_ms) << '\n';
    if (c.checkpoint_every && r.iteration % c.checkpoint_every == 0)
      write_checkpoint(m, r.iteration, out / ("checkpoint_" + std::to_string(r.iteration) + ".json"));
    if (progress && (r.iteration % 100 == 0 || r.iteration == c.iterations))
      *progress << "iter " << r.iteration << " energy " << format_double(r.energy) << " min "
                << format_double(result.trace.min_energy) << '\n';
  };
  try {
    run(model, ctx, h, opt, on_iteration);
  } catch (const RunAborted& e) {
    result.aborted = true;
    result.abort_reason = e.what();
  }
  trace_csv.flush();
  write_checkpoint(model, last, out / "checkpoint.json");

  std::uint64_t skipped = 0;
  double final_energy = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : result.trace.records) {
    if (r.skipped) ++skipped;
    else final_energy = r.energy;
  }
  const bool any = std::isfinite(result.trace.min_energy);
  json summary{{"min_energy", any ? json(result.trace.min_energy) : json(nullptr)},
               {"iteration_of_min", result.trace.iteration_of_min},
               {"final_energy", std::isnan(final_energy) ? json(nullptr) : json(final_energy)},
               {"iterations_completed", last},
               {"skipped_iterations", skipped},
               {"aborted", result.aborted},
               {"seed", c.seed},
               {"n_qubits", h.n_qubits()},
               {"n_parameters", model.n_parameters()},
               {"sector_dimension", big_int_to_json(count_sector(s.ensemble))},
               {"config", config_to_json(c)}};
  if (result.aborted) summary["abort_reason"] = result.abort_reason;
  std::ofstream(out / "summary.json") << summary.dump(2) << '\n';
  return result;
}

/// Exact ground energy in the configured sector (or the full space).
inline json cmd_ed(const RunConfig& c, bool full_space = false) {
  Session s = open_session(c);
  if (!s.problem.hamiltonian) throw ConfigError("ed needs a Hamiltonian source");
  GroundStateOptions opt;
  opt.threads = c.threads;
  const SymmetryEnsemble e = full_space ? SymmetryEnsemble(s.problem.n_qubits) : s.ensemble;
  const big_int dim = count_sector(e);
  if (dim > big_int(opt.max_dimension))
    throw CapacityError("sector dimension " + dim.str() + " exceeds the ED cap of " + std::to_string(opt.max_dimension));
  return {{"energy", ground_energy(*s.problem.hamiltonian, e, opt)},
          {"sector_dimension", static_cast<std::uint64_t>(dim)},
          {"n_qubits", s.problem.n_qubits}};
}

/// Sector size with and without the multiplicative (Z2) descriptors.
inline json cmd_count_sector(const RunConfig& c) {
  Session s = open_session(c);
  SymmetryEnsemble additive(s.problem.n_qubits);
  for (std::size_t m = 0; m < s.ensemble.descriptors().size(); ++m)
    if (s.ensemble.descriptors()[m].kind() == Composition::additive)
      additive.add(s.ensemble.descriptors()[m], s.ensemble.targets()[m]);
  return {{"with_z2", big_int_to_json(count_sector(s.ensemble))}, {"without_z2", big_int_to_json(count_sector(additive))}};
}

/// Loads a Pauli JSON or FCIDUMP Hamiltonian; reports the electron count when
/// the file carries one.
inline std::pair<QubitHamiltonian, std::optional<int>> load_hamiltonian_file(const std::string& path) {
  RunConfig c;
  c.hamiltonian.path = path;
  c.hamiltonian.kind = std::filesystem::path(path).extension() == ".json" ? HamiltonianSource::Kind::pauli
                                                                          : HamiltonianSource::Kind::fcidump;
  Problem p = load_problem(c);
  return {std::move(*p.hamiltonian), p.n_electrons};
}

/// Independent Z-string symmetries of H with eigenvalues on the reference
/// (Hartree-Fock when an electron count is known, the vacuum otherwise).
inline json cmd_discover_z2(const std::string& path, std::optional<int> n_electrons = std::nullopt,
                            const std::optional<std::string>& reference = std::nullopt) {
  auto [h, file_ne] = load_hamiltonian_file(path);
  const std::size_t n = h.n_qubits();
  const std::optional<int> ne = n_electrons ? n_electrons : file_ne;
  basis_t ref = 0;
  if (reference) ref = parse_bits(*reference, n);
  else if (ne) {
    if (*ne < 0 || static_cast<std::size_t>(*ne) > n) throw InputError("electron count out of range");
    ref = hf_state(n, static_cast<std::size_t>(*ne));
  }
  json list = json::array();
  for (basis_t mask : discover_z2(h))
    list.push_back({{"z", z_string(mask, n)}, {"eigenvalue", popcount(mask & ref) % 2 ? -1 : 1}});
  return {{"n_qubits", n}, {"reference", format_bits(ref, n)}, {"symmetries", list}};
}

/// Draws one batch of statistics and writes it as JSON lines {"x", "n"}.
inline SamplingStatistics cmd_sample(const RunConfig& c, std::uint64_t n_samples, std::ostream& out) {
  Session s = open_session(c);
  const PhysicalityOracle oracle(s.ensemble);
  const MaskingContext ctx(c.strategy, oracle);
  const AnqsModel model = initial_model(c, s.problem.n_qubits);
  SamplingStatistics stats = sample_statistics(model, ctx, n_samples, iteration_stream(c.seed, 0));
  for (const auto& e : stats.entries)
    out << json{{"x", format_bits(e.x, s.problem.n_qubits)}, {"n", e.count}}.dump() << '\n';
  return stats;
}

/// FCIDUMP -> Pauli JSON (with the electron count attached).
inline json cmd_jordan_wigner(const std::string& fcidump_path) {
  std::ifstream in(fcidump_path);
  if (!in) throw InputError("cannot open FCIDUMP '" + fcidump_path + "'");
  const IntegralSet ints = parse_fcidump(in);
  json j = hamiltonian_to_json(jordan_wigner(ints));
  j["n_electrons"] = ints.n_electrons();
  return j;
}

}  // namespace anqs
