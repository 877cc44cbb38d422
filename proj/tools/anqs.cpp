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

// Command-line front end: run, ed, count-sector, discover-z2, sample.

#include <iostream>

#include "CLI11.hpp"
#include "anqs/cli.hpp"

namespace {

enum ExitCode { ok = 0, usage = 1, bad_input = 2, aborted = 3, capacity = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autoregressive neural quantum states with symmetry-restricted sampling"};
  app.require_subcommand(1);

  std::string config_path, hamiltonian_path, reference;
  int n_electrons = -1;
  std::uint64_t n_samples = 0;
  bool full_space = false, quiet = false;

  auto* run = app.add_subcommand("run", "optimize the ansatz; writes trace.csv and summary.json");
  run->add_option("-c,--config", config_path, "run config (.toml or .json)")->required()->check(CLI::ExistingFile);
  run->add_flag("-q,--quiet", quiet, "no progress on stderr");

  auto* ed = app.add_subcommand("ed", "exact ground energy in the configured sector");
  ed->add_option("-c,--config", config_path)->required()->check(CLI::ExistingFile);
  ed->add_flag("--full", full_space, "ignore the symmetry sector");

  auto* count = app.add_subcommand("count-sector", "sector size with and without Z2 symmetries");
  count->add_option("-c,--config", config_path)->required()->check(CLI::ExistingFile);

  auto* z2 = app.add_subcommand("discover-z2", "list independent Z-string symmetries");
  z2->add_option("--hamiltonian", hamiltonian_path, "Pauli JSON or FCIDUMP")->required()->check(CLI::ExistingFile);
  z2->add_option("--n-electrons", n_electrons, "electrons in the Hartree-Fock reference");
  z2->add_option("--reference", reference, "explicit reference bit string");

  auto* sample = app.add_subcommand("sample", "draw one batch of sample statistics as JSON lines");
  sample->add_option("-c,--config", config_path)->required()->check(CLI::ExistingFile);
  sample->add_option("-n,--n", n_samples, "number of samples")->required()->check(CLI::PositiveNumber);

  auto* jw = app.add_subcommand("jordan-wigner", "convert an FCIDUMP to Pauli JSON");
  jw->add_option("--fcidump", hamiltonian_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto result = anqs::cmd_run(anqs::read_config(config_path), quiet ? nullptr : &std::cerr);
      if (result.aborted) {
        std::cerr << "anqs: run aborted: " << result.abort_reason << '\n';
        return aborted;
      }
    } else if (ed->parsed()) {
      std::cout << anqs::cmd_ed(anqs::read_config(config_path), full_space).dump() << '\n';
    } else if (count->parsed()) {
      std::cout << anqs::cmd_count_sector(anqs::read_config(config_path)).dump() << '\n';
    } else if (z2->parsed()) {
      std::optional<int> ne;
      if (n_electrons >= 0) ne = n_electrons;
      std::optional<std::string> ref;
      if (!reference.empty()) ref = reference;
      std::cout << anqs::cmd_discover_z2(hamiltonian_path, ne, ref).dump(2) << '\n';
    } else if (sample->parsed()) {
      anqs::cmd_sample(anqs::read_config(config_path), n_samples, std::cout);
    } else if (jw->parsed()) {
      std::cout << anqs::cmd_jordan_wigner(hamiltonian_path).dump(2) << '\n';
    }
  } catch (const anqs::ConfigError& e) {
    std::cerr << "anqs: config error: " << e.what() << '\n';
    return usage;
  } catch (const anqs::CapacityError& e) {
    std::cerr << "anqs: " << e.what() << '\n';
    return capacity;
  } catch (const std::exception& e) {
    std::cerr << "anqs: " << e.what() << '\n';
    return bad_input;
  }
  return ok;
}
