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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "toml.hpp"

#include "anqs/common.hpp"
#include "anqs/ed.hpp"
#include "anqs/fermion.hpp"
#include "anqs/io.hpp"
#include "anqs/model.hpp"
#include "anqs/pauli.hpp"
#include "anqs/symmetry.hpp"
#include "anqs/vmc.hpp"

namespace anqs {

struct HamiltonianSource {
  enum class Kind { none, pauli, fcidump, heisenberg };
  Kind kind = Kind::none;
  std::string path;           // pauli / fcidump
  std::size_t n_qubits = 0;   // none: qubit count for sector counting
  std::size_t sites = 0;      // heisenberg
  double coupling = 1.0;      // heisenberg
  bool periodic = false;      // heisenberg

  friend bool operator==(const HamiltonianSource&, const HamiltonianSource&) = default;
};

/// Everything needed to reproduce a run. Relative paths are resolved against
/// the directory of the config file when it is read.
struct RunConfig {
  HamiltonianSource hamiltonian;
  std::optional<int> n_electrons;
  std::optional<std::string> reference_state;
  std::vector<std::string> symmetries;
  bool check_symmetries = true;
  PruneStrategy strategy = PruneStrategy::mask(2);
  BatchSchedule schedule = BatchSchedule::desk();
  std::uint64_t iterations = 1000;
  std::uint64_t seed = 0;
  NetworkShape network{0, 64, -0.01};
  /// Scale of the output-layer weights at initialization.
  double output_gain = 0.1;
  AdamOptions adam;
  std::string output_dir = "anqs-out";
  std::uint64_t checkpoint_every = 0;
  std::optional<std::string> init_checkpoint;
  std::size_t threads = 1;
  std::size_t max_consecutive_empty = 100;
  bool record_timing = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal().string();
}

inline std::string kind_name(HamiltonianSource::Kind k) {
  switch (k) {
    case HamiltonianSource::Kind::pauli: return "pauli";
    case HamiltonianSource::Kind::fcidump: return "fcidump";
    case HamiltonianSource::Kind::heisenberg: return "heisenberg";
    default: return "none";
  }
}

inline std::uint64_t to_u64(std::int64_t v, const char* what) {
  if (v < 0) throw ConfigError(std::string(what) + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

inline json config_to_json(const RunConfig& c) {
  json h{{"source", detail::kind_name(c.hamiltonian.kind)}};
  switch (c.hamiltonian.kind) {
    case HamiltonianSource::Kind::pauli:
    case HamiltonianSource::Kind::fcidump: h["path"] = c.hamiltonian.path; break;
    case HamiltonianSource::Kind::heisenberg:
      h["sites"] = c.hamiltonian.sites;
      h["coupling"] = c.hamiltonian.coupling;
      h["periodic"] = c.hamiltonian.periodic;
      break;
    default: h["n_qubits"] = c.hamiltonian.n_qubits;
  }
  if (c.n_electrons) h["n_electrons"] = *c.n_electrons;
  if (c.reference_state) h["reference"] = *c.reference_state;
  json schedule = json::array();
  for (const auto& s : c.schedule.stages()) {
    json st{{"samples", s.samples}};
    if (s.until) st["until"] = s.until;
    schedule.push_back(st);
  }
  json out{{"hamiltonian", h},
           {"symmetries", c.symmetries},
           {"check_symmetries", c.check_symmetries},
           {"sampling", {{"strategy", c.strategy.str()}, {"schedule", schedule}}},
           {"iterations", c.iterations},
           {"seed", c.seed},
           {"network",
            {{"hidden", c.network.hidden},
             {"negative_slope", c.network.negative_slope},
             {"output_gain", c.output_gain}}},
           {"optimizer",
            {{"learning_rate", c.adam.learning_rate},
             {"beta1", c.adam.beta1},
             {"beta2", c.adam.beta2},
             {"epsilon", c.adam.epsilon}}},
           {"output",
            {{"dir", c.output_dir},
             {"checkpoint_every", c.checkpoint_every},
             {"timing", c.record_timing},
             {"threads", c.threads},
             {"max_consecutive_empty", c.max_consecutive_empty}}}};
  if (c.init_checkpoint) out["init_checkpoint"] = *c.init_checkpoint;
  return out;
}

namespace detail {

/// Minimal read-only view over either a TOML table or a JSON object so that
/// both config syntaxes share one schema.
class ConfigNode {
 public:
  explicit ConfigNode(const toml::node* t) : toml_(t) {}
  explicit ConfigNode(const json* j) : json_(j) {}

  bool exists() const { return toml_ || json_; }

  ConfigNode operator[](const std::string& key) const {
    if (toml_) {
      if (const auto* tbl = toml_->as_table())
        if (const auto* n = tbl->get(key)) return ConfigNode(n);
      return ConfigNode(static_cast<const toml::node*>(nullptr));
    }
    if (json_ && json_->is_object())
      if (auto it = json_->find(key); it != json_->end()) return ConfigNode(&*it);
    return ConfigNode(static_cast<const json*>(nullptr));
  }

  std::optional<std::string> str() const {
    if (toml_) {
      if (auto v = toml_->value<std::string>()) return *v;
      if (toml_) throw ConfigError("expected a string");
    }
    if (json_) {
      if (!json_->is_string()) throw ConfigError("expected a string");
      return json_->get<std::string>();
    }
    return std::nullopt;
  }

  std::optional<std::int64_t> integer() const {
    if (toml_) {
      if (!toml_->is_integer()) throw ConfigError("expected an integer");
      return toml_->value<std::int64_t>();
    }
    if (json_) {
      if (!json_->is_number_integer()) throw ConfigError("expected an integer");
      return json_->get<std::int64_t>();
    }
    return std::nullopt;
  }

  std::optional<double> number() const {
    if (toml_) {
      if (!toml_->is_number()) throw ConfigError("expected a number");
      return toml_->value<double>();
    }
    if (json_) {
      if (!json_->is_number()) throw ConfigError("expected a number");
      return json_->get<double>();
    }
    return std::nullopt;
  }

  std::optional<bool> boolean() const {
    if (toml_) {
      if (!toml_->is_boolean()) throw ConfigError("expected a boolean");
      return toml_->value<bool>();
    }
    if (json_) {
      if (!json_->is_boolean()) throw ConfigError("expected a boolean");
      return json_->get<bool>();
    }
    return std::nullopt;
  }

  bool is_array() const { return (toml_ && toml_->is_array()) || (json_ && json_->is_array()); }
  bool is_string() const { return (toml_ && toml_->is_string()) || (json_ && json_->is_string()); }

  std::vector<ConfigNode> items() const {
    std::vector<ConfigNode> out;
    if (toml_) {
      if (const auto* arr = toml_->as_array())
        for (const auto& n : *arr) out.emplace_back(&n);
    } else if (json_ && json_->is_array()) {
      for (const auto& n : *json_) out.emplace_back(&n);
    }
    return out;
  }

 private:
  const toml::node* toml_ = nullptr;
  const json* json_ = nullptr;
};

template <class T, class Fn>
void read_opt(const ConfigNode& node, const char* key, T& target, Fn&& get) {
  try {
    if (auto v = get(node[key])) target = static_cast<T>(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

inline RunConfig config_from_node(const ConfigNode& root, const std::filesystem::path& base) {
  RunConfig c;
  auto str = [](const ConfigNode& n) { return n.str(); };
  auto integer = [](const ConfigNode& n) { return n.integer(); };
  auto number = [](const ConfigNode& n) { return n.number(); };
  auto boolean = [](const ConfigNode& n) { return n.boolean(); };

  const ConfigNode h = root["hamiltonian"];
  if (!h.exists()) throw ConfigError("config has no [hamiltonian] section");
  {
    std::optional<std::string> pauli, fcidump, builtin, source, path;
    read_opt(h, "pauli", pauli, str);
    read_opt(h, "fcidump", fcidump, str);
    read_opt(h, "builtin", builtin, str);
    read_opt(h, "source", source, str);  // JSON echo form
    read_opt(h, "path", path, str);
    if (source) {
      if (*source == "pauli") pauli = path.value_or("");
      else if (*source == "fcidump") fcidump = path.value_or("");
      else if (*source == "heisenberg") builtin = "heisenberg";
      else if (*source != "none") throw ConfigError("unknown Hamiltonian source '" + *source + "'");
    }
    const int n_sources = int(pauli.has_value()) + int(fcidump.has_value()) + int(builtin.has_value());
    if (n_sources > 1) throw ConfigError("exactly one Hamiltonian source (pauli, fcidump, builtin) may be given");
    auto& src = c.hamiltonian;
    if (pauli) {
      src.kind = HamiltonianSource::Kind::pauli;
      src.path = resolve(base, *pauli);
    } else if (fcidump) {
      src.kind = HamiltonianSource::Kind::fcidump;
      src.path = resolve(base, *fcidump);
    } else if (builtin) {
      if (*builtin != "heisenberg") throw ConfigError("unknown builtin model '" + *builtin + "'");
      src.kind = HamiltonianSource::Kind::heisenberg;
      std::int64_t sites = 0;
      read_opt(h, "sites", sites, integer);
      if (sites < 2) throw ConfigError("heisenberg model needs sites >= 2");
      src.sites = static_cast<std::size_t>(sites);
      read_opt(h, "coupling", src.coupling, number);
      read_opt(h, "periodic", src.periodic, boolean);
    } else {
      std::int64_t n = 0;
      read_opt(h, "n_qubits", n, integer);
      if (n <= 0) throw ConfigError("[hamiltonian] needs a source (pauli, fcidump, builtin) or n_qubits");
      src.n_qubits = static_cast<std::size_t>(n);
    }
    std::optional<std::int64_t> ne;
    read_opt(h, "n_electrons", ne, integer);
    if (ne) c.n_electrons = static_cast<int>(*ne);
    std::optional<std::string> ref;
    read_opt(h, "reference", ref, str);
    c.reference_state = ref;
  }

  if (const ConfigNode syms = root["symmetries"]; syms.exists()) {
    if (!syms.is_array()) throw ConfigError("'symmetries' must be an array of strings");
    for (const auto& s : syms.items()) c.symmetries.push_back(*s.str());
  }
  read_opt(root, "check_symmetries", c.check_symmetries, boolean);

  std::int64_t iterations = static_cast<std::int64_t>(c.iterations), seed = 0;
  read_opt(root, "iterations", iterations, integer);
  read_opt(root, "seed", seed, integer);
  c.iterations = to_u64(iterations, "iterations");
  c.seed = to_u64(seed, "seed");
  std::optional<std::string> init;
  read_opt(root, "init_checkpoint", init, str);
  if (init) c.init_checkpoint = resolve(base, *init);

  if (const ConfigNode s = root["sampling"]; s.exists()) {
    std::optional<std::string> strategy;
    read_opt(s, "strategy", strategy, str);
    if (strategy) {
      try {
        c.strategy = PruneStrategy::parse(*strategy);
      } catch (const InputError& e) {
        throw ConfigError(e.what());
      }
    }
    if (const ConfigNode sched = s["schedule"]; sched.exists()) {
      if (sched.is_string()) {
        const auto name = *sched.str();
        if (name == "desk") c.schedule = BatchSchedule::desk();
        else if (name == "full") c.schedule = BatchSchedule::full();
        else throw ConfigError("unknown schedule preset '" + name + "' (desk, full)");
      } else {
        std::vector<BatchSchedule::Stage> stages;
        for (const auto& st : sched.items()) {
          std::int64_t until = 0, samples = 0;
          read_opt(st, "until", until, integer);
          read_opt(st, "samples", samples, integer);
          stages.push_back({to_u64(until, "until"), to_u64(samples, "samples")});
        }
        c.schedule = BatchSchedule(std::move(stages));
      }
    }
  }

  if (const ConfigNode n = root["network"]; n.exists()) {
    std::int64_t hidden = static_cast<std::int64_t>(c.network.hidden);
    read_opt(n, "hidden", hidden, integer);
    if (hidden <= 0) throw ConfigError("network.hidden must be positive");
    c.network.hidden = static_cast<std::size_t>(hidden);
    std::optional<std::string> variant;
    read_opt(n, "leaky_relu", variant, str);
    if (variant) {
      if (*variant == "negative") c.network.negative_slope = -0.01;
      else if (*variant == "conventional") c.network.negative_slope = 0.01;
      else throw ConfigError("network.leaky_relu must be 'negative' or 'conventional'");
    }
    read_opt(n, "negative_slope", c.network.negative_slope, number);
    read_opt(n, "output_gain", c.output_gain, number);
    if (!(c.output_gain > 0.0)) throw ConfigError("network.output_gain must be positive");
  }

  if (const ConfigNode o = root["optimizer"]; o.exists()) {
    read_opt(o, "learning_rate", c.adam.learning_rate, number);
    read_opt(o, "beta1", c.adam.beta1, number);
    read_opt(o, "beta2", c.adam.beta2, number);
    read_opt(o, "epsilon", c.adam.epsilon, number);
  }

  if (const ConfigNode o = root["output"]; o.exists()) {
    std::optional<std::string> dir;
    read_opt(o, "dir", dir, str);
    c.output_dir = resolve(base, dir.value_or(c.output_dir));
    std::int64_t every = 0, threads = 1, max_empty = static_cast<std::int64_t>(c.max_consecutive_empty);
    read_opt(o, "checkpoint_every", every, integer);
    read_opt(o, "threads", threads, integer);
    read_opt(o, "max_consecutive_empty", max_empty, integer);
    read_opt(o, "timing", c.record_timing, boolean);
    c.checkpoint_every = to_u64(every, "checkpoint_every");
    if (threads <= 0 || max_empty <= 0) throw ConfigError("threads and max_consecutive_empty must be positive");
    c.threads = static_cast<std::size_t>(threads);
    c.max_consecutive_empty = static_cast<std::size_t>(max_empty);
  } else {
    c.output_dir = resolve(base, c.output_dir);
  }
  return c;
}

}  // namespace detail

/// Parses TOML text (or JSON when `as_json`); relative paths resolve against `base`.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base, bool as_json = false) {
  if (as_json) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    return detail::config_from_node(detail::ConfigNode(&j), base);
  }
  toml::table t;
  try {
    t = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config TOML: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
  return detail::config_from_node(detail::ConfigNode(static_cast<const toml::node*>(&t)), base);
}

/// Reads a .toml or .json config file; ANQS_THREADS overrides the worker count.
inline RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path p(path);
  RunConfig c = parse_config(ss.str(), p.has_parent_path() ? p.parent_path() : std::filesystem::path("."), p.extension() == ".json");
  if (const char* env = std::getenv("ANQS_THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || t <= 0) throw ConfigError("ANQS_THREADS must be a positive integer");
    c.threads = static_cast<std::size_t>(t);
  }
  return c;
}

/// Hamiltonian, qubit count and sector reference assembled from a config.
struct Problem {
  std::size_t n_qubits = 0;
  std::optional<QubitHamiltonian> hamiltonian;
  std::optional<basis_t> reference;
  std::optional<int> n_electrons;
};

inline Problem load_problem(const RunConfig& c) {
  Problem p;
  p.n_electrons = c.n_electrons;
  switch (c.hamiltonian.kind) {
    case HamiltonianSource::Kind::pauli: {
      std::ifstream in(c.hamiltonian.path);
      if (!in) throw ConfigError("cannot open Hamiltonian file '" + c.hamiltonian.path + "'");
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ParseError("'" + c.hamiltonian.path + "': " + e.what());
      }
      p.hamiltonian = hamiltonian_from_json(j);
      if (!p.n_electrons && j.contains("n_electrons")) p.n_electrons = j["n_electrons"].get<int>();
      break;
    }
    case HamiltonianSource::Kind::fcidump: {
      std::ifstream in(c.hamiltonian.path);
      if (!in) throw ConfigError("cannot open FCIDUMP '" + c.hamiltonian.path + "'");
      const IntegralSet ints = parse_fcidump(in);
      p.hamiltonian = jordan_wigner(ints);
      if (!p.n_electrons) p.n_electrons = ints.n_electrons();
      break;
    }
    case HamiltonianSource::Kind::heisenberg:
      p.hamiltonian = build_heisenberg(c.hamiltonian.sites, c.hamiltonian.coupling, c.hamiltonian.periodic);
      break;
    default: break;
  }
  p.n_qubits = p.hamiltonian ? p.hamiltonian->n_qubits() : c.hamiltonian.n_qubits;
  check_qubit_count(p.n_qubits);
  if (c.reference_state) {
    try {
      p.reference = parse_bits(*c.reference_state, p.n_qubits);
    } catch (const InputError& e) {
      throw ConfigError(std::string("reference: ") + e.what());
    }
  } else if (p.n_electrons) {
    if (*p.n_electrons < 0 || static_cast<std::size_t>(*p.n_electrons) > p.n_qubits)
      throw ConfigError("n_electrons out of range");
    p.reference = hf_state(p.n_qubits, static_cast<std::size_t>(*p.n_electrons));
  }
  return p;
}

/// Builds the target sector from entries such as "particle_number:4",
/// "spin_projection:0", "magnetization:0", "z2:auto", "z2:ZZII" or
/// "z2:ZZII:1". Entries without a value take their target from the
/// reference vector (the Hartree-Fock state unless overridden).
inline SymmetryEnsemble build_ensemble(const std::vector<std::string>& specs, Problem& p) {
  const std::size_t n = p.n_qubits;
  SymmetryEnsemble e(n);
  // particle_number:k fixes the Hartree-Fock reference when nothing else does.
  if (!p.reference)
    for (const auto& s : specs)
      if (s.rfind("particle_number:", 0) == 0) {
        const int k = std::stoi(s.substr(16));
        if (k >= 0 && static_cast<std::size_t>(k) <= n) p.reference = hf_state(n, static_cast<std::size_t>(k));
      }
  auto reference_value = [&](const SymmetryDescriptor& d, const std::string& spec) {
    if (!p.reference)
      throw ConfigError("symmetry '" + spec + "' needs a reference vector: set hamiltonian.n_electrons or hamiltonian.reference");
    return d.eval(*p.reference);
  };
  auto parse_int = [](const std::string& v, const std::string& spec) {
    std::size_t used = 0;
    int out = 0;
    try {
      out = std::stoi(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.empty()) throw ConfigError("symmetry '" + spec + "': '" + v + "' is not an integer");
    return out;
  };
  for (const auto& spec : specs) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    try {
      if (kind == "particle_number" || kind == "spin_projection" || kind == "magnetization") {
        SymmetryDescriptor d = kind == "particle_number" ? particle_number(n)
                               : kind == "spin_projection" ? spin_projection(n)
                                                           : magnetization(n);
        const int target = arg.empty() ? reference_value(d, spec) : parse_int(arg, spec);
        e.add(std::move(d), target);
      } else if (kind == "z2" && arg == "auto") {
        if (!p.hamiltonian) throw ConfigError("z2:auto needs a Hamiltonian");
        for (basis_t mask : discover_z2(*p.hamiltonian)) {
          auto d = z2_descriptor(mask, n);
          const int target = reference_value(d, spec);
          e.add(std::move(d), target);
        }
      } else if (kind == "z2") {
        const auto colon2 = arg.find(':');
        const std::string letters = arg.substr(0, colon2);
        if (letters.size() != n || letters.find_first_not_of("IZ") != std::string::npos)
          throw ConfigError("symmetry '" + spec + "': expected a length-" + std::to_string(n) + " string over I/Z");
        basis_t mask = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (letters[i] == 'Z') mask |= basis_t{1} << i;
        auto d = z2_descriptor(mask, n);
        const int target = colon2 == std::string::npos ? reference_value(d, spec) : parse_int(arg.substr(colon2 + 1), spec);
        e.add(std::move(d), target);
      } else {
        throw ConfigError("unknown symmetry '" + spec + "'");
      }
    } catch (const InputError& err) {
      throw ConfigError("symmetry '" + spec + "': " + err.what());
    }
  }
  return e;
}

/// Samples random basis vectors and checks that every connected x' shares all
/// eigenvalues with x. Throws ConfigError naming the first violated symmetry.
inline void check_hamiltonian_symmetry(const QubitHamiltonian& h, const SymmetryEnsemble& e, std::size_t samples = 1000,
                                       std::uint64_t seed = 0x5eedULL) {
  SplitMix64 rng(seed);
  const basis_t mask = low_mask(h.n_qubits());
  for (std::size_t s = 0; s < samples; ++s) {
    const basis_t x = rng() & mask;
    const auto sx = e.eval(x);
    for (const auto& c : h.connected_configurations(x)) {
      const auto sc = e.eval(c.x);
      for (std::size_t m = 0; m < sx.size(); ++m)
        if (sx[m] != sc[m])
          throw ConfigError("Hamiltonian does not conserve symmetry '" + e.descriptors()[m].name() + "' (couples " +
                            format_bits(x, h.n_qubits()) + " to " + format_bits(c.x, h.n_qubits()) + ")");
    }
  }
}

}  // namespace anqs
