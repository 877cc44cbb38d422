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

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "anqs/common.hpp"
#include "anqs/model.hpp"
#include "anqs/pauli.hpp"

namespace anqs {

using json = nlohmann::json;

/// {"n_qubits": N, "constant": c, "terms": [{"coeff": [re, im], "pauli": "XXIZ"}, ...]}
inline json hamiltonian_to_json(const QubitHamiltonian& h) {
  json terms = json::array();
  for (const auto& t : h.terms())
    terms.push_back({{"coeff", {t.coefficient.real(), t.coefficient.imag()}}, {"pauli", t.letters.str()}});
  return {{"n_qubits", h.n_qubits()}, {"constant", h.constant_offset()}, {"terms", std::move(terms)}};
}

inline QubitHamiltonian hamiltonian_from_json(const json& j) {
  try {
    const auto n = j.at("n_qubits").get<std::size_t>();
    const double constant = j.value("constant", 0.0);
    std::vector<PauliTerm> terms;
    for (const auto& t : j.at("terms")) {
      const auto& c = t.at("coeff");
      complex_t coeff;
      if (c.is_array()) {
        if (c.size() != 2) throw ParseError("term coefficient must be [re, im]");
        coeff = {c[0].get<double>(), c[1].get<double>()};
      } else {
        coeff = c.get<double>();
      }
      auto letters = PauliString::parse(t.at("pauli").get<std::string>());
      if (letters.size() != n) throw ParseError("Pauli string '" + letters.str() + "' does not have n_qubits letters");
      terms.push_back({coeff, letters});
    }
    return QubitHamiltonian(n, terms, constant);
  } catch (const json::exception& e) {
    throw ParseError(std::string("Hamiltonian JSON: ") + e.what());
  }
}

inline QubitHamiltonian read_hamiltonian_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open Hamiltonian file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return hamiltonian_from_json(j);
}

/// Architecture header plus the flat real parameter vector.
inline json checkpoint_to_json(const AnqsModel& model, std::uint64_t seed, std::uint64_t iteration) {
  const auto p = model.parameters();
  return {{"n_qubits", model.n_qubits()},
          {"hidden", {model.shape().hidden, model.shape().hidden}},
          {"negative_slope", model.shape().negative_slope},
          {"seed", seed},
          {"iteration", iteration},
          {"parameters", std::vector<double>(p.begin(), p.end())}};
}

inline AnqsModel model_from_checkpoint(const json& j) {
  try {
    NetworkShape shape;
    shape.n_qubits = j.at("n_qubits").get<std::size_t>();
    const auto hidden = j.at("hidden").get<std::vector<std::size_t>>();
    if (hidden.size() != 2 || hidden[0] != hidden[1]) throw ParseError("checkpoint hidden widths must be two equal values");
    shape.hidden = hidden[0];
    shape.negative_slope = j.value("negative_slope", -0.01);
    AnqsModel model(shape);
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != model.n_parameters())
      throw ParseError("checkpoint holds " + std::to_string(params.size()) + " parameters, architecture needs " +
                       std::to_string(model.n_parameters()));
    std::copy(params.begin(), params.end(), model.parameters().begin());
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

inline AnqsModel read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return model_from_checkpoint(j);
}

}  // namespace anqs
