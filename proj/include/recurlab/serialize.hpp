// Copyright 2026 The recurlab Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <string>

#include <json.hpp>

#include "recurlab/nusg.hpp"
#include "recurlab/statevector.hpp"
#include "recurlab/sternfeld.hpp"
#include "recurlab/tensorfactor.hpp"

namespace recurlab {

using Json = nlohmann::json;

// Matrices interchange as {"rows", "cols", "entries": [[re, im], ...]}
// in row-major order; square unitaries use "dim" instead.
Json to_json(const ComplexMatrix &m);
Json to_json(const UnitaryMatrix &u);
ComplexMatrix complex_matrix_from_json(const Json &j);
UnitaryMatrix unitary_from_json(const Json &j);

Json to_json(const QubitState &state);
QubitState state_from_json(const Json &j);

Json to_json(const CircuitSpec &circuit);
/// Accepts inline matrices or the named primitives H, X, CPHASE(alpha),
/// CCPHASE(alpha).
CircuitSpec circuit_from_json(const Json &j);

Json to_json(const VerifierInstance &instance);
VerifierInstance verifier_from_json(const Json &j);

Json to_json(const SetSumSolution &solution);
Json to_json(const PhaseSolution &solution);
Json to_json(const SignedGridMeasure &measure);
Json to_json(const RookPath &path);

/// CSV lines "outcome,count", outcome as a fixed-width bitstring.
std::string histogram_csv(const Histogram &histogram);

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &content);
Json read_json_file(const std::string &path);

} // namespace recurlab
