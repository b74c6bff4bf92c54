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

#include "recurlab/recurrence.hpp"

namespace recurlab {

/// The two-plane data of amplitude amplification: psi is the circuit
/// output (pre-rotated by a global phase so its overlap with the target
/// is real and non-negative) and theta satisfies sin(theta) = <target|psi>.
struct AmplifierSetup {
    QubitState psi;
    QubitState target;
    double theta;
};

/// Target (1/sqrt(2^j)) sum_k |k> x |0...0> for the given layout.
QubitState uniform_number_target(const RegisterLayout &layout);

AmplifierSetup make_amplifier_setup(const QubitState &psi,
                                    const QubitState &target);
AmplifierSetup make_amplifier_setup(const QubitState &psi,
                                    const RegisterLayout &layout);

/// One iteration of Q = -S_psi S_P, applied as two rank-1 reflections;
/// no 2^n x 2^n operator is ever materialized.
QubitState grover_step(const AmplifierSetup &setup, const QubitState &state);

/// sin^2((2m+1) theta), the two-plane rotation prediction.
double amplified_detection_prediction(const AmplifierSetup &setup,
                                      uint64_t m);

/// Geometric sequence 1, 2, 4, ... <= max_m of iteration guesses.
std::vector<uint64_t> guess_schedule(uint64_t max_m);

/// Run the detection circuit, amplify m times, then sample the state
/// register for |0...0>.
RecurrenceEstimate amplified_recurrence(const RecurrenceInstance &instance,
                                        uint64_t m, uint64_t shots,
                                        uint64_t seed);

} // namespace recurlab
