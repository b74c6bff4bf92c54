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
#include "recurlab/amplify.hpp"

#include <cmath>

namespace recurlab {

QubitState uniform_number_target(const RegisterLayout &layout) {
    layout.validate();
    const int j = layout.number_qubits;
    const int n = layout.state_qubits;
    const uint64_t dim = uint64_t{1} << layout.total();
    const double amp = std::exp2(-0.5 * static_cast<double>(j));
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    for (uint64_t k = 0; k < (uint64_t{1} << j); ++k) {
        v[static_cast<Eigen::Index>(k << n)] = amp;
    }
    return QubitState(std::move(v));
}

AmplifierSetup make_amplifier_setup(const QubitState &psi,
                                    const QubitState &target) {
    if (psi.dim() != target.dim()) {
        throw DimensionMismatchError(
            "make_amplifier_setup: psi and target dims differ");
    }
    const Complex overlap = target.amplitudes().dot(psi.amplitudes());
    const double mag = std::min(std::abs(overlap), 1.0);
    Eigen::VectorXcd rotated = psi.amplitudes();
    if (std::abs(overlap) > 0.0) {
        rotated *= std::conj(overlap) / std::abs(overlap);
    }
    return AmplifierSetup{QubitState(std::move(rotated)), target,
                          std::asin(mag)};
}

AmplifierSetup make_amplifier_setup(const QubitState &psi,
                                    const RegisterLayout &layout) {
    return make_amplifier_setup(psi, uniform_number_target(layout));
}

QubitState grover_step(const AmplifierSetup &setup, const QubitState &state) {
    if (state.dim() != setup.psi.dim()) {
        throw DimensionMismatchError("grover_step: state dim mismatch");
    }
    Eigen::VectorXcd v = state.amplitudes();
    // S_P = 1 - 2|target><target|
    const Complex tp = setup.target.amplitudes().dot(v);
    v -= 2.0 * tp * setup.target.amplitudes();
    // S_psi = 1 - 2|psi><psi|
    const Complex pp = setup.psi.amplitudes().dot(v);
    v -= 2.0 * pp * setup.psi.amplitudes();
    v = -v;
    return QubitState(std::move(v));
}

double amplified_detection_prediction(const AmplifierSetup &setup,
                                      uint64_t m) {
    const double s =
        std::sin((2.0 * static_cast<double>(m) + 1.0) * setup.theta);
    return s * s;
}

std::vector<uint64_t> guess_schedule(uint64_t max_m) {
    if (max_m < 1) {
        throw InvalidArgumentError("guess_schedule: max_m must be >= 1");
    }
    std::vector<uint64_t> guesses;
    for (uint64_t g = 1; g <= max_m; g *= 2) {
        guesses.push_back(g);
        if (g > max_m / 2) {
            break;
        }
    }
    return guesses;
}

RecurrenceEstimate amplified_recurrence(const RecurrenceInstance &instance,
                                        uint64_t m, uint64_t shots,
                                        uint64_t seed) {
    if (shots < 1) {
        throw InvalidArgumentError("amplified_recurrence: shots must be >= 1");
    }
    instance.layout.validate();
    const CircuitSpec circuit =
        recurrence_circuit(instance.u, instance.layout.number_qubits);
    QubitState state =
        run_circuit(circuit, QubitState::zero(instance.layout.total()));
    const AmplifierSetup setup = make_amplifier_setup(state, instance.layout);
    state = setup.psi;
    for (uint64_t step = 0; step < m; ++step) {
        state = grover_step(setup, state);
    }
    const Histogram hist = sample_measurement(
        state, instance.layout.state_register(), shots, seed);
    const double p_hat = static_cast<double>(hist.count_of(0)) /
                         static_cast<double>(shots);
    RecurrenceEstimate est;
    est.probability = p_hat;
    est.stderr_ =
        std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(shots));
    est.shots = shots;
    est.k_zero_included = true;
    return est;
}

} // namespace recurlab
