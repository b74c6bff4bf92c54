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

#include <cstdint>
#include <vector>

#include "recurlab/linalg.hpp"

namespace recurlab {

// Qubit 0 is the most significant index bit everywhere: for an N-qubit
// register, qubit q owns bit (N-1-q) of the amplitude index.

/// Fig.-1 style register split: j number qubits on top of n state
/// qubits. The number register may be empty; the total is capped.
struct RegisterLayout {
    int number_qubits = 0;
    int state_qubits = 1;
    int cap = kQubitCap;

    int total() const { return number_qubits + state_qubits; }
    void validate() const;

    /// Qubit indices of the number register (0..j-1).
    std::vector<int> number_register() const;
    /// Qubit indices of the state register (j..j+n-1).
    std::vector<int> state_register() const;
};

/// Normalized pure state over 2^n amplitudes.
class QubitState {
  public:
    explicit QubitState(Eigen::VectorXcd amplitudes);

    static QubitState basis(int num_qubits, uint64_t index);
    static QubitState zero(int num_qubits) { return basis(num_qubits, 0); }

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dim() const { return amps_.size(); }
    const Eigen::VectorXcd &amplitudes() const { return amps_; }

  private:
    Eigen::VectorXcd amps_;
    int num_qubits_;
};

/// A unitary on |targets| qubits, optionally conditioned on every
/// control qubit being |1>.
struct GateOp {
    UnitaryMatrix matrix;
    std::vector<int> targets;
    std::vector<int> controls;
};

struct CircuitSpec {
    RegisterLayout layout;
    std::vector<GateOp> gates;
};

QubitState apply_gate(const QubitState &state, const GateOp &gate);

/// Gate whose matrix is U^(2^i), computed by repeated squaring with a
/// polar correction after every squaring.
GateOp controlled_power(const UnitaryMatrix &u, int i, int control,
                        const std::vector<int> &state_targets);

QubitState run_circuit(const CircuitSpec &circuit, const QubitState &input);

/// Probability that a Z-basis measurement of `register_qubits` returns
/// `outcome` (bit b of outcome belongs to register_qubits[b], first
/// listed qubit most significant).
double born_probability(const QubitState &state,
                        const std::vector<int> &register_qubits,
                        uint64_t outcome);

struct Histogram {
    int register_width = 0;
    uint64_t shots = 0;
    // (outcome, count), sorted by outcome, zero counts omitted.
    std::vector<std::pair<uint64_t, uint64_t>> counts;

    uint64_t count_of(uint64_t outcome) const;
};

/// iid Born samples of the register, deterministic per seed. Sampling
/// fans out over fixed seeded chunks, so the histogram is identical at
/// any thread count.
Histogram sample_measurement(const QubitState &state,
                             const std::vector<int> &register_qubits,
                             uint64_t shots, uint64_t seed);

/// Marginal Born distribution over the register outcomes.
Eigen::VectorXd register_distribution(const QubitState &state,
                                      const std::vector<int> &register_qubits);

// Elementary gate matrices.
UnitaryMatrix h_gate();
UnitaryMatrix x_gate();
UnitaryMatrix phase_gate(double alpha); // diag(1, e^{i alpha})
UnitaryMatrix swap_gate();

} // namespace recurlab
