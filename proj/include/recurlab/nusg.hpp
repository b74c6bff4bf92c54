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

#include "recurlab/statevector.hpp"

namespace recurlab {

/// Toy verifier: a unitary on (input register x lower ancillas). The
/// first input qubit is the acceptance qubit; witnesses live on the
/// input register, ancillas start at |0...0>.
struct VerifierInstance {
    UnitaryMatrix verifier;
    int input_qubits = 1;
    int ancilla_qubits = 0;

    int total_qubits() const { return input_qubits + ancilla_qubits; }
    void validate() const;
};

struct NusgParams {
    double phi;
    double epsilon;
    double delta0 = 0.005;

    /// Enforces phi in (0, pi/4), delta0 in (0, 0.01) and the
    /// separation phi >= 10 sqrt(epsilon).
    void validate() const;
};

/// Z together with its ingredient phase operators.
struct ZCircuit {
    UnitaryMatrix z;
    UnitaryMatrix v;
    UnitaryMatrix y;
};

/// Diagonal operator acting on (top ancilla x verifier space): phases
/// e^{-i phi}, e^{+i phi} on the top ancilla when the lower ancillas
/// are |0...0>, a global e^{2 i phi} on every other ancilla sector.
UnitaryMatrix build_v(double phi, const VerifierInstance &layout);

/// Phases e^{+i phi}, e^{-i phi} on the top ancilla exactly when the
/// acceptance qubit is |1>. (Which qubit carries the phase is isolated
/// here; the bound checks do not depend on the choice.)
UnitaryMatrix build_y(double phi, const VerifierInstance &layout);

/// Z = H U† Y U V H with H on the top ancilla and U = 1 x verifier.
/// Total qubits (top ancilla included) are capped at 10.
ZCircuit build_z(const VerifierInstance &instance, const NusgParams &params);

/// Minimum |eigenphase| over the spectrum.
double gap_around_one(const UnitaryMatrix &u);

enum class NusgVerdict { Member, NonMemberAtTenDelta, Undetermined };

/// Membership per the promise bands: member below delta0, non-member at
/// or beyond 10*delta0, undetermined in between.
NusgVerdict nusg_decide(const UnitaryMatrix &u, double delta0);

/// Acceptance probability of a witness on the input register (ancillas
/// |0...0>).
double acceptance_probability(const VerifierInstance &instance,
                              const QubitState &witness);

struct MaxAcceptance {
    double eps_star = 0.0; // max acceptance over all witnesses
    QubitState witness;    // the maximizer
};

/// Exact maximum acceptance: the top squared singular value of the
/// acceptance block of the verifier restricted to the |0...0> ancilla
/// sector.
MaxAcceptance max_acceptance(const VerifierInstance &instance);

/// ||Z|Psi> - |Psi>|| for Psi = |0> x witness x |0...0>. Requires the
/// witness to be accepted with probability >= 1 - epsilon. For a normal
/// operator this residual upper-bounds min_i |lambda_i - 1|. The
/// phi >= 10 sqrt(epsilon) separation is not required here; it guards
/// the soundness gap only.
double residual_case1(const VerifierInstance &instance,
                      const QubitState &witness, const NusgParams &params);

struct SwapTestEstimate {
    double estimate = 0.0; // of |<a|b>|, clipped at 0
    double stderr_ = 0.0;  // binomial stderr of the ancilla frequency
    double p0_hat = 0.0;   // sampled P(ancilla = 0)
    uint64_t shots = 0;
};

/// Simulate the SWAP test (ancilla + both registers, controlled swaps)
/// and sample the ancilla; P(0) = (1 + |<a|b>|^2)/2.
SwapTestEstimate swap_test_estimate(const QubitState &a, const QubitState &b,
                                    uint64_t shots, uint64_t seed);

} // namespace recurlab
