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
#include "recurlab/nusg.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "recurlab/rng.hpp"

namespace recurlab {

void VerifierInstance::validate() const {
    if (input_qubits < 1 || ancilla_qubits < 0) {
        throw InvalidDimensionError(
            "VerifierInstance: need input_qubits >= 1, ancilla_qubits >= 0");
    }
    const Eigen::Index want = Eigen::Index{1} << total_qubits();
    if (verifier.dim() != want) {
        throw DimensionMismatchError(
            "VerifierInstance: verifier dim does not match the registers");
    }
}

void NusgParams::validate() const {
    // phi = 0 is admitted only in the degenerate exact case epsilon = 0.
    if (phi < 0.0 || !(phi < M_PI / 4.0) || (phi == 0.0 && epsilon > 0.0)) {
        throw InvalidArgumentError("NusgParams: phi must lie in (0, pi/4)");
    }
    if (epsilon < 0.0) {
        throw InvalidArgumentError("NusgParams: epsilon must be >= 0");
    }
    if (phi < 10.0 * std::sqrt(epsilon)) {
        throw InvalidArgumentError(
            "NusgParams: the separation needs phi >= 10 sqrt(epsilon)");
    }
    if (!(delta0 > 0.0) || !(delta0 < 0.01)) {
        throw InvalidArgumentError("NusgParams: delta0 must lie in (0, 0.01)");
    }
}

namespace {

// Z-circuit index layout (qubit 0 = MSB): top ancilla, then input
// register (acceptance qubit first), then lower ancillas.
struct ZLayout {
    int input_qubits;
    int ancilla_qubits;
    int verifier_qubits() const { return input_qubits + ancilla_qubits; }
    int total_qubits() const { return verifier_qubits() + 1; }
    Eigen::Index dim() const { return Eigen::Index{1} << total_qubits(); }

    uint64_t top_bit() const {
        return uint64_t{1} << (total_qubits() - 1);
    }
    uint64_t accept_bit() const {
        return uint64_t{1} << (total_qubits() - 2);
    }
    uint64_t ancilla_mask() const {
        return (uint64_t{1} << ancilla_qubits) - 1;
    }
};

} // namespace

UnitaryMatrix build_v(double phi, const VerifierInstance &layout) {
    layout.validate();
    const ZLayout z{layout.input_qubits, layout.ancilla_qubits};
    Eigen::VectorXcd diag(z.dim());
    for (uint64_t idx = 0; idx < static_cast<uint64_t>(z.dim()); ++idx) {
        if ((idx & z.ancilla_mask()) == 0) {
            diag[static_cast<Eigen::Index>(idx)] =
                std::polar(1.0, (idx & z.top_bit()) ? phi : -phi);
        } else {
            diag[static_cast<Eigen::Index>(idx)] = std::polar(1.0, 2.0 * phi);
        }
    }
    return UnitaryMatrix(diag.asDiagonal());
}

UnitaryMatrix build_y(double phi, const VerifierInstance &layout) {
    layout.validate();
    const ZLayout z{layout.input_qubits, layout.ancilla_qubits};
    Eigen::VectorXcd diag(z.dim());
    for (uint64_t idx = 0; idx < static_cast<uint64_t>(z.dim()); ++idx) {
        if (idx & z.accept_bit()) {
            diag[static_cast<Eigen::Index>(idx)] =
                std::polar(1.0, (idx & z.top_bit()) ? -phi : phi);
        } else {
            diag[static_cast<Eigen::Index>(idx)] = 1.0;
        }
    }
    return UnitaryMatrix(diag.asDiagonal());
}

namespace {

ZCircuit assemble_z(const VerifierInstance &instance, double phi);

}

ZCircuit build_z(const VerifierInstance &instance, const NusgParams &params) {
    instance.validate();
    params.validate();
    return assemble_z(instance, params.phi);
}

namespace {

ZCircuit assemble_z(const VerifierInstance &instance, double phi) {
    if (instance.total_qubits() + 1 > 10) {
        throw SizingError("build_z: the dense Z construction stops at 10 "
                          "qubits including the top ancilla");
    }
    const ZLayout zl{instance.input_qubits, instance.ancilla_qubits};
    const Eigen::Index half = Eigen::Index{1} << zl.verifier_qubits();

    UnitaryMatrix v = build_v(phi, instance);
    UnitaryMatrix y = build_y(phi, instance);

    // H on the top ancilla and U = 1 x verifier, as dense operators.
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(zl.dim(), zl.dim());
    const double s = 1.0 / std::sqrt(2.0);
    h.block(0, 0, half, half) =
        s * Eigen::MatrixXcd::Identity(half, half);
    h.block(0, half, half, half) =
        s * Eigen::MatrixXcd::Identity(half, half);
    h.block(half, 0, half, half) =
        s * Eigen::MatrixXcd::Identity(half, half);
    h.block(half, half, half, half) =
        -s * Eigen::MatrixXcd::Identity(half, half);

    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(zl.dim(), zl.dim());
    u.block(0, 0, half, half) = instance.verifier.mat();
    u.block(half, half, half, half) = instance.verifier.mat();

    Eigen::MatrixXcd z = h * u.adjoint() * y.mat() * u * v.mat() * h;
    return ZCircuit{UnitaryMatrix(std::move(z)), std::move(v), std::move(y)};
}

} // namespace

double gap_around_one(const UnitaryMatrix &u) {
    const SpectralDecomposition d = eigendecompose_unitary(u);
    double gap = std::abs(d.eigenphases[0]);
    for (Eigen::Index i = 1; i < d.eigenphases.size(); ++i) {
        gap = std::min(gap, std::abs(d.eigenphases[i]));
    }
    return gap;
}

NusgVerdict nusg_decide(const UnitaryMatrix &u, double delta0) {
    if (!(delta0 > 0.0) || !(delta0 < 0.01)) {
        throw InvalidArgumentError("nusg_decide: delta0 must lie in (0, 0.01)");
    }
    const double gap = gap_around_one(u);
    if (gap < delta0) {
        return NusgVerdict::Member;
    }
    if (gap >= 10.0 * delta0) {
        return NusgVerdict::NonMemberAtTenDelta;
    }
    return NusgVerdict::Undetermined;
}

namespace {

/// Verifier applied to witness x |0...0>, as a full-space vector.
Eigen::VectorXcd apply_verifier(const VerifierInstance &instance,
                                const QubitState &witness) {
    const Eigen::Index dim = instance.verifier.dim();
    const int anc = instance.ancilla_qubits;
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index w = 0; w < witness.dim(); ++w) {
        in[w << anc] = witness.amplitudes()[w];
    }
    return instance.verifier.mat() * in;
}

} // namespace

double acceptance_probability(const VerifierInstance &instance,
                              const QubitState &witness) {
    instance.validate();
    if (witness.num_qubits() != instance.input_qubits) {
        throw DimensionMismatchError(
            "acceptance_probability: witness must span the input register");
    }
    const Eigen::VectorXcd out = apply_verifier(instance, witness);
    const uint64_t accept_bit = uint64_t{1}
                                << (instance.total_qubits() - 1);
    double p = 0.0;
    for (uint64_t idx = 0; idx < static_cast<uint64_t>(out.size()); ++idx) {
        if (idx & accept_bit) {
            p += std::norm(out[static_cast<Eigen::Index>(idx)]);
        }
    }
    return p;
}

MaxAcceptance max_acceptance(const VerifierInstance &instance) {
    instance.validate();
    const int anc = instance.ancilla_qubits;
    const Eigen::Index wit_dim = Eigen::Index{1} << instance.input_qubits;
    const uint64_t accept_bit = uint64_t{1}
                                << (instance.total_qubits() - 1);

    // Columns: images of witness basis states (ancillas |0>), rows
    // restricted to the accepting half.
    Eigen::MatrixXcd block(instance.verifier.dim() / 2, wit_dim);
    for (Eigen::Index w = 0; w < wit_dim; ++w) {
        Eigen::Index row = 0;
        for (uint64_t idx = 0;
             idx < static_cast<uint64_t>(instance.verifier.dim()); ++idx) {
            if (idx & accept_bit) {
                block(row++, w) = instance.verifier.mat()(
                    static_cast<Eigen::Index>(idx), w << anc);
            }
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> solver(block, Eigen::ComputeFullV);
    const double sigma = solver.singularValues()[0];
    Eigen::VectorXcd best = solver.matrixV().col(0);
    return MaxAcceptance{sigma * sigma, QubitState(std::move(best))};
}

double residual_case1(const VerifierInstance &instance,
                      const QubitState &witness, const NusgParams &params) {
    // The completeness residual needs no phi-epsilon separation (that
    // constraint protects only the soundness gap), so phi is range
    // checked but not gated against epsilon here.
    if (params.phi < 0.0 || !(params.phi < M_PI / 4.0) ||
        params.epsilon < 0.0) {
        throw InvalidArgumentError(
            "residual_case1: need phi in [0, pi/4) and epsilon >= 0");
    }
    const double accept = acceptance_probability(instance, witness);
    if (accept < 1.0 - params.epsilon - 1e-12) {
        throw PremiseViolationError(
            "residual_case1: witness acceptance " + std::to_string(accept) +
            " is below 1 - epsilon");
    }
    instance.validate();
    const ZCircuit zc = assemble_z(instance, params.phi);
    const int anc = instance.ancilla_qubits;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(zc.z.dim());
    for (Eigen::Index w = 0; w < witness.dim(); ++w) {
        psi[w << anc] = witness.amplitudes()[w]; // top ancilla |0>
    }
    return (zc.z.mat() * psi - psi).norm();
}

SwapTestEstimate swap_test_estimate(const QubitState &a, const QubitState &b,
                                    uint64_t shots, uint64_t seed) {
    if (a.num_qubits() != b.num_qubits()) {
        throw DimensionMismatchError(
            "swap_test_estimate: states must have equal dimension");
    }
    if (shots < 1) {
        throw InvalidArgumentError("swap_test_estimate: shots must be >= 1");
    }
    const int n = a.num_qubits();
    RegisterLayout layout{0, 2 * n + 1};
    layout.validate();

    // |0> x a x b
    Eigen::VectorXcd joint(a.dim() * b.dim() * 2);
    joint.setZero();
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        for (Eigen::Index j = 0; j < b.dim(); ++j) {
            joint[(i << n) | j] = a.amplitudes()[i] * b.amplitudes()[j];
        }
    }
    QubitState state{std::move(joint)};

    CircuitSpec circuit;
    circuit.layout = layout;
    circuit.gates.push_back(GateOp{h_gate(), {0}, {}});
    for (int q = 0; q < n; ++q) {
        circuit.gates.push_back(
            GateOp{swap_gate(), {1 + q, 1 + n + q}, {0}});
    }
    circuit.gates.push_back(GateOp{h_gate(), {0}, {}});
    state = run_circuit(circuit, state);

    const Histogram hist = sample_measurement(state, {0}, shots, seed);
    const double p0 = static_cast<double>(hist.count_of(0)) /
                      static_cast<double>(shots);
    SwapTestEstimate est;
    est.p0_hat = p0;
    est.shots = shots;
    est.stderr_ = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(shots));
    est.estimate = std::sqrt(std::max(0.0, 2.0 * p0 - 1.0));
    return est;
}

} // namespace recurlab
