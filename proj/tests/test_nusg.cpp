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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "recurlab/nusg.hpp"
#include "recurlab/rng.hpp"

using namespace recurlab;

namespace {

// The acceptance qubit is the first input qubit; a swap with the first
// lower ancilla parks the incoming witness bit and leaves the outcome
// fixed, giving exact always-reject / always-accept verifiers.
Eigen::MatrixXcd swap_accept_with_ancilla(int input_qubits,
                                          int ancilla_qubits) {
    const int m = input_qubits + ancilla_qubits;
    const uint64_t dim = uint64_t{1} << m;
    const uint64_t acc = uint64_t{1} << (m - 1);
    const uint64_t anc = uint64_t{1} << (ancilla_qubits - 1);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (uint64_t col = 0; col < dim; ++col) {
        uint64_t row = col & ~(acc | anc);
        if (col & acc) {
            row |= anc;
        }
        if (col & anc) {
            row |= acc;
        }
        u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            1.0;
    }
    return u;
}

VerifierInstance always_reject(int input_qubits, int ancilla_qubits) {
    return VerifierInstance{
        UnitaryMatrix(swap_accept_with_ancilla(input_qubits, ancilla_qubits)),
        input_qubits, ancilla_qubits};
}

VerifierInstance always_accept(int input_qubits, int ancilla_qubits) {
    const int m = input_qubits + ancilla_qubits;
    const uint64_t dim = uint64_t{1} << m;
    const uint64_t acc = uint64_t{1} << (m - 1);
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (uint64_t col = 0; col < dim; ++col) {
        x(static_cast<Eigen::Index>(col ^ acc),
          static_cast<Eigen::Index>(col)) = 1.0;
    }
    return VerifierInstance{
        UnitaryMatrix(x * swap_accept_with_ancilla(input_qubits,
                                                   ancilla_qubits)),
        input_qubits, ancilla_qubits};
}

// Accepts every witness with probability sin^2(alpha/2): park the
// acceptance qubit at |0>, then rotate it partially.
VerifierInstance partial_accept(int input_qubits, int ancilla_qubits,
                                double accept_probability) {
    const int m = input_qubits + ancilla_qubits;
    const uint64_t dim = uint64_t{1} << m;
    const uint64_t acc = uint64_t{1} << (m - 1);
    const double alpha = 2.0 * std::asin(std::sqrt(accept_probability));
    Eigen::MatrixXcd rot = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const double c = std::cos(alpha / 2.0);
    const double s = std::sin(alpha / 2.0);
    for (uint64_t col = 0; col < dim; ++col) {
        const uint64_t partner = col ^ acc;
        if (col & acc) {
            rot(static_cast<Eigen::Index>(col),
                static_cast<Eigen::Index>(col)) = c;
            rot(static_cast<Eigen::Index>(partner),
                static_cast<Eigen::Index>(col)) = -s;
        } else {
            rot(static_cast<Eigen::Index>(col),
                static_cast<Eigen::Index>(col)) = c;
            rot(static_cast<Eigen::Index>(partner),
                static_cast<Eigen::Index>(col)) = s;
        }
    }
    return VerifierInstance{
        UnitaryMatrix(rot * swap_accept_with_ancilla(input_qubits,
                                                     ancilla_qubits)),
        input_qubits, ancilla_qubits};
}

QubitState random_witness(int qubits, uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXcd v(Eigen::Index{1} << qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = rng.complex_normal();
    }
    v.normalize();
    return QubitState(std::move(v));
}

} // namespace

TEST_CASE("build_v: zero angle is the identity") {
    const VerifierInstance instance = always_reject(2, 1);
    const UnitaryMatrix v = build_v(0.0, instance);
    CHECK(max_abs(v.mat() - Eigen::MatrixXcd::Identity(v.dim(), v.dim())) ==
          0.0);
}

TEST_CASE("build_v: phases per ancilla sector") {
    const double phi = 0.17;
    const VerifierInstance instance = always_reject(2, 2);
    const UnitaryMatrix v = build_v(phi, instance);
    const int total = instance.total_qubits() + 1;
    const uint64_t dim = uint64_t{1} << total;
    const uint64_t top = uint64_t{1} << (total - 1);
    const uint64_t anc_mask = (uint64_t{1} << 2) - 1;
    for (uint64_t idx = 0; idx < dim; ++idx) {
        const Complex got = v(static_cast<Eigen::Index>(idx),
                              static_cast<Eigen::Index>(idx));
        Complex want;
        if ((idx & anc_mask) == 0) {
            want = std::polar(1.0, (idx & top) ? phi : -phi);
        } else {
            want = std::polar(1.0, 2.0 * phi);
        }
        REQUIRE(std::abs(got - want) <= 1e-15);
    }
}

TEST_CASE("build_y: phases only when the acceptance qubit is set") {
    const double phi = 0.23;
    const VerifierInstance instance = always_reject(2, 1);
    const UnitaryMatrix y = build_y(phi, instance);
    const int total = instance.total_qubits() + 1;
    const uint64_t dim = uint64_t{1} << total;
    const uint64_t top = uint64_t{1} << (total - 1);
    const uint64_t acc = uint64_t{1} << (total - 2);
    for (uint64_t idx = 0; idx < dim; ++idx) {
        const Complex got = y(static_cast<Eigen::Index>(idx),
                              static_cast<Eigen::Index>(idx));
        Complex want = 1.0;
        if (idx & acc) {
            want = std::polar(1.0, (idx & top) ? -phi : phi);
        }
        REQUIRE(std::abs(got - want) <= 1e-15);
    }
    const UnitaryMatrix y0 = build_y(0.0, instance);
    CHECK(max_abs(y0.mat() -
                  Eigen::MatrixXcd::Identity(y0.dim(), y0.dim())) == 0.0);
}

TEST_CASE("build_z: identity verifier at zero angle gives the identity") {
    VerifierInstance instance{UnitaryMatrix::identity(8), 2, 1};
    const ZCircuit z = build_z(instance, NusgParams{0.0, 0.0, 0.005});
    CHECK(max_abs(z.z.mat() -
                  Eigen::MatrixXcd::Identity(z.z.dim(), z.z.dim())) <=
          1e-12);
}

TEST_CASE("build_z: accept-all verifier pins an eigenvalue at 1") {
    const VerifierInstance instance = always_accept(3, 2);
    const NusgParams params{0.3, 0.0, 0.005};
    const ZCircuit z = build_z(instance, params);
    CHECK(gap_around_one(z.z) <= 1e-9);
}

TEST_CASE("build_z: reject-all verifier opens the sin(phi) gap") {
    const VerifierInstance instance = always_reject(3, 2);
    const NusgParams params{0.3, 0.0, 0.005};
    const ZCircuit z = build_z(instance, params);
    CHECK(gap_around_one(z.z) >= std::sin(0.3) - 1e-9);
}

TEST_CASE("build_z: sizing cap at 10 qubits") {
    VerifierInstance instance{UnitaryMatrix::identity(1 << 10), 5, 5};
    CHECK_THROWS_AS(build_z(instance, NusgParams{0.3, 0.0, 0.005}),
                    SizingError);
}

TEST_CASE("gap_around_one: trivial spectra and the promise bands") {
    CHECK(gap_around_one(UnitaryMatrix::identity(4)) == 0.0);
    CHECK(nusg_decide(UnitaryMatrix::identity(4), 0.009) ==
          NusgVerdict::Member);

    Eigen::MatrixXcd far = Eigen::MatrixXcd::Zero(2, 2);
    far(0, 0) = std::polar(1.0, 0.5);
    far(1, 1) = std::polar(1.0, -0.5);
    CHECK(nusg_decide(UnitaryMatrix(far), 0.009) ==
          NusgVerdict::NonMemberAtTenDelta);

    Eigen::MatrixXcd mid = Eigen::MatrixXcd::Zero(2, 2);
    mid(0, 0) = std::polar(1.0, 0.05);
    mid(1, 1) = std::polar(1.0, -0.05);
    CHECK(nusg_decide(UnitaryMatrix(mid), 0.009) ==
          NusgVerdict::Undetermined);
}

TEST_CASE("gap_around_one: agrees with an independent eigensolver") {
    for (int trial = 0; trial < 5; ++trial) {
        const VerifierInstance instance{
            haar_unitary(32, 4000 + static_cast<uint64_t>(trial)), 3, 2};
        const ZCircuit z = build_z(instance, NusgParams{0.25, 0.0, 0.005});
        const double gap = gap_around_one(z.z);

        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(z.z.mat());
        double want = M_PI;
        for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
            want = std::min(want,
                            std::abs(std::arg(solver.eigenvalues()[i])));
        }
        REQUIRE(std::abs(gap - want) <= 1e-10);
    }
}

TEST_CASE("max_acceptance: exact extremes and dominance over sampling") {
    CHECK(max_acceptance(always_accept(2, 1)).eps_star ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_acceptance(always_reject(2, 1)).eps_star <= 1e-12);

    const VerifierInstance instance{haar_unitary(32, 808), 3, 2};
    const MaxAcceptance best = max_acceptance(instance);
    // The reported witness reaches the reported acceptance...
    CHECK(acceptance_probability(instance, best.witness) ==
          doctest::Approx(best.eps_star).epsilon(1e-10));
    // ...and no sampled witness beats it.
    for (int trial = 0; trial < 1000; ++trial) {
        const QubitState w =
            random_witness(3, 5000 + static_cast<uint64_t>(trial));
        REQUIRE(acceptance_probability(instance, w) <=
                best.eps_star + 1e-9);
    }
}

TEST_CASE("residual_case1: perfect acceptance pins the residual at zero") {
    const VerifierInstance instance = always_accept(2, 2);
    const NusgParams params{0.3, 0.0, 0.005};
    const QubitState witness = random_witness(2, 42);
    CHECK(residual_case1(instance, witness, params) <= 1e-9);
}

TEST_CASE("residual_case1: the 2 sqrt(eps) bound and its premises") {
    for (double eps : {1e-4, 1e-2}) {
        const VerifierInstance instance = partial_accept(2, 2, 1.0 - eps);
        const double phi = std::min(0.6, 12.0 * std::sqrt(eps));
        const NusgParams params{phi, eps, 0.005};
        const QubitState witness = random_witness(2, 77);
        const double residual = residual_case1(instance, witness, params);
        CHECK(residual <= 2.0 * std::sqrt(eps));
    }
    // A witness failing the acceptance premise is rejected.
    const VerifierInstance reject = always_reject(2, 1);
    CHECK_THROWS_AS(residual_case1(reject, random_witness(2, 7),
                                   NusgParams{0.3, 1e-4, 0.005}),
                    PremiseViolationError);
}

TEST_CASE("residual_case1: normal-operator corollary on the spectrum") {
    // min_i |lambda_i - 1| <= ||Z psi - psi|| for the accepted witness.
    const double eps = 1e-3;
    const VerifierInstance instance = partial_accept(2, 1, 1.0 - eps);
    const NusgParams params{0.45, eps, 0.005};
    const QubitState witness = random_witness(2, 11);
    const double residual = residual_case1(instance, witness, params);
    const ZCircuit z = build_z(instance, params);
    const SpectralDecomposition d = eigendecompose_unitary(z.z);
    double closest = 2.0;
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
        closest = std::min(closest,
                           std::abs(d.eigenvalues[i] - Complex(1.0, 0.0)));
    }
    CHECK(closest <= residual + 1e-12);
}

TEST_CASE("soundness: eigenphases clear sin(phi) - 2 sqrt(eps*)") {
    for (int trial = 0; trial < 3; ++trial) {
        const VerifierInstance instance{
            haar_unitary(16, 6000 + static_cast<uint64_t>(trial)), 2, 2};
        const double eps_star = max_acceptance(instance).eps_star;
        const NusgParams params{0.7853, 0.0, 0.005};
        const ZCircuit z = build_z(instance, params);
        const double bound =
            std::sin(params.phi) - 2.0 * std::sqrt(eps_star);
        CHECK(gap_around_one(z.z) >= bound - 1e-9);
    }
    // A structured low-acceptance verifier makes the bound bite.
    const VerifierInstance weak = partial_accept(2, 2, 0.0004);
    const double eps_star = max_acceptance(weak).eps_star;
    CHECK(eps_star == doctest::Approx(0.0004).epsilon(1e-6));
    const NusgParams params{0.5, 0.0, 0.005};
    const ZCircuit z = build_z(weak, params);
    const double bound = std::sin(0.5) - 2.0 * std::sqrt(eps_star);
    CHECK(bound > 0.4);
    CHECK(gap_around_one(z.z) >= bound - 1e-9);
}

TEST_CASE("swap_test_estimate: equal, orthogonal and random pairs") {
    const QubitState a = random_witness(2, 1);
    const SwapTestEstimate same = swap_test_estimate(a, a, 10000, 5);
    CHECK(std::abs(same.estimate - 1.0) <=
          3.0 * same.stderr_ + 1e-6);

    const QubitState e0 = QubitState::basis(2, 0);
    const QubitState e1 = QubitState::basis(2, 1);
    const SwapTestEstimate ortho = swap_test_estimate(e0, e1, 10000, 6);
    CHECK(ortho.estimate <= 0.05);

    const QubitState b = random_witness(2, 2);
    const SwapTestEstimate mixed = swap_test_estimate(a, b, 40000, 7);
    const double exact = std::abs(a.amplitudes().dot(b.amplitudes()));
    // Error propagation from p0 to the square root.
    const double se_est =
        mixed.stderr_ / std::max(mixed.estimate, 1e-6);
    CHECK(std::abs(mixed.estimate - exact) <= 3.0 * se_est);
}

TEST_CASE("swap_test_estimate: unbiasedness over repeated trials") {
    const QubitState a = random_witness(2, 21);
    const QubitState b = random_witness(2, 22);
    const double exact = std::abs(a.amplitudes().dot(b.amplitudes()));
    int within = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const SwapTestEstimate est =
            swap_test_estimate(a, b, 10000, 100 + static_cast<uint64_t>(t));
        const double se_est = est.stderr_ / std::max(est.estimate, 1e-6);
        within += std::abs(est.estimate - exact) <= 3.0 * se_est;
    }
    CHECK(within >= 990);
}

TEST_CASE("NusgParams: separation and range checks") {
    CHECK_THROWS_AS(NusgParams({0.2, 0.01, 0.005}).validate(),
                    InvalidArgumentError); // 10 sqrt(0.01) = 1 > 0.2
    CHECK_THROWS_AS(NusgParams({1.0, 0.0, 0.005}).validate(),
                    InvalidArgumentError); // phi >= pi/4
    CHECK_THROWS_AS(NusgParams({0.3, 0.0, 0.05}).validate(),
                    InvalidArgumentError); // delta0 too large
    NusgParams ok{0.3, 1e-4, 0.005};
    ok.validate();
}
