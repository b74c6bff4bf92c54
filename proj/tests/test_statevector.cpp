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
#include <cstdlib>

#include "recurlab/rng.hpp"
#include "recurlab/serialize.hpp"
#include "recurlab/statevector.hpp"

using namespace recurlab;

namespace {

// Independent oracle: materialize the full controlled embedding of a
// gate as a 2^n x 2^n matrix, one basis column at a time.
Eigen::MatrixXcd dense_gate_matrix(const GateOp &gate, int num_qubits) {
    const uint64_t dim = uint64_t{1} << num_qubits;
    const int t = static_cast<int>(gate.targets.size());
    auto bit = [&](int qubit) {
        return uint64_t{1} << (num_qubits - 1 - qubit);
    };
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (uint64_t col = 0; col < dim; ++col) {
        bool active = true;
        for (int c : gate.controls) {
            active = active && (col & bit(c));
        }
        if (!active) {
            full(static_cast<Eigen::Index>(col),
                 static_cast<Eigen::Index>(col)) = 1.0;
            continue;
        }
        uint64_t g_in = 0;
        for (int i = 0; i < t; ++i) {
            if (col & bit(gate.targets[static_cast<size_t>(i)])) {
                g_in |= uint64_t{1} << (t - 1 - i);
            }
        }
        for (uint64_t g_out = 0; g_out < (uint64_t{1} << t); ++g_out) {
            uint64_t row = col;
            for (int i = 0; i < t; ++i) {
                const uint64_t b = bit(gate.targets[static_cast<size_t>(i)]);
                if (g_out & (uint64_t{1} << (t - 1 - i))) {
                    row |= b;
                } else {
                    row &= ~b;
                }
            }
            full(static_cast<Eigen::Index>(row),
                 static_cast<Eigen::Index>(col)) +=
                gate.matrix(static_cast<Eigen::Index>(g_out),
                            static_cast<Eigen::Index>(g_in));
        }
    }
    return full;
}

QubitState random_state(int qubits, uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXcd v(Eigen::Index{1} << qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = rng.complex_normal();
    }
    v.normalize();
    return QubitState(std::move(v));
}

} // namespace

TEST_CASE("endianness: qubit 0 is the most significant index bit") {
    const QubitState in = QubitState::zero(2);
    const QubitState out = apply_gate(in, GateOp{x_gate(), {0}, {}});
    CHECK(std::abs(out.amplitudes()[2] - 1.0) <= 1e-15); // |10>
    const QubitState out1 = apply_gate(in, GateOp{x_gate(), {1}, {}});
    CHECK(std::abs(out1.amplitudes()[1] - 1.0) <= 1e-15); // |01>
}

TEST_CASE("apply_gate: H on |0>") {
    const QubitState out =
        apply_gate(QubitState::zero(1), GateOp{h_gate(), {0}, {}});
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amplitudes()[0] - s) <= 1e-15);
    CHECK(std::abs(out.amplitudes()[1] - s) <= 1e-15);
}

TEST_CASE("apply_gate: controlled X fires only on |1> control") {
    // |10>: control qubit 0 set, X on qubit 1 -> |11>
    const QubitState in = QubitState::basis(2, 2);
    const QubitState out = apply_gate(in, GateOp{x_gate(), {1}, {0}});
    CHECK(std::abs(out.amplitudes()[3] - 1.0) <= 1e-15);
    // |00>: control clear -> unchanged
    const QubitState idle =
        apply_gate(QubitState::zero(2), GateOp{x_gate(), {1}, {0}});
    CHECK(std::abs(idle.amplitudes()[0] - 1.0) <= 1e-15);
}

TEST_CASE("apply_gate: matches the dense oracle on random configs") {
    struct Config {
        int qubits;
        std::vector<int> targets;
        std::vector<int> controls;
    };
    const std::vector<Config> configs = {
        {4, {2, 3}, {}},       // contiguous low block fast path
        {4, {2, 3}, {0}},      // fast path with a control
        {4, {0, 2}, {}},       // general kernel
        {4, {3, 1}, {0}},      // reversed target order
        {5, {4}, {1, 2}},      // two controls
        {5, {0, 4, 2}, {}},    // three scattered targets
        {3, {0, 1, 2}, {}},    // whole register
    };
    uint64_t seed = 100;
    for (const auto &cfg : configs) {
        const UnitaryMatrix g = haar_unitary(
            Eigen::Index{1} << cfg.targets.size(), seed++);
        const GateOp gate{g, cfg.targets, cfg.controls};
        const QubitState in = random_state(cfg.qubits, seed++);
        const QubitState got = apply_gate(in, gate);
        const Eigen::VectorXcd want =
            dense_gate_matrix(gate, cfg.qubits) * in.amplitudes();
        REQUIRE((got.amplitudes() - want).cwiseAbs().maxCoeff() <= 1e-12);
        REQUIRE(std::abs(got.amplitudes().norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("apply_gate: error paths") {
    const QubitState in = QubitState::zero(2);
    CHECK_THROWS_AS(apply_gate(in, GateOp{x_gate(), {2}, {}}),
                    IndexOutOfRangeError);
    CHECK_THROWS_AS(apply_gate(in, GateOp{x_gate(), {0}, {0}}),
                    InvalidArgumentError);
    CHECK_THROWS_AS(apply_gate(in, GateOp{swap_gate(), {0}, {}}),
                    DimensionMismatchError);
}

TEST_CASE("controlled_power: X squared is the identity") {
    const GateOp gate = controlled_power(x_gate(), 1, 0, {1});
    CHECK(max_abs(gate.matrix.mat() - Eigen::MatrixXcd::Identity(2, 2)) <=
          1e-12);
}

TEST_CASE("controlled_power: diagonal dyadic power") {
    const double alpha = 0.937;
    const GateOp gate = controlled_power(phase_gate(alpha), 3, 0, {1});
    CHECK(std::abs(gate.matrix(0, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(gate.matrix(1, 1) - std::polar(1.0, 8.0 * alpha)) <=
          1e-12);
}

TEST_CASE("controlled_power: repeated squaring vs brute force") {
    // Spec case: dim 8, i = 4 (16 sequential multiplications).
    const UnitaryMatrix u = haar_unitary(8, 321);
    const GateOp gate = controlled_power(u, 4, 0, {1, 2, 3});
    Eigen::MatrixXcd brute = Eigen::MatrixXcd::Identity(8, 8);
    for (int k = 0; k < 16; ++k) {
        brute = u.mat() * brute;
    }
    CHECK(max_abs(gate.matrix.mat() - brute) <= 1e-9);
}

TEST_CASE("controlled_power: agreement sweep i <= 6, dim <= 16") {
    for (int n = 1; n <= 4; ++n) {
        const Eigen::Index dim = Eigen::Index{1} << n;
        const UnitaryMatrix u =
            haar_unitary(dim, 990 + static_cast<uint64_t>(n));
        std::vector<int> targets(static_cast<size_t>(n));
        for (int q = 0; q < n; ++q) {
            targets[static_cast<size_t>(q)] = q + 1;
        }
        Eigen::MatrixXcd brute = Eigen::MatrixXcd::Identity(dim, dim);
        int applied = 0;
        for (int i = 0; i <= 6; ++i) {
            const int want = 1 << i;
            while (applied < want) {
                brute = u.mat() * brute;
                ++applied;
            }
            const GateOp gate = controlled_power(u, i, 0, targets);
            REQUIRE(max_abs(gate.matrix.mat() - brute) <= 1e-9);
        }
    }
}

TEST_CASE("run_circuit: empty circuit and H H cancellation") {
    CircuitSpec empty;
    empty.layout = RegisterLayout{0, 2};
    const QubitState in = random_state(2, 7);
    const QubitState out = run_circuit(empty, in);
    CHECK((out.amplitudes() - in.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

    CircuitSpec hh;
    hh.layout = RegisterLayout{0, 2};
    hh.gates.push_back(GateOp{h_gate(), {0}, {}});
    hh.gates.push_back(GateOp{h_gate(), {0}, {}});
    const QubitState round = run_circuit(hh, in);
    CHECK((round.amplitudes() - in.amplitudes()).cwiseAbs().maxCoeff() <=
          1e-12);
}

// The detection circuit's closed form: (1/sqrt(2^j)) sum_k |k> (x) U^k|0>.
TEST_CASE("run_circuit: detection circuit equals the power superposition") {
    const int j = 3;
    const int n = 2;
    const UnitaryMatrix u = haar_unitary(4, 5150);

    CircuitSpec circuit;
    circuit.layout = RegisterLayout{j, n};
    for (int q = 0; q < j; ++q) {
        circuit.gates.push_back(GateOp{h_gate(), {q}, {}});
    }
    for (int q = 0; q < j; ++q) {
        circuit.gates.push_back(controlled_power(u, j - 1 - q, q, {3, 4}));
    }
    const QubitState got =
        run_circuit(circuit, QubitState::zero(j + n));

    Eigen::VectorXcd want(Eigen::Index{1} << (j + n));
    const double amp = 1.0 / std::sqrt(8.0);
    Eigen::VectorXcd power_state = Eigen::VectorXcd::Zero(4);
    power_state[0] = 1.0;
    for (int k = 0; k < 8; ++k) {
        want.segment(k * 4, 4) = amp * power_state;
        power_state = u.mat() * power_state;
    }
    CHECK((got.amplitudes() - want).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("born_probability: basics and completeness") {
    CHECK(born_probability(QubitState::zero(2), {0, 1}, 0) ==
          doctest::Approx(1.0).epsilon(1e-15));

    const QubitState plus =
        apply_gate(QubitState::zero(1), GateOp{h_gate(), {0}, {}});
    CHECK(born_probability(plus, {0}, 0) ==
          doctest::Approx(0.5).epsilon(1e-12));

    const QubitState s = random_state(4, 88);
    for (const std::vector<int> &reg :
         {std::vector<int>{0, 2}, std::vector<int>{1}, std::vector<int>{3, 0, 1}}) {
        double total = 0.0;
        for (uint64_t o = 0; o < (uint64_t{1} << reg.size()); ++o) {
            total += born_probability(s, reg, o);
        }
        CHECK(std::abs(total - 1.0) <= 1e-10);
    }

    CHECK_THROWS_AS(born_probability(s, {0}, 2), LengthMismatchError);
}

TEST_CASE("sample_measurement: determinism and frequencies") {
    const QubitState one = QubitState::basis(1, 1);
    const Histogram h = sample_measurement(one, {0}, 100, 4);
    CHECK(h.count_of(1) == 100);
    CHECK(h.count_of(0) == 0);

    const QubitState plus =
        apply_gate(QubitState::zero(1), GateOp{h_gate(), {0}, {}});
    const uint64_t shots = 100000;
    const Histogram hp = sample_measurement(plus, {0}, shots, 17);
    const double freq =
        static_cast<double>(hp.count_of(0)) / static_cast<double>(shots);
    const double se = std::sqrt(0.25 / static_cast<double>(shots));
    CHECK(std::abs(freq - 0.5) <= 3.0 * se);

    const Histogram again = sample_measurement(plus, {0}, shots, 17);
    CHECK(hp.counts == again.counts);
}

TEST_CASE("sample_measurement: thread count does not change the histogram") {
    const QubitState s = random_state(6, 2024);
    setenv("RECURLAB_THREADS", "1", 1);
    const Histogram h1 = sample_measurement(s, {0, 1, 2}, 50000, 99);
    setenv("RECURLAB_THREADS", "4", 1);
    const Histogram h4 = sample_measurement(s, {0, 1, 2}, 50000, 99);
    unsetenv("RECURLAB_THREADS");
    CHECK(h1.counts == h4.counts);
}

// The mixture form of the detection probability: measuring the state
// register of the detection circuit equals the k-average of |c_k|^2.
TEST_CASE("circuit-mixture equivalence at small sizes") {
    uint64_t seed = 31337;
    for (int n = 1; n <= 4; ++n) {
        for (int j = 1; j <= 4; j += 3) {
            const Eigen::Index dim = Eigen::Index{1} << n;
            const UnitaryMatrix u = haar_unitary(dim, seed++);

            CircuitSpec circuit;
            circuit.layout = RegisterLayout{j, n};
            std::vector<int> state_targets;
            for (int q = 0; q < n; ++q) {
                state_targets.push_back(j + q);
            }
            for (int q = 0; q < j; ++q) {
                circuit.gates.push_back(GateOp{h_gate(), {q}, {}});
            }
            for (int q = 0; q < j; ++q) {
                circuit.gates.push_back(
                    controlled_power(u, j - 1 - q, q, state_targets));
            }
            const QubitState out =
                run_circuit(circuit, QubitState::zero(j + n));
            const double p_circuit =
                born_probability(out, state_targets, 0);

            double p_mixture = 0.0;
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
            v[0] = 1.0;
            for (int k = 0; k < (1 << j); ++k) {
                p_mixture += std::norm(v[0]);
                v = u.mat() * v;
            }
            p_mixture /= static_cast<double>(1 << j);
            REQUIRE(std::abs(p_circuit - p_mixture) <= 1e-10);
        }
    }
}

TEST_CASE("RegisterLayout: cap enforced with a sizing error") {
    CHECK_THROWS_AS(RegisterLayout({20, 8}).validate(), SizingError);
    CHECK_THROWS_AS(RegisterLayout({1, 0}).validate(),
                    InvalidDimensionError);
    RegisterLayout ok{10, 9};
    ok.validate();
    CHECK(ok.total() == 19);
}

TEST_CASE("QubitState: norm invariant enforced") {
    Eigen::VectorXcd bad(2);
    bad << 1.0, 1.0;
    CHECK_THROWS_AS(QubitState{bad}, InvalidArgumentError);
    Eigen::VectorXcd three(3);
    three << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(QubitState{three}, InvalidDimensionError);
}

TEST_CASE("circuit json: named primitives and inline matrices round trip") {
    // Named gates parse to their matrices.
    const Json named = Json::parse(R"({
        "layout": {"number_qubits": 1, "state_qubits": 2},
        "gates": [
            {"name": "H", "targets": [0]},
            {"name": "X", "targets": [2]},
            {"name": "CPHASE", "alpha": 0.5, "controls": [0], "targets": [1]},
            {"name": "CCPHASE", "alpha": 1.25, "controls": [0, 1], "targets": [2]}
        ]
    })");
    const CircuitSpec circuit = circuit_from_json(named);
    REQUIRE(circuit.gates.size() == 4);
    CHECK(max_abs(circuit.gates[0].matrix.mat() - h_gate().mat()) == 0.0);
    CHECK(max_abs(circuit.gates[1].matrix.mat() - x_gate().mat()) == 0.0);
    CHECK(max_abs(circuit.gates[2].matrix.mat() - phase_gate(0.5).mat()) ==
          0.0);
    CHECK(circuit.gates[3].controls == std::vector<int>{0, 1});

    // Inline serialization reproduces the same circuit behavior.
    const CircuitSpec back = circuit_from_json(to_json(circuit));
    const QubitState in = random_state(3, 321);
    const QubitState a = run_circuit(circuit, in);
    const QubitState b = run_circuit(back, in);
    CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(
        circuit_from_json(Json::parse(
            R"({"layout": {"number_qubits": 0, "state_qubits": 1},
                "gates": [{"name": "BOGUS", "targets": [0]}]})")),
        IoError);
}

TEST_CASE("histogram csv: fixed-width outcome bitstrings") {
    const QubitState plus =
        apply_gate(QubitState::zero(2), GateOp{h_gate(), {0}, {}});
    const Histogram h = sample_measurement(plus, {0, 1}, 1000, 8);
    const std::string csv = histogram_csv(h);
    CHECK(csv.rfind("outcome,count\n", 0) == 0);
    CHECK(csv.find("00,") != std::string::npos);
    CHECK(csv.find("10,") != std::string::npos);
}
