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
#include "recurlab/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "recurlab/rng.hpp"
#include "recurlab/threading.hpp"

namespace recurlab {

void RegisterLayout::validate() const {
    if (number_qubits < 0 || state_qubits < 1) {
        throw InvalidDimensionError(
            "RegisterLayout: need number_qubits >= 0 and state_qubits >= 1");
    }
    if (total() > cap) {
        throw SizingError("RegisterLayout: " + std::to_string(total()) +
                          " qubits exceeds the dense simulator cap of " +
                          std::to_string(cap) +
                          "; this build holds full amplitude vectors only");
    }
}

std::vector<int> RegisterLayout::number_register() const {
    std::vector<int> q(static_cast<size_t>(number_qubits));
    for (int i = 0; i < number_qubits; ++i) {
        q[static_cast<size_t>(i)] = i;
    }
    return q;
}

std::vector<int> RegisterLayout::state_register() const {
    std::vector<int> q(static_cast<size_t>(state_qubits));
    for (int i = 0; i < state_qubits; ++i) {
        q[static_cast<size_t>(i)] = number_qubits + i;
    }
    return q;
}

QubitState::QubitState(Eigen::VectorXcd amplitudes)
    : amps_(std::move(amplitudes)) {
    const Eigen::Index d = amps_.size();
    if (d < 2 || (d & (d - 1)) != 0) {
        throw InvalidDimensionError(
            "QubitState: amplitude count must be a power of two >= 2");
    }
    num_qubits_ = 0;
    for (Eigen::Index t = d; t > 1; t >>= 1) {
        ++num_qubits_;
    }
    if (num_qubits_ > kQubitCap) {
        throw SizingError("QubitState: exceeds the simulator cap");
    }
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > kStateNormTol) {
        throw InvalidArgumentError("QubitState: ||psi|| = " +
                                   std::to_string(norm) + ", expected 1");
    }
}

QubitState QubitState::basis(int num_qubits, uint64_t index) {
    if (num_qubits < 1 || num_qubits > kQubitCap) {
        throw InvalidDimensionError("QubitState::basis: bad qubit count");
    }
    const uint64_t dim = uint64_t{1} << num_qubits;
    if (index >= dim) {
        throw IndexOutOfRangeError("QubitState::basis: index out of range");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return QubitState(std::move(v));
}

namespace {

void check_gate_indices(const GateOp &gate, int num_qubits) {
    std::set<int> seen;
    for (int q : gate.targets) {
        if (q < 0 || q >= num_qubits) {
            throw IndexOutOfRangeError("apply_gate: target qubit " +
                                       std::to_string(q) + " out of range");
        }
        if (!seen.insert(q).second) {
            throw InvalidArgumentError("apply_gate: duplicate target qubit");
        }
    }
    for (int q : gate.controls) {
        if (q < 0 || q >= num_qubits) {
            throw IndexOutOfRangeError("apply_gate: control qubit " +
                                       std::to_string(q) + " out of range");
        }
        if (!seen.insert(q).second) {
            throw InvalidArgumentError(
                "apply_gate: control and target qubits must be disjoint");
        }
    }
    if (gate.targets.empty()) {
        throw InvalidArgumentError("apply_gate: gate needs targets");
    }
    const Eigen::Index want = Eigen::Index{1}
                              << static_cast<Eigen::Index>(gate.targets.size());
    if (gate.matrix.dim() != want) {
        throw DimensionMismatchError(
            "apply_gate: matrix dim " + std::to_string(gate.matrix.dim()) +
            " does not match 2^" + std::to_string(gate.targets.size()));
    }
}

uint64_t bit_of_qubit(int qubit, int num_qubits) {
    return uint64_t{1} << (num_qubits - 1 - qubit);
}

// Targets occupying the least significant bits, in qubit order, let the
// kernel view the state as a (2^t x 2^(N-t)) column-major matrix.
bool targets_are_low_block(const std::vector<int> &targets, int num_qubits) {
    const int t = static_cast<int>(targets.size());
    for (int i = 0; i < t; ++i) {
        if (targets[static_cast<size_t>(i)] != num_qubits - t + i) {
            return false;
        }
    }
    return true;
}

} // namespace

QubitState apply_gate(const QubitState &state, const GateOp &gate) {
    const int n = state.num_qubits();
    check_gate_indices(gate, n);
    const int t = static_cast<int>(gate.targets.size());
    const uint64_t dim = uint64_t{1} << n;
    const uint64_t gate_dim = uint64_t{1} << t;

    uint64_t control_mask = 0;
    for (int q : gate.controls) {
        control_mask |= bit_of_qubit(q, n);
    }

    Eigen::VectorXcd amps = state.amplitudes();

    if (targets_are_low_block(gate.targets, n)) {
        // Contiguous low block: batch the active columns into one GEMM.
        const Eigen::Index block = static_cast<Eigen::Index>(gate_dim);
        const Eigen::Index ncols = static_cast<Eigen::Index>(dim / gate_dim);
        Eigen::Map<Eigen::MatrixXcd> view(amps.data(), block, ncols);
        const uint64_t col_mask = control_mask >> t;
        std::vector<Eigen::Index> active;
        active.reserve(static_cast<size_t>(ncols));
        for (Eigen::Index c = 0; c < ncols; ++c) {
            if ((static_cast<uint64_t>(c) & col_mask) == col_mask) {
                active.push_back(c);
            }
        }
        if (static_cast<Eigen::Index>(active.size()) == ncols) {
            view = gate.matrix.mat() * view;
        } else if (!active.empty()) {
            Eigen::MatrixXcd gathered(block,
                                      static_cast<Eigen::Index>(active.size()));
            for (size_t k = 0; k < active.size(); ++k) {
                gathered.col(static_cast<Eigen::Index>(k)) =
                    view.col(active[k]);
            }
            gathered = gate.matrix.mat() * gathered;
            for (size_t k = 0; k < active.size(); ++k) {
                view.col(active[k]) = gathered.col(static_cast<Eigen::Index>(k));
            }
        }
        return QubitState(std::move(amps));
    }

    // General scatter/gather kernel.
    std::vector<uint64_t> target_bit(static_cast<size_t>(t));
    for (int i = 0; i < t; ++i) {
        target_bit[static_cast<size_t>(i)] =
            bit_of_qubit(gate.targets[static_cast<size_t>(i)], n);
    }
    // Offset of each gate row inside a group: gate index bit i (MSB
    // first over targets) maps to the target's amplitude bit.
    std::vector<uint64_t> offset(static_cast<size_t>(gate_dim));
    for (uint64_t g = 0; g < gate_dim; ++g) {
        uint64_t off = 0;
        for (int i = 0; i < t; ++i) {
            if (g & (uint64_t{1} << (t - 1 - i))) {
                off |= target_bit[static_cast<size_t>(i)];
            }
        }
        offset[static_cast<size_t>(g)] = off;
    }
    uint64_t targets_mask = 0;
    for (uint64_t b : target_bit) {
        targets_mask |= b;
    }

    Eigen::VectorXcd scratch(static_cast<Eigen::Index>(gate_dim));
    const Eigen::MatrixXcd &m = gate.matrix.mat();
    for (uint64_t base = 0; base < dim; ++base) {
        if (base & targets_mask) {
            continue; // only canonical group representatives
        }
        if ((base & control_mask) != control_mask) {
            continue;
        }
        for (uint64_t g = 0; g < gate_dim; ++g) {
            scratch[static_cast<Eigen::Index>(g)] =
                amps[static_cast<Eigen::Index>(base | offset[g])];
        }
        const Eigen::VectorXcd out = m * scratch;
        for (uint64_t g = 0; g < gate_dim; ++g) {
            amps[static_cast<Eigen::Index>(base | offset[g])] =
                out[static_cast<Eigen::Index>(g)];
        }
    }
    return QubitState(std::move(amps));
}

namespace {

// One Newton-Schulz step pulls a slightly drifted product back onto the
// unitary manifold; the defect is squared each application.
Eigen::MatrixXcd polar_correct(const Eigen::MatrixXcd &a) {
    const Eigen::Index d = a.rows();
    return 0.5 * a * (3.0 * Eigen::MatrixXcd::Identity(d, d) -
                      a.adjoint() * a);
}

} // namespace

GateOp controlled_power(const UnitaryMatrix &u, int i, int control,
                        const std::vector<int> &state_targets) {
    if (i < 0) {
        throw InvalidArgumentError("controlled_power: exponent index < 0");
    }
    const Eigen::Index want =
        Eigen::Index{1} << static_cast<Eigen::Index>(state_targets.size());
    if (u.dim() != want) {
        throw DimensionMismatchError(
            "controlled_power: unitary dim does not match target count");
    }
    Eigen::MatrixXcd pow = u.mat();
    for (int s = 0; s < i; ++s) {
        pow = polar_correct(pow * pow);
    }
    return GateOp{UnitaryMatrix(std::move(pow)), state_targets, {control}};
}

QubitState run_circuit(const CircuitSpec &circuit, const QubitState &input) {
    circuit.layout.validate();
    if (input.num_qubits() != circuit.layout.total()) {
        throw DimensionMismatchError(
            "run_circuit: input state does not match layout");
    }
    QubitState state = input;
    for (const GateOp &gate : circuit.gates) {
        state = apply_gate(state, gate);
    }
    return state;
}

namespace {

void check_register(const std::vector<int> &register_qubits, int num_qubits) {
    if (register_qubits.empty()) {
        throw InvalidArgumentError("register subset must be non-empty");
    }
    if (register_qubits.size() > 63) {
        throw SizingError("register subset too wide");
    }
    std::set<int> seen;
    for (int q : register_qubits) {
        if (q < 0 || q >= num_qubits) {
            throw IndexOutOfRangeError("register qubit out of range");
        }
        if (!seen.insert(q).second) {
            throw InvalidArgumentError("duplicate register qubit");
        }
    }
}

} // namespace

double born_probability(const QubitState &state,
                        const std::vector<int> &register_qubits,
                        uint64_t outcome) {
    const int n = state.num_qubits();
    check_register(register_qubits, n);
    const int r = static_cast<int>(register_qubits.size());
    if (outcome >= (uint64_t{1} << r)) {
        throw LengthMismatchError(
            "born_probability: outcome has more bits than the register");
    }
    uint64_t mask = 0;
    uint64_t want = 0;
    for (int b = 0; b < r; ++b) {
        const uint64_t bit =
            bit_of_qubit(register_qubits[static_cast<size_t>(b)], n);
        mask |= bit;
        if (outcome & (uint64_t{1} << (r - 1 - b))) {
            want |= bit;
        }
    }
    const Eigen::VectorXcd &amps = state.amplitudes();
    double p = 0.0;
    const uint64_t dim = uint64_t{1} << n;
    for (uint64_t idx = 0; idx < dim; ++idx) {
        if ((idx & mask) == want) {
            p += std::norm(amps[static_cast<Eigen::Index>(idx)]);
        }
    }
    return p;
}

Eigen::VectorXd register_distribution(
    const QubitState &state, const std::vector<int> &register_qubits) {
    const int n = state.num_qubits();
    check_register(register_qubits, n);
    const int r = static_cast<int>(register_qubits.size());
    std::vector<uint64_t> bits(static_cast<size_t>(r));
    for (int b = 0; b < r; ++b) {
        bits[static_cast<size_t>(b)] =
            bit_of_qubit(register_qubits[static_cast<size_t>(b)], n);
    }
    Eigen::VectorXd p =
        Eigen::VectorXd::Zero(Eigen::Index{1} << static_cast<Eigen::Index>(r));
    const Eigen::VectorXcd &amps = state.amplitudes();
    const uint64_t dim = uint64_t{1} << n;
    for (uint64_t idx = 0; idx < dim; ++idx) {
        uint64_t out = 0;
        for (int b = 0; b < r; ++b) {
            if (idx & bits[static_cast<size_t>(b)]) {
                out |= uint64_t{1} << (r - 1 - b);
            }
        }
        p[static_cast<Eigen::Index>(out)] +=
            std::norm(amps[static_cast<Eigen::Index>(idx)]);
    }
    return p;
}

uint64_t Histogram::count_of(uint64_t outcome) const {
    const auto it = std::lower_bound(
        counts.begin(), counts.end(), outcome,
        [](const auto &entry, uint64_t key) { return entry.first < key; });
    if (it != counts.end() && it->first == outcome) {
        return it->second;
    }
    return 0;
}

Histogram sample_measurement(const QubitState &state,
                             const std::vector<int> &register_qubits,
                             uint64_t shots, uint64_t seed) {
    if (shots < 1) {
        throw InvalidArgumentError("sample_measurement: shots must be >= 1");
    }
    const Eigen::VectorXd p = register_distribution(state, register_qubits);
    Eigen::VectorXd cdf(p.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    cdf[p.size() - 1] = std::max(cdf[p.size() - 1], 1.0);

    // Chunk decomposition depends only on the shot count; each chunk
    // draws from its own derived stream and merges by index.
    constexpr uint64_t kChunk = 1uLL << 14;
    const uint64_t n_chunks = (shots + kChunk - 1) / kChunk;
    std::vector<std::map<uint64_t, uint64_t>> partial(
        static_cast<size_t>(n_chunks));
    parallel_chunks(static_cast<size_t>(n_chunks), [&](size_t c) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(c)));
        const uint64_t begin = static_cast<uint64_t>(c) * kChunk;
        const uint64_t end = std::min(shots, begin + kChunk);
        auto &local = partial[c];
        for (uint64_t s = begin; s < end; ++s) {
            const double u = rng.uniform();
            const double *lo = cdf.data();
            const double *hi = cdf.data() + cdf.size();
            const double *it = std::upper_bound(lo, hi, u);
            const uint64_t outcome = static_cast<uint64_t>(
                std::min<std::ptrdiff_t>(it - lo, cdf.size() - 1));
            ++local[outcome];
        }
    });

    std::map<uint64_t, uint64_t> merged;
    for (const auto &local : partial) {
        for (const auto &[outcome, count] : local) {
            merged[outcome] += count;
        }
    }
    Histogram h;
    h.register_width = static_cast<int>(register_qubits.size());
    h.shots = shots;
    h.counts.assign(merged.begin(), merged.end());
    return h;
}

UnitaryMatrix h_gate() {
    Eigen::MatrixXcd m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return UnitaryMatrix(std::move(m));
}

UnitaryMatrix x_gate() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return UnitaryMatrix(std::move(m));
}

UnitaryMatrix phase_gate(double alpha) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = std::polar(1.0, alpha);
    return UnitaryMatrix(std::move(m));
}

UnitaryMatrix swap_gate() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 3) = 1.0;
    return UnitaryMatrix(std::move(m));
}

} // namespace recurlab
