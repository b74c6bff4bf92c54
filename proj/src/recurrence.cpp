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
#include "recurlab/recurrence.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "recurlab/rng.hpp"

namespace recurlab {

UnitaryMatrix cctheta_factor(double theta) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(8, 8);
    m(7, 7) = std::polar(1.0, 2.0 * M_PI * theta);
    return UnitaryMatrix(std::move(m));
}

std::vector<double> sample_thetas(int count, uint64_t seed) {
    if (count < 0) {
        throw InvalidArgumentError("sample_thetas: negative count");
    }
    Rng rng(seed);
    std::vector<double> thetas;
    thetas.reserve(static_cast<size_t>(count));
    while (static_cast<int>(thetas.size()) < count) {
        const double t = rng.uniform();
        bool near_low_period = false;
        for (int q = 1; q <= 8 && !near_low_period; ++q) {
            const double scaled = t * q;
            near_low_period =
                std::abs(scaled - std::round(scaled)) < 1e-6 * q;
        }
        if (!near_low_period) {
            thetas.push_back(t);
        }
    }
    return thetas;
}

HiddenTensorUnitary
build_hidden_tensor(const std::vector<UnitaryMatrix> &factors,
                    const std::optional<UnitaryMatrix> &conjugator) {
    if (factors.empty()) {
        throw InvalidArgumentError("build_hidden_tensor: no factors");
    }
    int total_qubits = 0;
    for (const auto &f : factors) {
        const Eigen::Index d = f.dim();
        if (d < 2 || (d & (d - 1)) != 0) {
            throw InvalidDimensionError(
                "build_hidden_tensor: factor dims must be powers of two");
        }
        for (Eigen::Index t = d; t > 1; t >>= 1) {
            ++total_qubits;
        }
        if (total_qubits > kAssembledQubitCap) {
            throw SizingError(
                "build_hidden_tensor: assembled operator would need " +
                std::to_string(total_qubits) + "+ qubits; dense assembly "
                "stops at " + std::to_string(kAssembledQubitCap));
        }
    }
    UnitaryMatrix product = kron_unitary(factors);
    if (conjugator) {
        if (conjugator->dim() != product.dim()) {
            throw DimensionMismatchError(
                "build_hidden_tensor: conjugator dim mismatch");
        }
        Eigen::MatrixXcd assembled = conjugator->mat() * product.mat() *
                                     conjugator->mat().adjoint();
        return HiddenTensorUnitary{factors, conjugator,
                                   UnitaryMatrix(std::move(assembled)),
                                   total_qubits};
    }
    return HiddenTensorUnitary{factors, std::nullopt, std::move(product),
                               total_qubits};
}

OverlapProfile overlap_profile(const UnitaryMatrix &u, uint64_t psi0) {
    if (psi0 >= static_cast<uint64_t>(u.dim())) {
        throw IndexOutOfRangeError("overlap_profile: basis index out of range");
    }
    const SpectralDecomposition d = eigendecompose_unitary(u);
    OverlapProfile profile;
    const auto n = static_cast<size_t>(u.dim());
    profile.weights.resize(n);
    profile.eigenphases.resize(n);
    for (size_t i = 0; i < n; ++i) {
        profile.weights[i] = std::norm(
            d.eigenvectors(static_cast<Eigen::Index>(psi0),
                           static_cast<Eigen::Index>(i)));
        profile.eigenphases[i] = d.eigenphases[static_cast<Eigen::Index>(i)];
    }
    return profile;
}

std::vector<Complex> overlap_series(const OverlapProfile &profile, int k_max) {
    if (k_max < 1) {
        throw InvalidArgumentError("overlap_series: k_max must be >= 1");
    }
    const size_t n = profile.weights.size();
    std::vector<Complex> series(static_cast<size_t>(k_max) + 1);
    std::vector<Complex> rotor(n, Complex(1.0, 0.0));
    std::vector<Complex> step(n);
    for (size_t i = 0; i < n; ++i) {
        step[i] = std::polar(1.0, profile.eigenphases[i]);
    }
    for (int k = 0; k <= k_max; ++k) {
        Complex c = 0.0;
        for (size_t i = 0; i < n; ++i) {
            c += profile.weights[i] * rotor[i];
        }
        series[static_cast<size_t>(k)] = c;
        if (k < k_max) {
            for (size_t i = 0; i < n; ++i) {
                rotor[i] *= step[i];
            }
        }
    }
    return series;
}

double unit_eigenvalue_weight(const OverlapProfile &profile, double tol) {
    double f = 0.0;
    for (size_t i = 0; i < profile.weights.size(); ++i) {
        if (std::abs(profile.eigenphases[i]) <= tol) {
            f += profile.weights[i];
        }
    }
    return f;
}

namespace {

double wrap_phase(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) {
        a += 2.0 * M_PI;
    }
    return a;
}

} // namespace

double frac_period(const UnitaryMatrix &u, int m, double tol) {
    if (m < 1 || tol <= 0.0) {
        throw InvalidArgumentError("frac_period: need m >= 1 and tol > 0");
    }
    const SpectralDecomposition d = eigendecompose_unitary(u);
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < d.eigenphases.size(); ++i) {
        if (std::abs(wrap_phase(m * d.eigenphases[i])) <= tol) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(u.dim());
}

namespace {

struct PhaseCluster {
    double phase;
    double weight; // multiplicity / factor dim
};

// Distinct eigenphases of one factor with their multiplicity fractions.
std::vector<PhaseCluster> factor_clusters(const UnitaryMatrix &factor) {
    const SpectralDecomposition d = eigendecompose_unitary(factor);
    std::vector<PhaseCluster> clusters;
    const double inv_dim = 1.0 / static_cast<double>(factor.dim());
    for (Eigen::Index i = 0; i < d.eigenphases.size(); ++i) {
        if (!clusters.empty() &&
            d.eigenphases[i] - clusters.back().phase < 1e-12) {
            clusters.back().weight += inv_dim;
        } else {
            clusters.push_back({d.eigenphases[i], inv_dim});
        }
    }
    return clusters;
}

void accumulate_fraction(const std::vector<std::vector<PhaseCluster>> &all,
                         size_t level, double phase_sum, double weight, int m,
                         double tol, double *fraction) {
    if (level == all.size()) {
        if (std::abs(wrap_phase(m * phase_sum)) <= tol) {
            *fraction += weight;
        }
        return;
    }
    for (const PhaseCluster &c : all[level]) {
        accumulate_fraction(all, level + 1, phase_sum + c.phase,
                            weight * c.weight, m, tol, fraction);
    }
}

} // namespace

double frac_period(const std::vector<UnitaryMatrix> &factors, int m,
                   double tol) {
    if (m < 1 || tol <= 0.0) {
        throw InvalidArgumentError("frac_period: need m >= 1 and tol > 0");
    }
    if (factors.empty()) {
        throw InvalidArgumentError("frac_period: no factors");
    }
    std::vector<std::vector<PhaseCluster>> clusters;
    clusters.reserve(factors.size());
    double combos = 1.0;
    for (const auto &f : factors) {
        clusters.push_back(factor_clusters(f));
        combos *= static_cast<double>(clusters.back().size());
        if (combos > static_cast<double>(1uLL << 26)) {
            throw CapExceededError(
                "frac_period: too many distinct phase combinations for the "
                "factored walk; use fewer or more degenerate factors");
        }
    }
    double fraction = 0.0;
    accumulate_fraction(clusters, 0, 0.0, 1.0, m, tol, &fraction);
    return fraction;
}

double bias_to_born(double bias, int n) {
    if (bias < 0.0 || bias > 1.0) {
        throw InvalidArgumentError("bias_to_born: bias must be in [0, 1]");
    }
    if (n < 1) {
        throw InvalidDimensionError("bias_to_born: n must be >= 1");
    }
    const double residual =
        (1.0 - bias) * std::exp2(-0.5 * static_cast<double>(n));
    const double amplitude = bias + residual;
    return amplitude * amplitude;
}

double detection_probability(double p, uint64_t runs) {
    if (p <= 0.0 || p > 1.0) {
        throw InvalidArgumentError(
            "detection_probability: p must be in (0, 1]");
    }
    // 1 - (1-p)^runs without cancellation.
    return -std::expm1(static_cast<double>(runs) * std::log1p(-p));
}

uint64_t runs_for_confidence(double p, double confidence) {
    if (confidence <= 0.0 || confidence >= 1.0) {
        throw InvalidArgumentError(
            "runs_for_confidence: confidence must be in (0, 1)");
    }
    if (p <= 0.0) {
        throw UnreachableConfidenceError(
            "runs_for_confidence: zero per-run probability never reaches a "
            "positive confidence");
    }
    if (p >= 1.0) {
        return 1;
    }
    const double runs = std::log1p(-confidence) / std::log1p(-p);
    return static_cast<uint64_t>(std::ceil(runs - 1e-12));
}

double ec_approx(double z) {
    if (z < 0.0) {
        throw InvalidArgumentError("ec_approx: z must be >= 0");
    }
    return std::exp(-z * z) / 6.0 + std::exp(-4.0 * z * z / 3.0) / 2.0;
}

CircuitSpec recurrence_circuit(const UnitaryMatrix &u, int number_qubits) {
    if (number_qubits < 1) {
        throw InvalidArgumentError(
            "recurrence_circuit: need at least one number qubit");
    }
    int state_qubits = 0;
    for (Eigen::Index t = u.dim(); t > 1; t >>= 1) {
        ++state_qubits;
    }
    if ((Eigen::Index{1} << state_qubits) != u.dim()) {
        throw InvalidDimensionError(
            "recurrence_circuit: unitary dim must be a power of two");
    }
    CircuitSpec circuit;
    circuit.layout = RegisterLayout{number_qubits, state_qubits};
    circuit.layout.validate();
    const std::vector<int> state_targets = circuit.layout.state_register();
    for (int q = 0; q < number_qubits; ++q) {
        circuit.gates.push_back(GateOp{h_gate(), {q}, {}});
    }
    for (int q = 0; q < number_qubits; ++q) {
        // Number qubit q carries dyadic weight 2^(j-1-q) of k.
        circuit.gates.push_back(
            controlled_power(u, number_qubits - 1 - q, q, state_targets));
    }
    return circuit;
}

namespace {

Eigen::MatrixXcd hermitian_noise_generator(Eigen::Index dim, Rng *rng) {
    Eigen::MatrixXcd k(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        k(i, i) = Complex(rng->normal(), 0.0);
        for (Eigen::Index j = i + 1; j < dim; ++j) {
            const Complex z = rng->complex_normal() / std::sqrt(2.0);
            k(i, j) = z;
            k(j, i) = std::conj(z);
        }
    }
    // Scale to E||K psi||^2 = 1 over Haar psi: tr(K†K)/dim = 1.
    const double scale =
        std::sqrt(k.squaredNorm() / static_cast<double>(dim));
    if (scale > 0.0) {
        k /= scale;
    }
    return k;
}

} // namespace

CircuitSpec perturb_circuit(const CircuitSpec &circuit,
                            const NoiseModel &noise) {
    if (noise.per_gate_epsilon < 0.0 || noise.per_gate_epsilon > 1.0) {
        throw InvalidArgumentError("perturb_circuit: epsilon must be in [0,1]");
    }
    if (noise.per_gate_epsilon == 0.0) {
        return circuit;
    }
    Rng rng(derive_seed(noise.seed, "gate-noise"));
    CircuitSpec noisy;
    noisy.layout = circuit.layout;
    noisy.gates.reserve(circuit.gates.size());
    for (const GateOp &gate : circuit.gates) {
        const Eigen::Index dim = gate.matrix.dim();
        const Eigen::MatrixXcd k = hermitian_noise_generator(dim, &rng);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
        Eigen::VectorXcd phases(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            phases[i] =
                std::polar(1.0, noise.per_gate_epsilon * es.eigenvalues()[i]);
        }
        const Eigen::MatrixXcd kick = es.eigenvectors() *
                                      phases.asDiagonal() *
                                      es.eigenvectors().adjoint();
        noisy.gates.push_back(GateOp{UnitaryMatrix(gate.matrix.mat() * kick),
                                     gate.targets, gate.controls});
    }
    return noisy;
}

Histogram recurrence_histogram(const RecurrenceInstance &instance,
                               uint64_t shots, uint64_t seed) {
    if (shots < 1) {
        throw InvalidArgumentError("recurrence_histogram: shots must be >= 1");
    }
    instance.layout.validate();
    const Eigen::Index want = Eigen::Index{1} << instance.layout.state_qubits;
    if (instance.u.dim() != want) {
        throw DimensionMismatchError(
            "recurrence_histogram: unitary does not fit the state register");
    }
    CircuitSpec circuit =
        recurrence_circuit(instance.u, instance.layout.number_qubits);
    circuit = perturb_circuit(circuit, instance.noise);
    const QubitState final_state =
        run_circuit(circuit, QubitState::zero(instance.layout.total()));
    return sample_measurement(final_state, instance.layout.state_register(),
                              shots, seed);
}

RecurrenceEstimate estimate_recurrence(const RecurrenceInstance &instance,
                                       uint64_t shots, uint64_t seed) {
    const Histogram hist = recurrence_histogram(instance, shots, seed);
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

double exact_recurrence_probability(const OverlapProfile &profile,
                                    int number_qubits, bool include_k_zero) {
    if (number_qubits < 1) {
        throw InvalidArgumentError(
            "exact_recurrence_probability: need number_qubits >= 1");
    }
    const int k_max = (1 << number_qubits) - 1;
    const std::vector<Complex> series = overlap_series(profile, k_max);
    double sum = 0.0;
    const int k_begin = include_k_zero ? 0 : 1;
    for (int k = k_begin; k <= k_max; ++k) {
        sum += std::norm(series[static_cast<size_t>(k)]);
    }
    const double denom = include_k_zero ? static_cast<double>(k_max + 1)
                                        : static_cast<double>(k_max);
    return sum / denom;
}

} // namespace recurlab
