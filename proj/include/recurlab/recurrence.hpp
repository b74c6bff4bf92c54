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

#include <optional>
#include <vector>

#include "recurlab/statevector.hpp"

namespace recurlab {

/// Dense assembly of conjugated tensor products is capped here; the
/// far larger instances are handled analytically, never materialized.
inline constexpr int kAssembledQubitCap = 12;

/// Doubly-controlled phase: diag(1,...,1, e^{2 pi i theta}) on 3 qubits.
UnitaryMatrix cctheta_factor(double theta);

/// Uniform theta samples (in turns, i.e. the eigenvalue is
/// e^{2 pi i theta}), rejecting a 1e-6 neighborhood of every rational
/// p/q with q <= 8 so no factor lands on a low-period eigenvalue.
std::vector<double> sample_thetas(int count, uint64_t seed);

/// U' = V (U_1 x ... x U_r) V† with the ground truth kept alongside.
struct HiddenTensorUnitary {
    std::vector<UnitaryMatrix> factors;
    std::optional<UnitaryMatrix> conjugator; // nullopt = identity
    UnitaryMatrix assembled;
    int total_qubits;
};

HiddenTensorUnitary
build_hidden_tensor(const std::vector<UnitaryMatrix> &factors,
                    const std::optional<UnitaryMatrix> &conjugator);

/// Eigenphases theta_i together with the weights |<psi_i|psi0>|^2.
struct OverlapProfile {
    std::vector<double> weights;
    std::vector<double> eigenphases;
};

OverlapProfile overlap_profile(const UnitaryMatrix &u, uint64_t psi0);

/// c_k = sum_i w_i e^{i k theta_i} for k = 0..k_max.
std::vector<Complex> overlap_series(const OverlapProfile &profile, int k_max);

/// Total weight sitting on eigenvalues within tol of 1.
double unit_eigenvalue_weight(const OverlapProfile &profile,
                              double tol = kUnitEigenvalueTol);

/// Fraction of eigenvalues lambda with |arg(lambda^m)| <= tol.
double frac_period(const UnitaryMatrix &u, int m,
                   double tol = kUnitEigenvalueTol);

/// Same fraction computed from the factor spectra alone; the assembled
/// operator is never formed, so 24-factor instances run in well under a
/// second.
double frac_period(const std::vector<UnitaryMatrix> &factors, int m,
                   double tol = kUnitEigenvalueTol);

/// Expected detection probability (f + (1-f) 2^{-n/2})^2 of the
/// bias-plus-walk model; the walk term is negligible for n >= 40.
double bias_to_born(double bias, int n);

/// 1 - (1-p)^runs.
double detection_probability(double p, uint64_t runs);

/// Smallest run count reaching the given confidence of >= 1 detection.
uint64_t runs_for_confidence(double p, double confidence);

/// Two-exponential tail approximation (1/6)e^{-z^2} + (1/2)e^{-4z^2/3}.
double ec_approx(double z);

struct NoiseModel {
    double per_gate_epsilon = 0.0;
    uint64_t seed = 0;
};

struct RecurrenceEstimate {
    double probability = 0.0;
    double stderr_ = 0.0;
    uint64_t shots = 0;
    bool k_zero_included = true;
};

struct RecurrenceInstance {
    UnitaryMatrix u;
    RegisterLayout layout;
    NoiseModel noise;
};

/// The detection circuit: Hadamards on the number register, then the
/// controlled dyadic powers U^{2^b} from each number qubit onto the
/// state register. The exponent k runs over all control settings
/// 0..2^j-1; k = 0 contributes a guaranteed trivial recurrence, so the
/// closed forms below are offered with and without it.
CircuitSpec recurrence_circuit(const UnitaryMatrix &u, int number_qubits);

/// Each gate G becomes G exp(i epsilon K) with K a fresh Hermitian
/// sample scaled so E||K psi||^2 = 1 over Haar psi; epsilon is then the
/// expected per-gate state deviation. epsilon = 0 returns the circuit
/// unchanged.
CircuitSpec perturb_circuit(const CircuitSpec &circuit,
                            const NoiseModel &noise);

/// Outcome histogram of the state register after the detection circuit
/// (noise applied when the model says so).
Histogram recurrence_histogram(const RecurrenceInstance &instance,
                               uint64_t shots, uint64_t seed);

/// Monte Carlo Born frequency of |0...0> on the state register.
RecurrenceEstimate estimate_recurrence(const RecurrenceInstance &instance,
                                       uint64_t shots, uint64_t seed);

/// Closed-form mixture probability (1/2^j) sum_k |c_k|^2, optionally
/// dropping the k = 0 term (then averaged over 2^j - 1 values).
double exact_recurrence_probability(const OverlapProfile &profile,
                                    int number_qubits,
                                    bool include_k_zero = true);

} // namespace recurlab
