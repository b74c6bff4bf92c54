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

#include "recurlab/linalg.hpp"

namespace recurlab {

/// Axis sizes (k_1, ..., k_r) of the rectangular array the values must
/// fill. Cells are addressed by a flat row-major index.
struct TensorFormat {
    std::vector<int> axes;

    int rank() const { return static_cast<int>(axes.size()); }
    int size() const;
    void validate() const;
    std::vector<int> unravel(int flat) const;
};

/// Error budget semantics for the approximate solvers. None of the
/// three approximate readings is canonical; all are offered.
struct Budget {
    enum class Kind { Exact, PerEquation, Rms, Fraction };
    Kind kind = Kind::Exact;
    double eps = 0.0;
    double fraction = 1.0; // only for Kind::Fraction

    static Budget exact() { return {Kind::Exact, kExactSetSumTol, 1.0}; }
    static Budget per_equation(double eps) {
        return {Kind::PerEquation, eps, 1.0};
    }
    static Budget rms(double eps) { return {Kind::Rms, eps, 1.0}; }
    static Budget fraction_of(double eps, double fraction) {
        return {Kind::Fraction, eps, fraction};
    }
};

struct SetSumInstance {
    std::vector<double> values; // any order; solutions index into it
    TensorFormat format;
    Budget budget = Budget::exact();
};

/// Axis values plus the bijection cell -> value index and per-equation
/// residuals |sum - value|. Gauge-normalized: every non-first axis has
/// minimum 0, offsets folded into the first axis.
struct SetSumSolution {
    std::vector<std::vector<double>> axis_values;
    std::vector<int> bijection;
    std::vector<double> residuals;
};

struct PhaseSetSumInstance {
    std::vector<double> phases; // radians in [0, 2pi)
    TensorFormat format;
    double tolerance = 1e-6; // per-equation angular distance
};

struct PhaseSolution {
    std::vector<std::vector<double>> axis_phases;
    std::vector<int> bijection;
    std::vector<double> residuals; // angular distances
};

/// All size() sums x^{(1)}_{i_1} + ... + x^{(r)}_{i_r}, descending.
std::vector<double> forward_sums(
    const std::vector<std::vector<double>> &axes_values,
    const TensorFormat &format);

/// Forward sums of a solution in its own bijection order (cell c maps
/// to slot bijection[c]); equals the instance values within residuals.
std::vector<double> forward_map(const SetSumSolution &solution,
                                const TensorFormat &format);

/// Complete branch-and-bound over fillings: descending values, the
/// maximum pinned to the all-max corner, children pruned by matching
/// every completed cell against the remaining multiset. nullopt is a
/// certified no-solution. Instances larger than `cap` values are
/// refused; use the greedy or approximate solvers there.
std::optional<SetSumSolution> solve_exact(const SetSumInstance &instance,
                                          int cap = 12);

/// Largest value to the extreme corner, axis values inferred from
/// first-row/first-column differences, no backtracking. Verified by the
/// forward map: may fail, never lies.
std::optional<SetSumSolution> solve_greedy(const SetSumInstance &instance);

/// Budgeted variant: a tolerance cascade runs the same search from
/// tight to loose and returns the first filling passing the budget.
/// An infinite per-equation budget always succeeds (descending fill,
/// least-squares axis values).
std::optional<SetSumSolution> solve_approx(const SetSumInstance &instance);

/// Circular analog on eigenphases; one phase per non-first axis is
/// anchored to 0 and offsets are searched over the candidate set the
/// remaining phases induce.
std::optional<PhaseSolution> solve_phase(const PhaseSetSumInstance &instance);

struct TensorDetectVerdict {
    bool is_tensor = false;
    std::optional<PhaseSolution> witness;
};

/// Decide whether the eigenphases of U admit a circular set-sum filling
/// of the format (the spectral criterion for U = V(U_1 x ... x U_r)V†).
TensorDetectVerdict detect_hidden_tensor_unitary(const UnitaryMatrix &u,
                                                 const TensorFormat &format,
                                                 double tol);

/// Shift every non-first axis so its minimum is 0, folding the offsets
/// into the first axis. Idempotent; forward sums are unchanged.
SetSumSolution gauge_normalize(SetSumSolution solution);

/// log of each singular value; values below 1e-300 are rejected as rank
/// deficient rather than mapped to -inf.
std::vector<double> log_values_from_singulars(const Eigen::VectorXd &singulars);

} // namespace recurlab
