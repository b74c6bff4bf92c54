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
#include "recurlab/tensorfactor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/QR>

namespace recurlab {

int TensorFormat::size() const {
    int k = 1;
    for (int a : axes) {
        k *= a;
    }
    return k;
}

void TensorFormat::validate() const {
    if (axes.empty()) {
        throw InvalidArgumentError("TensorFormat: no axes");
    }
    long long k = 1;
    for (int a : axes) {
        if (a < 1) {
            throw InvalidArgumentError("TensorFormat: axis sizes must be >= 1");
        }
        k *= a;
        if (k > (1 << 24)) {
            throw SizingError("TensorFormat: array too large");
        }
    }
}

std::vector<int> TensorFormat::unravel(int flat) const {
    std::vector<int> idx(axes.size());
    for (size_t a = axes.size(); a-- > 0;) {
        idx[a] = flat % axes[a];
        flat /= axes[a];
    }
    return idx;
}

std::vector<double> forward_sums(
    const std::vector<std::vector<double>> &axes_values,
    const TensorFormat &format) {
    format.validate();
    if (axes_values.size() != format.axes.size()) {
        throw LengthMismatchError("forward_sums: axis count mismatch");
    }
    for (size_t a = 0; a < axes_values.size(); ++a) {
        if (static_cast<int>(axes_values[a].size()) != format.axes[a]) {
            throw LengthMismatchError("forward_sums: axis length mismatch");
        }
    }
    const int k = format.size();
    std::vector<double> sums(static_cast<size_t>(k));
    for (int c = 0; c < k; ++c) {
        const std::vector<int> idx = format.unravel(c);
        double s = 0.0;
        for (size_t a = 0; a < axes_values.size(); ++a) {
            s += axes_values[a][static_cast<size_t>(idx[a])];
        }
        sums[static_cast<size_t>(c)] = s;
    }
    std::sort(sums.begin(), sums.end(), std::greater<>());
    return sums;
}

std::vector<double> forward_map(const SetSumSolution &solution,
                                const TensorFormat &format) {
    const int k = format.size();
    std::vector<double> out(static_cast<size_t>(k), 0.0);
    for (int c = 0; c < k; ++c) {
        const std::vector<int> idx = format.unravel(c);
        double s = 0.0;
        for (size_t a = 0; a < solution.axis_values.size(); ++a) {
            s += solution.axis_values[a][static_cast<size_t>(idx[a])];
        }
        out[static_cast<size_t>(solution.bijection[static_cast<size_t>(c)])] =
            s;
    }
    return out;
}

namespace {

// ---------------------------------------------------------------------
// Additive search. Non-first axes are pinned to start at 0 and the
// corner carries the global maximum, which kills the gauge and
// axis-permutation orbits. Within each axis values are descending, so
// the largest still-unexplained value always extends exactly one axis;
// branching is over which axis. Every extension completes a block of
// cells whose sums must match the remaining multiset, and that match is
// the pruning.

struct SortedValues {
    std::vector<double> value; // descending
    std::vector<int> original; // index into the instance order
    std::vector<char> used;

    explicit SortedValues(const std::vector<double> &raw) {
        std::vector<int> order(raw.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return raw[static_cast<size_t>(a)] > raw[static_cast<size_t>(b)];
        });
        value.reserve(raw.size());
        original.reserve(raw.size());
        for (int o : order) {
            value.push_back(raw[static_cast<size_t>(o)]);
            original.push_back(o);
        }
        used.assign(raw.size(), 0);
    }

    int first_unused() const {
        for (size_t i = 0; i < used.size(); ++i) {
            if (!used[i]) {
                return static_cast<int>(i);
            }
        }
        return -1;
    }

    /// Nearest unused slot within tol of target; -1 if none.
    int match(double target, double tol) const {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        if (std::isinf(tol)) {
            return match_nearest(target);
        }
        const auto begin = std::lower_bound(value.begin(), value.end(),
                                            target + tol, std::greater<>());
        for (auto it = begin; it != value.end() && *it >= target - tol; ++it) {
            const auto i = static_cast<size_t>(it - value.begin());
            if (used[i]) {
                continue;
            }
            const double dist = std::abs(*it - target);
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(i);
            }
        }
        return best;
    }

    int match_nearest(double target) const {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < value.size(); ++i) {
            if (used[i]) {
                continue;
            }
            const double dist = std::abs(value[i] - target);
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(i);
            }
        }
        return best;
    }
};

class AdditiveSearch {
  public:
    /// node_budget = 0 runs the complete search; a positive budget cuts
    /// the exploration short (heuristic mode, failure is a value).
    AdditiveSearch(const std::vector<double> &raw, const TensorFormat &format,
                   double tol, int skip_budget, uint64_t node_budget)
        : values_(raw), format_(format), tol_(tol),
          skip_budget_(skip_budget), node_budget_(node_budget) {
        const size_t r = format.axes.size();
        axes_.resize(r);
        filled_.assign(r, 0);
        for (size_t a = 0; a < r; ++a) {
            axes_[a].assign(static_cast<size_t>(format.axes[a]), 0.0);
        }
    }

    bool run() {
        const int corner = values_.first_unused();
        values_.used[static_cast<size_t>(corner)] = 1;
        axes_[0][0] = values_.value[static_cast<size_t>(corner)];
        for (size_t a = 0; a < axes_.size(); ++a) {
            filled_[a] = 1;
        }
        return dfs();
    }

    const std::vector<std::vector<double>> &axes() const { return axes_; }

  private:
    bool full() const {
        for (size_t a = 0; a < axes_.size(); ++a) {
            if (filled_[a] < format_.axes[a]) {
                return false;
            }
        }
        return true;
    }

    /// Step idx over the product of filled ranges, skipping skip_axis.
    bool advance(std::vector<int> &idx, size_t skip_axis) const {
        for (size_t b = idx.size(); b-- > 0;) {
            if (b == skip_axis) {
                continue;
            }
            if (++idx[b] < filled_[b]) {
                return true;
            }
            idx[b] = 0;
        }
        return false;
    }

    /// Give axis a its next value v; consume the sums of every newly
    /// completed cell from the remaining multiset. On failure the
    /// caller rolls back `consumed`.
    bool explain_extension(size_t a, double v, std::vector<int> *consumed,
                           int *skips_used) {
        const int new_index = filled_[a];
        const double base = (a == 0) ? 0.0 : axes_[0][0];
        axes_[a][static_cast<size_t>(new_index)] = v - base;

        std::vector<int> idx(axes_.size(), 0);
        idx[a] = new_index;
        do {
            double sum = 0.0;
            for (size_t b = 0; b < axes_.size(); ++b) {
                sum += axes_[b][static_cast<size_t>(idx[b])];
            }
            int slot = values_.match(sum, tol_);
            if (slot < 0 && skips_spent_ + *skips_used < skip_budget_) {
                slot = values_.match_nearest(sum);
                if (slot >= 0) {
                    ++(*skips_used);
                }
            }
            if (slot < 0) {
                return false;
            }
            values_.used[static_cast<size_t>(slot)] = 1;
            consumed->push_back(slot);
        } while (advance(idx, a));
        return true;
    }

    void rollback(const std::vector<int> &consumed) {
        for (int slot : consumed) {
            values_.used[static_cast<size_t>(slot)] = 0;
        }
    }

    bool dfs() {
        if (node_budget_ > 0 && ++nodes_ > node_budget_) {
            return false; // heuristic mode gives up instead of exploring
        }
        const int next = values_.first_unused();
        if (next < 0) {
            return full();
        }
        const double v = values_.value[static_cast<size_t>(next)];
        for (size_t a = 0; a < axes_.size(); ++a) {
            if (filled_[a] >= format_.axes[a] || is_untouched_twin(a)) {
                continue;
            }
            std::vector<int> consumed;
            int skips_used = 0;
            if (explain_extension(a, v, &consumed, &skips_used)) {
                filled_[a] += 1;
                skips_spent_ += skips_used;
                if (dfs()) {
                    return true;
                }
                skips_spent_ -= skips_used;
                filled_[a] -= 1;
            }
            rollback(consumed);
        }
        return false;
    }

    /// Axes of equal size that are both still untouched are
    /// interchangeable; extending the later one duplicates the search.
    bool is_untouched_twin(size_t a) const {
        if (filled_[a] != 1) {
            return false;
        }
        for (size_t b = 0; b < a; ++b) {
            if (format_.axes[b] == format_.axes[a] && filled_[b] == 1 &&
                format_.axes[a] > 1) {
                return true;
            }
        }
        return false;
    }

    SortedValues values_;
    TensorFormat format_;
    double tol_;
    int skip_budget_;
    int skips_spent_ = 0;
    uint64_t node_budget_;
    uint64_t nodes_ = 0;
    std::vector<std::vector<double>> axes_;
    std::vector<int> filled_;
};

/// Least-squares refit of the axis values for a fixed bijection; the
/// gauge null space is harmless, any LS representative works.
std::vector<std::vector<double>> polish_axes(
    const std::vector<double> &targets_by_cell, const TensorFormat &format) {
    const int k = format.size();
    int n_vars = 0;
    std::vector<int> var_offset(format.axes.size());
    for (size_t a = 0; a < format.axes.size(); ++a) {
        var_offset[a] = n_vars;
        n_vars += format.axes[a];
    }
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(k, n_vars);
    Eigen::VectorXd rhs(k);
    for (int c = 0; c < k; ++c) {
        const std::vector<int> idx = format.unravel(c);
        for (size_t a = 0; a < format.axes.size(); ++a) {
            design(c, var_offset[a] + idx[a]) = 1.0;
        }
        rhs[c] = targets_by_cell[static_cast<size_t>(c)];
    }
    const Eigen::VectorXd x = design.colPivHouseholderQr().solve(rhs);
    std::vector<std::vector<double>> axes(format.axes.size());
    for (size_t a = 0; a < format.axes.size(); ++a) {
        axes[a].resize(static_cast<size_t>(format.axes[a]));
        for (int i = 0; i < format.axes[a]; ++i) {
            axes[a][static_cast<size_t>(i)] = x[var_offset[a] + i];
        }
    }
    return axes;
}

struct Matched {
    std::vector<int> bijection;
    std::vector<double> residuals;
};

/// Rank-to-rank matching of descending cell sums against descending
/// values: optimal for both the bottleneck and the L2 residual, and
/// stable across ties, which canonicalizes bijections over equal
/// values.
Matched monotone_match(const std::vector<std::vector<double>> &axes,
                       const TensorFormat &format,
                       const std::vector<double> &raw_values) {
    const int k = format.size();
    std::vector<double> sums(static_cast<size_t>(k));
    for (int c = 0; c < k; ++c) {
        const std::vector<int> idx = format.unravel(c);
        double s = 0.0;
        for (size_t a = 0; a < axes.size(); ++a) {
            s += axes[a][static_cast<size_t>(idx[a])];
        }
        sums[static_cast<size_t>(c)] = s;
    }
    std::vector<int> cell_rank(static_cast<size_t>(k));
    std::iota(cell_rank.begin(), cell_rank.end(), 0);
    std::stable_sort(cell_rank.begin(), cell_rank.end(), [&](int a, int b) {
        return sums[static_cast<size_t>(a)] > sums[static_cast<size_t>(b)];
    });
    std::vector<int> value_rank(static_cast<size_t>(k));
    std::iota(value_rank.begin(), value_rank.end(), 0);
    std::stable_sort(value_rank.begin(), value_rank.end(), [&](int a, int b) {
        return raw_values[static_cast<size_t>(a)] >
               raw_values[static_cast<size_t>(b)];
    });

    Matched m;
    m.bijection.assign(static_cast<size_t>(k), 0);
    m.residuals.assign(static_cast<size_t>(k), 0.0);
    for (int r = 0; r < k; ++r) {
        const int cell = cell_rank[static_cast<size_t>(r)];
        const int value = value_rank[static_cast<size_t>(r)];
        m.bijection[static_cast<size_t>(cell)] = value;
        m.residuals[static_cast<size_t>(cell)] =
            std::abs(sums[static_cast<size_t>(cell)] -
                     raw_values[static_cast<size_t>(value)]);
    }
    return m;
}

bool budget_ok(const std::vector<double> &residuals, const Budget &budget) {
    const size_t k = residuals.size();
    switch (budget.kind) {
    case Budget::Kind::Exact: {
        return std::all_of(residuals.begin(), residuals.end(),
                           [](double r) { return r <= kExactSetSumTol; });
    }
    case Budget::Kind::PerEquation: {
        return std::all_of(residuals.begin(), residuals.end(),
                           [&](double r) { return r <= budget.eps; });
    }
    case Budget::Kind::Rms: {
        double ss = 0.0;
        for (double r : residuals) {
            ss += r * r;
        }
        return std::sqrt(ss / static_cast<double>(k)) <= budget.eps;
    }
    case Budget::Kind::Fraction: {
        size_t good = 0;
        for (double r : residuals) {
            if (r <= budget.eps) {
                ++good;
            }
        }
        return static_cast<double>(good) >=
               budget.fraction * static_cast<double>(k) - 1e-12;
    }
    }
    return false;
}

/// Turn the axis values a search produced into a verified solution:
/// polish, canonical matching, budget gate. Solvers may fail here but
/// can never return an unverified filling.
std::optional<SetSumSolution> finalize(
    const std::vector<std::vector<double>> &search_axes,
    const SetSumInstance &instance) {
    const int k = instance.format.size();

    const Matched raw_match =
        monotone_match(search_axes, instance.format, instance.values);
    std::vector<double> targets(static_cast<size_t>(k));
    for (int c = 0; c < k; ++c) {
        targets[static_cast<size_t>(c)] = instance.values[static_cast<size_t>(
            raw_match.bijection[static_cast<size_t>(c)])];
    }
    const std::vector<std::vector<double>> polished =
        polish_axes(targets, instance.format);
    const Matched polished_match =
        monotone_match(polished, instance.format, instance.values);

    if (budget_ok(polished_match.residuals, instance.budget)) {
        return gauge_normalize(SetSumSolution{
            polished, polished_match.bijection, polished_match.residuals});
    }
    if (budget_ok(raw_match.residuals, instance.budget)) {
        return gauge_normalize(SetSumSolution{
            search_axes, raw_match.bijection, raw_match.residuals});
    }
    return std::nullopt;
}

void check_instance(const SetSumInstance &instance) {
    instance.format.validate();
    if (static_cast<int>(instance.values.size()) != instance.format.size()) {
        throw LengthMismatchError(
            "set-sum instance: value count does not match the format");
    }
    for (double v : instance.values) {
        if (!std::isfinite(v)) {
            throw InvalidArgumentError("set-sum instance: non-finite value");
        }
    }
}

} // namespace

std::optional<SetSumSolution> solve_exact(const SetSumInstance &instance,
                                          int cap) {
    check_instance(instance);
    if (static_cast<int>(instance.values.size()) > cap) {
        throw CapExceededError(
            "solve_exact: " + std::to_string(instance.values.size()) +
            " values exceed the exhaustive cap of " + std::to_string(cap) +
            "; use the greedy or approximate solver");
    }
    AdditiveSearch search(instance.values, instance.format, kExactSetSumTol,
                          0, /*node_budget=*/0);
    if (!search.run()) {
        return std::nullopt; // certified: the pruned tree is complete
    }
    SetSumInstance exact = instance;
    exact.budget = Budget::exact();
    return finalize(search.axes(), exact);
}

std::optional<SetSumSolution> solve_greedy(const SetSumInstance &instance) {
    check_instance(instance);
    const double tol = instance.budget.kind == Budget::Kind::Exact
                           ? kExactSetSumTol
                           : instance.budget.eps;
    // Largest-to-corner descent with just enough budget to roll back an
    // ambiguous axis choice; gives up quickly instead of exploring.
    const uint64_t k = static_cast<uint64_t>(instance.format.size());
    AdditiveSearch search(instance.values, instance.format, tol, 0,
                          /*node_budget=*/64 + 16 * k * k);
    if (!search.run()) {
        return std::nullopt;
    }
    return finalize(search.axes(), instance);
}

std::optional<SetSumSolution> solve_approx(const SetSumInstance &instance) {
    check_instance(instance);
    if (instance.budget.kind == Budget::Kind::Exact) {
        return solve_exact(instance, instance.format.size());
    }
    if (instance.budget.eps <= 0.0) {
        throw InvalidArgumentError("solve_approx: budget eps must be > 0");
    }

    const int k = instance.format.size();
    double tol_cap = instance.budget.eps;
    if (instance.budget.kind == Budget::Kind::Rms) {
        tol_cap *= std::sqrt(static_cast<double>(k));
    }
    const int skips =
        instance.budget.kind == Budget::Kind::Fraction
            ? static_cast<int>(std::floor(
                  (1.0 - instance.budget.fraction) * static_cast<double>(k)))
            : 0;

    if (std::isinf(instance.budget.eps)) {
        AdditiveSearch search(instance.values, instance.format, tol_cap,
                              skips, /*node_budget=*/0);
        search.run(); // cannot fail at infinite tolerance
        return finalize(search.axes(), instance);
    }

    // Fixed tolerance ladder: a success at some budget stays a success
    // at every looser budget of the same instance.
    std::vector<double> ladder;
    for (double t = 1e-12; t < tol_cap; t *= 10.0) {
        ladder.push_back(t);
    }
    ladder.push_back(tol_cap);
    for (double tol : ladder) {
        AdditiveSearch search(instance.values, instance.format, tol, skips,
                              /*node_budget=*/200000);
        if (!search.run()) {
            continue;
        }
        auto solution = finalize(search.axes(), instance);
        if (solution) {
            return solution;
        }
    }
    return std::nullopt;
}

SetSumSolution gauge_normalize(SetSumSolution solution) {
    if (solution.axis_values.empty()) {
        return solution;
    }
    double folded = 0.0;
    for (size_t a = 1; a < solution.axis_values.size(); ++a) {
        auto &axis = solution.axis_values[a];
        const double lo = *std::min_element(axis.begin(), axis.end());
        for (double &x : axis) {
            x -= lo;
        }
        folded += lo;
    }
    for (double &x : solution.axis_values[0]) {
        x += folded;
    }
    return solution;
}

std::vector<double> log_values_from_singulars(
    const Eigen::VectorXd &singulars) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(singulars.size()));
    for (Eigen::Index i = 0; i < singulars.size(); ++i) {
        if (singulars[i] < 1e-300) {
            throw RankDeficiencyError(
                "log_values_from_singulars: singular value is numerically "
                "zero; the log-domain set-sum problem is undefined for "
                "rank-deficient spectra");
        }
        out.push_back(std::log(singulars[i]));
    }
    return out;
}

// ---------------------------------------------------------------------
// Circular variant. One phase per non-first axis anchors to 0, per-axis
// index permutations pin the first listed phase to the origin cell, and
// the remaining slots branch over the unused phases. Slots are visited
// in balanced axis order so product cells, the over-determined part,
// appear as early as possible.

namespace {

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a < 0.0) {
        a += 2.0 * M_PI;
    }
    return a;
}

double angular_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * M_PI));
}

class PhaseSearch {
  public:
    PhaseSearch(const std::vector<double> &phases, const TensorFormat &format,
                double tol)
        : format_(format), tol_(tol),
          cell_slot_(static_cast<size_t>(format.size()), -1) {
        std::vector<int> order(phases.size());
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> wrapped(phases.size());
        for (size_t i = 0; i < phases.size(); ++i) {
            wrapped[i] = wrap_angle(phases[i]);
        }
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return wrapped[static_cast<size_t>(a)] <
                   wrapped[static_cast<size_t>(b)];
        });
        for (int o : order) {
            value_.push_back(wrapped[static_cast<size_t>(o)]);
            original_.push_back(o);
        }
        used_.assign(phases.size(), 0);

        const size_t r = format.axes.size();
        axes_.resize(r);
        filled_.assign(r, 1);
        for (size_t a = 0; a < r; ++a) {
            axes_[a].assign(static_cast<size_t>(format.axes[a]), 0.0);
        }
        std::vector<int> fill(r, 1);
        for (;;) {
            size_t best = r;
            for (size_t a = 0; a < r; ++a) {
                if (fill[a] < format.axes[a] &&
                    (best == r || fill[a] < fill[best])) {
                    best = a;
                }
            }
            if (best == r) {
                break;
            }
            slots_.emplace_back(best, fill[best]);
            ++fill[best];
        }
    }

    bool run() {
        axes_[0][0] = value_.empty() ? 0.0 : value_[0];
        used_[0] = 1;
        cell_slot_[0] = 0;
        return dfs(0);
    }

    PhaseSolution solution(const std::vector<double> &raw_phases) const {
        PhaseSolution s;
        s.axis_phases = axes_;
        const int k = format_.size();
        s.bijection.assign(static_cast<size_t>(k), 0);
        s.residuals.assign(static_cast<size_t>(k), 0.0);
        for (int c = 0; c < k; ++c) {
            const int slot = cell_slot_[static_cast<size_t>(c)];
            const int orig = original_[static_cast<size_t>(slot)];
            s.bijection[static_cast<size_t>(c)] = orig;
            const std::vector<int> idx = format_.unravel(c);
            double sum = 0.0;
            for (size_t a = 0; a < axes_.size(); ++a) {
                sum += axes_[a][static_cast<size_t>(idx[a])];
            }
            s.residuals[static_cast<size_t>(c)] = angular_distance(
                wrap_angle(sum), raw_phases[static_cast<size_t>(orig)]);
        }
        return s;
    }

  private:
    int flat_index(const std::vector<int> &idx) const {
        int flat = 0;
        for (size_t a = 0; a < idx.size(); ++a) {
            flat = flat * format_.axes[a] + idx[a];
        }
        return flat;
    }

    int match(double target) const {
        int best = -1;
        double best_dist = tol_;
        for (size_t i = 0; i < value_.size(); ++i) {
            if (used_[i]) {
                continue;
            }
            const double dist = angular_distance(value_[i], target);
            if (dist <= best_dist) {
                best_dist = dist;
                best = static_cast<int>(i);
            }
        }
        return best;
    }

    bool advance(std::vector<int> &idx, size_t skip_axis) const {
        for (size_t b = idx.size(); b-- > 0;) {
            if (b == skip_axis) {
                continue;
            }
            if (++idx[b] < filled_[b]) {
                return true;
            }
            idx[b] = 0;
        }
        return false;
    }

    /// Consume the product cells completed by slot (a, i); the pure
    /// axis cell was consumed by the branch itself.
    bool explain(size_t a, int i, std::vector<int> *consumed) {
        std::vector<int> idx(axes_.size(), 0);
        idx[a] = i;
        do {
            bool axis_cell = true;
            for (size_t b = 0; b < idx.size(); ++b) {
                if (b != a && idx[b] != 0) {
                    axis_cell = false;
                    break;
                }
            }
            if (axis_cell) {
                continue;
            }
            double sum = 0.0;
            for (size_t b = 0; b < idx.size(); ++b) {
                sum += axes_[b][static_cast<size_t>(idx[b])];
            }
            const int slot = match(wrap_angle(sum));
            if (slot < 0) {
                return false;
            }
            used_[static_cast<size_t>(slot)] = 1;
            consumed->push_back(slot);
            cell_slot_[static_cast<size_t>(flat_index(idx))] = slot;
        } while (advance(idx, a));
        return true;
    }

    bool dfs(size_t slot_pos) {
        if (++nodes_ > kNodeBudget) {
            throw CapExceededError(
                "solve_phase: search budget exhausted; the instance is too "
                "adversarial for the exhaustive circular search");
        }
        if (slot_pos == slots_.size()) {
            return std::all_of(used_.begin(), used_.end(),
                               [](char u) { return u != 0; });
        }
        const auto [a, i] = slots_[slot_pos];
        const double base = (a == 0) ? 0.0 : axes_[0][0];
        std::vector<int> axis_idx(axes_.size(), 0);
        axis_idx[a] = i;
        const int axis_cell = flat_index(axis_idx);

        double last_tried = std::numeric_limits<double>::quiet_NaN();
        for (size_t vi = 0; vi < value_.size(); ++vi) {
            if (used_[vi]) {
                continue;
            }
            if (!std::isnan(last_tried) &&
                angular_distance(value_[vi], last_tried) < 1e-12) {
                continue; // equal phases branch identically
            }
            last_tried = value_[vi];

            axes_[a][static_cast<size_t>(i)] = wrap_angle(value_[vi] - base);
            used_[vi] = 1;
            cell_slot_[static_cast<size_t>(axis_cell)] = static_cast<int>(vi);
            filled_[a] = i + 1;

            std::vector<int> consumed;
            if (explain(a, i, &consumed) && dfs(slot_pos + 1)) {
                return true;
            }
            for (int s : consumed) {
                used_[static_cast<size_t>(s)] = 0;
            }
            filled_[a] = i;
            used_[vi] = 0;
        }
        return false;
    }

    static constexpr uint64_t kNodeBudget = 50'000'000;

    TensorFormat format_;
    double tol_;
    std::vector<int> cell_slot_; // flat cell -> sorted-value slot
    std::vector<double> value_;  // ascending wrapped phases
    std::vector<int> original_;
    std::vector<char> used_;
    std::vector<std::vector<double>> axes_;
    std::vector<int> filled_;
    std::vector<std::pair<size_t, int>> slots_;
    uint64_t nodes_ = 0;
};

} // namespace

std::optional<PhaseSolution> solve_phase(const PhaseSetSumInstance &instance) {
    instance.format.validate();
    if (static_cast<int>(instance.phases.size()) != instance.format.size()) {
        throw LengthMismatchError(
            "solve_phase: phase count does not match the format");
    }
    if (instance.tolerance <= 0.0) {
        throw InvalidArgumentError("solve_phase: tolerance must be > 0");
    }
    PhaseSearch search(instance.phases, instance.format, instance.tolerance);
    if (!search.run()) {
        return std::nullopt;
    }
    PhaseSolution s = search.solution(instance.phases);
    for (double r : s.residuals) {
        if (r > instance.tolerance + 1e-12) {
            return std::nullopt;
        }
    }
    return s;
}

TensorDetectVerdict detect_hidden_tensor_unitary(const UnitaryMatrix &u,
                                                 const TensorFormat &format,
                                                 double tol) {
    format.validate();
    if (u.dim() != format.size()) {
        throw DimensionMismatchError(
            "detect_hidden_tensor_unitary: dim(U) != product of axes");
    }
    if (u.dim() > (1 << 12)) {
        throw SizingError(
            "detect_hidden_tensor_unitary: exhaustive circular search stops "
            "at dim 4096");
    }
    const SpectralDecomposition d = eigendecompose_unitary(u);
    PhaseSetSumInstance instance;
    instance.phases.reserve(static_cast<size_t>(u.dim()));
    for (Eigen::Index i = 0; i < d.eigenphases.size(); ++i) {
        instance.phases.push_back(wrap_angle(d.eigenphases[i]));
    }
    instance.format = format;
    instance.tolerance = tol;
    auto witness = solve_phase(instance);
    return TensorDetectVerdict{witness.has_value(), std::move(witness)};
}

} // namespace recurlab
