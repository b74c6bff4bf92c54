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
#include "recurlab/sternfeld.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/LU>
#include <Eigen/QR>

namespace recurlab {

long long Grid::total_sites() const {
    long long t = 1;
    for (int d : dims) {
        t *= d;
    }
    return t;
}

void Grid::validate() const {
    if (dims.size() < 2) {
        throw InvalidDimensionError("Grid: need at least two axes");
    }
    for (int d : dims) {
        if (d < 1) {
            throw InvalidDimensionError("Grid: axis sizes must be >= 1");
        }
    }
    if (total_sites() > (1LL << 26)) {
        throw SizingError("Grid: too many sites");
    }
}

void GridSubset::validate() const {
    grid.validate();
    std::set<std::vector<int>> seen;
    for (const auto &site : sites) {
        if (static_cast<int>(site.size()) != grid.rank()) {
            throw DimensionMismatchError("GridSubset: site rank mismatch");
        }
        for (size_t a = 0; a < site.size(); ++a) {
            if (site[a] < 0 || site[a] >= grid.dims[a]) {
                throw IndexOutOfRangeError("GridSubset: site out of bounds");
            }
        }
        if (!seen.insert(site).second) {
            throw InvalidArgumentError("GridSubset: duplicate site");
        }
    }
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        for (int i = 0; i < n; ++i) {
            parent[static_cast<size_t>(i)] = i;
        }
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    /// False if already connected (a cycle-closing edge).
    bool unite(int a, int b) {
        const int ra = find(a);
        const int rb = find(b);
        if (ra == rb) {
            return false;
        }
        parent[static_cast<size_t>(ra)] = rb;
        return true;
    }
};

void require_2d(const GridSubset &subset, const char *op) {
    if (subset.grid.rank() != 2) {
        throw InvalidDimensionError(std::string(op) +
                                    ": rook circuits are 2D; use is_wdsa for "
                                    "higher-rank grids");
    }
}

} // namespace

std::optional<RookPath> find_rook_circuit(const GridSubset &subset) {
    subset.validate();
    require_2d(subset, "find_rook_circuit");
    const int p = subset.grid.dims[0];
    const int q = subset.grid.dims[1];

    // Row vertices 0..p-1, column vertices p..p+q-1, sites as edges.
    UnionFind uf(p + q);
    int closing = -1;
    for (size_t e = 0; e < subset.sites.size(); ++e) {
        const int r = subset.sites[e][0];
        const int c = p + subset.sites[e][1];
        if (!uf.unite(r, c)) {
            closing = static_cast<int>(e);
            break;
        }
    }
    if (closing < 0) {
        return std::nullopt;
    }

    // Path between the closing edge's endpoints through earlier edges,
    // found by BFS; appending the closing edge yields the cycle.
    const int start = subset.sites[static_cast<size_t>(closing)][0];
    const int goal = p + subset.sites[static_cast<size_t>(closing)][1];
    std::vector<std::vector<std::pair<int, int>>> adj(
        static_cast<size_t>(p + q)); // (neighbor, edge index)
    for (int e = 0; e < closing; ++e) {
        const int r = subset.sites[static_cast<size_t>(e)][0];
        const int c = p + subset.sites[static_cast<size_t>(e)][1];
        adj[static_cast<size_t>(r)].emplace_back(c, e);
        adj[static_cast<size_t>(c)].emplace_back(r, e);
    }
    std::vector<int> from_edge(static_cast<size_t>(p + q), -1);
    std::vector<int> from_vertex(static_cast<size_t>(p + q), -1);
    std::vector<char> visited(static_cast<size_t>(p + q), 0);
    std::vector<int> queue{start};
    visited[static_cast<size_t>(start)] = 1;
    for (size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        if (v == goal) {
            break;
        }
        for (const auto &[w, e] : adj[static_cast<size_t>(v)]) {
            if (!visited[static_cast<size_t>(w)]) {
                visited[static_cast<size_t>(w)] = 1;
                from_edge[static_cast<size_t>(w)] = e;
                from_vertex[static_cast<size_t>(w)] = v;
                queue.push_back(w);
            }
        }
    }

    std::vector<int> cycle_edges;
    for (int v = goal; v != start; v = from_vertex[static_cast<size_t>(v)]) {
        cycle_edges.push_back(from_edge[static_cast<size_t>(v)]);
    }
    std::reverse(cycle_edges.begin(), cycle_edges.end());
    cycle_edges.push_back(closing);

    RookPath path;
    path.turning_points.reserve(cycle_edges.size());
    for (int e : cycle_edges) {
        path.turning_points.push_back(subset.sites[static_cast<size_t>(e)]);
    }
    return path;
}

bool is_wrc(const GridSubset &subset) {
    subset.validate();
    require_2d(subset, "is_wrc");
    const int p = subset.grid.dims[0];
    UnionFind uf(p + subset.grid.dims[1]);
    for (const auto &site : subset.sites) {
        if (!uf.unite(site[0], p + site[1])) {
            return false;
        }
    }
    return true;
}

bool rook_path_valid(const RookPath &path, const GridSubset &subset) {
    const size_t n = path.turning_points.size();
    if (n < 4 || n % 2 != 0) {
        return false;
    }
    const std::set<std::vector<int>> allowed(subset.sites.begin(),
                                             subset.sites.end());
    int prev_shared = -1;
    for (size_t i = 0; i < n; ++i) {
        const auto &a = path.turning_points[i];
        const auto &b = path.turning_points[(i + 1) % n];
        if (!allowed.count(a)) {
            return false;
        }
        int shared;
        if (a[0] == b[0] && a[1] != b[1]) {
            shared = 0;
        } else if (a[1] == b[1] && a[0] != b[0]) {
            shared = 1;
        } else {
            return false;
        }
        if (prev_shared == shared) {
            return false; // straight-through, not a turn
        }
        prev_shared = shared;
    }
    return true;
}

WrcBoundReport check_wrc_bound(int p, int q) {
    if (p < 1 || q < 1) {
        throw InvalidDimensionError("check_wrc_bound: need p, q >= 1");
    }
    if (p * q > 20) {
        throw SizingError(
            "check_wrc_bound: exhaustive scan is limited to p*q <= 20");
    }
    const int cells = p * q;
    const uint64_t total = uint64_t{1} << cells;
    WrcBoundReport report;
    report.p = p;
    report.q = q;
    report.subsets_checked = total;
    report.witness.grid = Grid{{p, q}};

    for (uint64_t mask = 0; mask < total; ++mask) {
        UnionFind uf(p + q);
        bool wrc = true;
        int size = 0;
        for (int cell = 0; cell < cells && wrc; ++cell) {
            if (mask & (uint64_t{1} << cell)) {
                ++size;
                wrc = uf.unite(cell / q, p + cell % q);
            }
        }
        if (wrc && size > report.max_wrc_size) {
            report.max_wrc_size = size;
            report.witness.sites.clear();
            for (int cell = 0; cell < cells; ++cell) {
                if (mask & (uint64_t{1} << cell)) {
                    report.witness.sites.push_back({cell / q, cell % q});
                }
            }
        }
    }
    return report;
}

std::vector<std::vector<double>> marginals(const SignedGridMeasure &measure) {
    measure.grid.validate();
    if (measure.support.size() != measure.weights.size()) {
        throw LengthMismatchError(
            "marginals: support and weights differ in length");
    }
    std::vector<std::vector<double>> out(
        static_cast<size_t>(measure.grid.rank()));
    for (int a = 0; a < measure.grid.rank(); ++a) {
        out[static_cast<size_t>(a)].assign(
            static_cast<size_t>(measure.grid.dims[static_cast<size_t>(a)]),
            0.0);
    }
    for (size_t s = 0; s < measure.support.size(); ++s) {
        const auto &site = measure.support[s];
        if (static_cast<int>(site.size()) != measure.grid.rank()) {
            throw DimensionMismatchError("marginals: site rank mismatch");
        }
        for (size_t a = 0; a < site.size(); ++a) {
            out[a][static_cast<size_t>(site[a])] += measure.weights[s];
        }
    }
    return out;
}

bool is_dsa_measure(const SignedGridMeasure &measure) {
    if (measure.support.empty()) {
        return false;
    }
    for (const auto &axis : marginals(measure)) {
        for (double m : axis) {
            if (std::abs(m) > 1e-12) {
                return false;
            }
        }
    }
    return true;
}

namespace {

/// Constraint matrix: one row per (axis, coordinate) marginal bin, one
/// column per site.
Eigen::MatrixXd marginal_constraints(const GridSubset &subset) {
    int n_rows = 0;
    std::vector<int> row_offset(static_cast<size_t>(subset.grid.rank()));
    for (int a = 0; a < subset.grid.rank(); ++a) {
        row_offset[static_cast<size_t>(a)] = n_rows;
        n_rows += subset.grid.dims[static_cast<size_t>(a)];
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(
        n_rows, static_cast<Eigen::Index>(subset.sites.size()));
    for (size_t s = 0; s < subset.sites.size(); ++s) {
        for (size_t a = 0; a < subset.sites[s].size(); ++a) {
            m(row_offset[a] + subset.sites[s][a],
              static_cast<Eigen::Index>(s)) = 1.0;
        }
    }
    return m;
}

/// Fraction-free Bareiss elimination; exact for 0/1 input at these
/// sizes (__int128 holds every intermediate minor).
int exact_rank(const Eigen::MatrixXd &m) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    std::vector<std::vector<__int128>> a(
        static_cast<size_t>(rows), std::vector<__int128>(static_cast<size_t>(cols)));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                static_cast<__int128>(std::llround(m(i, j)));
        }
    }
    int rank = 0;
    __int128 prev = 1;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int i = rank; i < rows; ++i) {
            if (a[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) {
                pivot = i;
                break;
            }
        }
        if (pivot < 0) {
            continue;
        }
        std::swap(a[static_cast<size_t>(pivot)], a[static_cast<size_t>(rank)]);
        for (int i = rank + 1; i < rows; ++i) {
            for (int j = col + 1; j < cols; ++j) {
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    (a[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                         a[static_cast<size_t>(rank)][static_cast<size_t>(col)] -
                     a[static_cast<size_t>(i)][static_cast<size_t>(col)] *
                         a[static_cast<size_t>(rank)][static_cast<size_t>(j)]) /
                    prev;
            }
            a[static_cast<size_t>(i)][static_cast<size_t>(col)] = 0;
        }
        prev = a[static_cast<size_t>(rank)][static_cast<size_t>(col)];
        ++rank;
    }
    return rank;
}

int float_rank(const Eigen::MatrixXd &m) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

} // namespace

bool is_wdsa(const GridSubset &subset, RankMode mode) {
    subset.validate();
    if (subset.sites.empty()) {
        return true;
    }
    const Eigen::MatrixXd constraints = marginal_constraints(subset);
    const bool exact_ok = subset.grid.total_sites() <= 64;
    int rank;
    switch (mode) {
    case RankMode::ExactInt:
        if (!exact_ok) {
            throw SizingError(
                "is_wdsa: exact integer mode is limited to 64 grid sites");
        }
        rank = exact_rank(constraints);
        break;
    case RankMode::Float:
        rank = float_rank(constraints);
        break;
    case RankMode::Auto:
    default:
        rank = exact_ok ? exact_rank(constraints) : float_rank(constraints);
        break;
    }
    return rank == static_cast<int>(subset.sites.size());
}

std::optional<SignedGridMeasure> wdsa_witness(const GridSubset &subset) {
    subset.validate();
    if (subset.sites.empty() || is_wdsa(subset)) {
        return std::nullopt;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(marginal_constraints(subset));
    lu.setThreshold(1e-9);
    const Eigen::MatrixXd kernel = lu.kernel();
    Eigen::VectorXd w = kernel.col(0);
    w /= w.cwiseAbs().maxCoeff();

    // Prefer small integer weights when a modest rescaling gives them.
    for (int scale = 1; scale <= 12; ++scale) {
        const Eigen::VectorXd scaled = w * static_cast<double>(scale);
        bool integral = true;
        for (Eigen::Index i = 0; i < scaled.size() && integral; ++i) {
            integral = std::abs(scaled[i] - std::round(scaled[i])) < 1e-6;
        }
        if (integral) {
            w = scaled.array().round();
            break;
        }
    }

    SignedGridMeasure measure;
    measure.grid = subset.grid;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (std::abs(w[i]) > 1e-9) {
            measure.support.push_back(subset.sites[static_cast<size_t>(i)]);
            measure.weights.push_back(w[i]);
        }
    }
    return measure;
}

namespace {

/// |S| x (sum of dims) design matrix of the label system.
Eigen::MatrixXd label_design(const GridSubset &subset) {
    int n_vars = 0;
    std::vector<int> var_offset(static_cast<size_t>(subset.grid.rank()));
    for (int a = 0; a < subset.grid.rank(); ++a) {
        var_offset[static_cast<size_t>(a)] = n_vars;
        n_vars += subset.grid.dims[static_cast<size_t>(a)];
    }
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(subset.sites.size()), n_vars);
    for (size_t s = 0; s < subset.sites.size(); ++s) {
        for (size_t a = 0; a < subset.sites[s].size(); ++a) {
            design(static_cast<Eigen::Index>(s),
                   var_offset[a] + subset.sites[s][a]) = 1.0;
        }
    }
    return design;
}

} // namespace

std::optional<std::vector<std::vector<double>>>
solve_labels_on_subset(const GridSubset &subset,
                       const std::vector<double> &values) {
    subset.validate();
    if (values.size() != subset.sites.size()) {
        throw LengthMismatchError(
            "solve_labels_on_subset: one value per site required");
    }
    if (subset.sites.empty()) {
        return std::vector<std::vector<double>>(
            static_cast<size_t>(subset.grid.rank()));
    }
    const Eigen::MatrixXd design = label_design(subset);
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Eigen::Index>(values.size()));
    const Eigen::VectorXd x = design.colPivHouseholderQr().solve(rhs);
    const double residual = (design * x - rhs).cwiseAbs().maxCoeff();
    if (residual > 1e-9) {
        return std::nullopt;
    }
    std::vector<std::vector<double>> labels(
        static_cast<size_t>(subset.grid.rank()));
    int offset = 0;
    for (int a = 0; a < subset.grid.rank(); ++a) {
        const int d = subset.grid.dims[static_cast<size_t>(a)];
        labels[static_cast<size_t>(a)].assign(x.data() + offset,
                                              x.data() + offset + d);
        offset += d;
    }
    return labels;
}

PartialTensorEmbedding partial_tensor_embed(const ComplexMatrix &m,
                                            const GridSubset &subset) {
    subset.validate();
    const SingularDecomposition decomp = svd(m);
    int rank = 0;
    for (Eigen::Index i = 0; i < decomp.singulars.size(); ++i) {
        if (decomp.singulars[i] > 1e-10) {
            ++rank;
        }
    }
    if (rank != static_cast<int>(subset.sites.size())) {
        throw RankMismatchError(
            "partial_tensor_embed: rank(M) = " + std::to_string(rank) +
            " but |S| = " + std::to_string(subset.sites.size()));
    }
    if (!is_wdsa(subset)) {
        throw NotWdsaError(
            "partial_tensor_embed: S supports a vanishing-marginal measure; "
            "the label system is over-determined");
    }

    // Descending singular values onto lexicographically sorted sites.
    GridSubset ordered = subset;
    std::sort(ordered.sites.begin(), ordered.sites.end());
    std::vector<double> logs(static_cast<size_t>(rank));
    for (int i = 0; i < rank; ++i) {
        logs[static_cast<size_t>(i)] = std::log(decomp.singulars[i]);
    }
    const auto labels = solve_labels_on_subset(ordered, logs);
    if (!labels) {
        throw NotWdsaError(
            "partial_tensor_embed: label system unexpectedly inconsistent");
    }

    PartialTensorEmbedding out;
    out.site_order = ordered.sites;
    out.factor_singulars.reserve(labels->size());
    for (const auto &axis : *labels) {
        Eigen::VectorXd s(static_cast<Eigen::Index>(axis.size()));
        for (size_t i = 0; i < axis.size(); ++i) {
            s[static_cast<Eigen::Index>(i)] = std::exp(axis[i]);
        }
        out.factor_singulars.push_back(std::move(s));
    }

    // Site basis embeddings composed with the SVD bases.
    const Eigen::Index big = static_cast<Eigen::Index>(
        subset.grid.total_sites());
    Eigen::MatrixXcd er = Eigen::MatrixXcd::Zero(big, rank);
    Eigen::MatrixXcd el = Eigen::MatrixXcd::Zero(big, rank);
    std::vector<long long> strides(static_cast<size_t>(subset.grid.rank()), 1);
    for (int a = subset.grid.rank() - 2; a >= 0; --a) {
        strides[static_cast<size_t>(a)] =
            strides[static_cast<size_t>(a + 1)] *
            subset.grid.dims[static_cast<size_t>(a + 1)];
    }
    for (int i = 0; i < rank; ++i) {
        long long flat = 0;
        for (size_t a = 0; a < ordered.sites[static_cast<size_t>(i)].size();
             ++a) {
            flat += strides[a] * ordered.sites[static_cast<size_t>(i)][a];
        }
        er(static_cast<Eigen::Index>(flat), i) = 1.0;
        el(static_cast<Eigen::Index>(flat), i) = 1.0;
    }
    out.iso_right = er * decomp.right.mat().leftCols(rank).adjoint();
    out.iso_left = el * decomp.left.mat().leftCols(rank).adjoint();

    // Diagonal of O = O_1 x ... x O_r over all cells.
    Eigen::VectorXd big_diag = Eigen::VectorXd::Ones(big);
    for (Eigen::Index cell = 0; cell < big; ++cell) {
        long long rest = cell;
        double v = 1.0;
        for (size_t a = 0; a < strides.size(); ++a) {
            const long long idx = rest / strides[a];
            rest %= strides[a];
            v *= out.factor_singulars[a][static_cast<Eigen::Index>(idx)];
        }
        big_diag[cell] = v;
    }
    const Eigen::MatrixXcd resid = out.iso_left.adjoint() *
                                       big_diag.asDiagonal().toDenseMatrix()
                                           .cast<Complex>() *
                                       out.iso_right -
                                   m.mat();
    out.diagram_residual = max_abs(resid);
    return out;
}

} // namespace recurlab
