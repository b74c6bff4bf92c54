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

/// Discrete hyper-rectangle of sites, 0-based coordinates.
struct Grid {
    std::vector<int> dims;

    int rank() const { return static_cast<int>(dims.size()); }
    long long total_sites() const;
    void validate() const; // r >= 2, every dim >= 1
};

struct GridSubset {
    Grid grid;
    std::vector<std::vector<int>> sites;

    void validate() const; // in bounds, no duplicates
};

/// Closed rook path: the cyclic list of its turning points. Consecutive
/// points share exactly one coordinate, alternating row/column moves;
/// length is even and at least 4.
struct RookPath {
    std::vector<std::vector<int>> turning_points;
};

/// Signed measure on grid sites, weights nonzero.
struct SignedGridMeasure {
    Grid grid;
    std::vector<std::vector<int>> support;
    std::vector<double> weights;
};

/// 2D only. Each site is an edge in the rows/columns bipartite graph; a
/// rook circuit is exactly a cycle there, so detection is a forest
/// check and any found cycle converts back to a turning-point list.
std::optional<RookPath> find_rook_circuit(const GridSubset &subset);

/// True iff the subset has no rook circuit (bipartite graph is a
/// forest).
bool is_wrc(const GridSubset &subset);

/// Check a found path against its own invariants (used by tests and
/// the CLI to validate witnesses).
bool rook_path_valid(const RookPath &path, const GridSubset &subset);

struct WrcBoundReport {
    int p = 0;
    int q = 0;
    int max_wrc_size = 0;
    uint64_t subsets_checked = 0;
    GridSubset witness; // a WRC of maximal size
};

/// Exhaustive scan of every subset of the p x q grid (p*q <= 20):
/// confirms the maximal WRC size and returns one maximizer.
WrcBoundReport check_wrc_bound(int p, int q);

/// Push-forward of the measure to each coordinate axis.
std::vector<std::vector<double>> marginals(const SignedGridMeasure &measure);

/// True iff the measure is nonzero and every marginal vanishes within
/// 1e-12.
bool is_dsa_measure(const SignedGridMeasure &measure);

enum class RankMode { Auto, Float, ExactInt };

/// True iff the only measure supported on S with vanishing marginals is
/// zero, decided by the rank of the marginal-constraint map restricted
/// to S. Grids with at most 64 total sites are decided in exact integer
/// arithmetic under Auto; larger ones use floating-point rank with
/// pivot threshold 1e-9.
bool is_wdsa(const GridSubset &subset, RankMode mode = RankMode::Auto);

/// A nonzero vanishing-marginal measure on S when one exists. The
/// support is a kernel vector's support and may be non-minimal (no DSA
/// minimality certificate is attempted for r >= 3).
std::optional<SignedGridMeasure> wdsa_witness(const GridSubset &subset);

/// Axis labels whose coordinate sums reproduce `values` on the sites of
/// S within 1e-9; nullopt if the system is inconsistent. Always
/// solvable when S is a WDSA.
std::optional<std::vector<std::vector<double>>>
solve_labels_on_subset(const GridSubset &subset,
                       const std::vector<double> &values);

struct PartialTensorEmbedding {
    /// Per-axis singular values exp(label) of the diagonal factors O_i.
    std::vector<Eigen::VectorXd> factor_singulars;
    /// Lexicographically sorted sites; the i-th carries the i-th
    /// largest singular value of M.
    std::vector<std::vector<int>> site_order;
    /// Isometries (tensor-space dim x original dims) carrying the
    /// coimage/image of M onto the site basis vectors.
    Eigen::MatrixXcd iso_right;
    Eigen::MatrixXcd iso_left;
    /// || iso_left† (O_1 x ... x O_r) iso_right - M ||_max.
    double diagram_residual = 0.0;
};

/// Embed a rank-|S| map into a tensor-product operator whose singular
/// values at the sites of S are exactly those of M. Requires S to be a
/// WDSA and rank(M) (singular values above 1e-10) to equal |S|.
PartialTensorEmbedding partial_tensor_embed(const ComplexMatrix &m,
                                            const GridSubset &subset);

} // namespace recurlab
