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
#include "recurlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "recurlab/rng.hpp"

namespace recurlab {

double principal_phase(Complex z) {
    double a = std::arg(z);
    if (a <= -M_PI) {
        a += 2.0 * M_PI;
    }
    return a;
}

double max_abs(const Eigen::MatrixXcd &a) {
    return a.cwiseAbs().maxCoeff();
}

ComplexMatrix::ComplexMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.cols() < 1) {
        throw InvalidDimensionError("ComplexMatrix: empty matrix");
    }
    if (!m_.allFinite()) {
        throw InvalidArgumentError("ComplexMatrix: non-finite entries");
    }
}

namespace {

// Full O(dim^3) check below this size; seeded probe vectors beyond.
constexpr Eigen::Index kFullUnitarityCheckDim = 2048;

double unitarity_defect(const Eigen::MatrixXcd &m) {
    const Eigen::Index d = m.rows();
    if (d <= kFullUnitarityCheckDim) {
        Eigen::MatrixXcd g = m.adjoint() * m;
        g.diagonal().array() -= 1.0;
        return max_abs(g);
    }
    Rng rng(0x7261756e69746172ULL);
    double worst = 0.0;
    for (int probe = 0; probe < 8; ++probe) {
        Eigen::VectorXcd v(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            v[i] = rng.complex_normal();
        }
        v.normalize();
        const Eigen::VectorXcd r = m.adjoint() * (m * v) - v;
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw InvalidDimensionError("UnitaryMatrix: must be square, dim >= 1");
    }
    if (!m_.allFinite()) {
        throw InvalidOperatorError("UnitaryMatrix: non-finite entries");
    }
    const double defect = unitarity_defect(m_);
    const double tol = kUnitaryTolPerDim * static_cast<double>(m_.rows());
    if (defect > tol) {
        throw InvalidOperatorError("UnitaryMatrix: ||U†U - I||_max = " +
                                   std::to_string(defect) + " exceeds " +
                                   std::to_string(tol));
    }
}

UnitaryMatrix UnitaryMatrix::identity(Eigen::Index dim) {
    if (dim < 1) {
        throw InvalidDimensionError("identity: dim must be >= 1");
    }
    return UnitaryMatrix(Eigen::MatrixXcd::Identity(dim, dim));
}

UnitaryMatrix haar_unitary(Eigen::Index dim, uint64_t seed) {
    if (dim < 1) {
        throw InvalidDimensionError("haar_unitary: dim must be >= 1");
    }
    Rng rng(seed);
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            g(i, j) = rng.complex_normal();
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity of QR so the law is exactly Haar.
    for (Eigen::Index j = 0; j < dim; ++j) {
        const Complex rjj = r(j, j);
        const double a = std::abs(rjj);
        q.col(j) *= (a > 0.0) ? rjj / a : Complex(1.0, 0.0);
    }
    return UnitaryMatrix(std::move(q));
}

SpectralDecomposition eigendecompose_unitary(const UnitaryMatrix &u) {
    const Eigen::Index d = u.dim();
    // A unitary is normal, so the Schur form is diagonal up to roundoff
    // and the Schur basis is an orthonormal eigenbasis.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.mat(), true);
    if (schur.info() != Eigen::Success) {
        throw InvalidOperatorError("eigendecompose_unitary: Schur failed");
    }
    Eigen::VectorXcd lambda = schur.matrixT().diagonal();
    Eigen::MatrixXcd vecs = schur.matrixU();

    std::vector<Eigen::Index> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phase(static_cast<size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        const double a = std::abs(lambda[i]);
        if (std::abs(a - 1.0) > kUnitaryTolPerDim * static_cast<double>(d)) {
            throw InvalidOperatorError(
                "eigendecompose_unitary: eigenvalue off the unit circle");
        }
        lambda[i] /= a;
        phase[static_cast<size_t>(i)] = principal_phase(lambda[i]);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                         return phase[static_cast<size_t>(a)] <
                                phase[static_cast<size_t>(b)];
                     });

    SpectralDecomposition out;
    out.eigenvalues.resize(d);
    out.eigenphases.resize(d);
    out.eigenvectors.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index src = order[static_cast<size_t>(i)];
        out.eigenvalues[i] = lambda[src];
        out.eigenphases[i] = phase[static_cast<size_t>(src)];
        out.eigenvectors.col(i) = vecs.col(src);
    }

    const double residual = max_abs(reconstruct(out) - u.mat());
    if (residual > kReconstructTolPerDim * static_cast<double>(d)) {
        throw InvalidOperatorError(
            "eigendecompose_unitary: reconstruction residual " +
            std::to_string(residual));
    }
    return out;
}

Eigen::MatrixXcd reconstruct(const SpectralDecomposition &d) {
    return d.eigenvectors * d.eigenvalues.asDiagonal() *
           d.eigenvectors.adjoint();
}

SingularDecomposition svd(const ComplexMatrix &m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> solver(
        m.mat(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    return SingularDecomposition{UnitaryMatrix(solver.matrixU()),
                                 solver.singularValues(),
                                 UnitaryMatrix(solver.matrixV())};
}

double svd_residual(const SingularDecomposition &d, const ComplexMatrix &m) {
    Eigen::MatrixXcd sigma =
        Eigen::MatrixXcd::Zero(d.left.dim(), d.right.dim());
    for (Eigen::Index i = 0; i < d.singulars.size(); ++i) {
        sigma(i, i) = d.singulars[i];
    }
    return max_abs(d.left.mat() * sigma * d.right.mat().adjoint() - m.mat());
}

ComplexMatrix kron(const std::vector<ComplexMatrix> &factors) {
    if (factors.empty()) {
        throw InvalidArgumentError("kron: need at least one factor");
    }
    Eigen::MatrixXcd acc = factors.front().mat();
    for (size_t f = 1; f < factors.size(); ++f) {
        const Eigen::MatrixXcd &b = factors[f].mat();
        Eigen::MatrixXcd next(acc.rows() * b.rows(), acc.cols() * b.cols());
        for (Eigen::Index i = 0; i < acc.rows(); ++i) {
            for (Eigen::Index j = 0; j < acc.cols(); ++j) {
                next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                    acc(i, j) * b;
            }
        }
        acc = std::move(next);
    }
    return ComplexMatrix(std::move(acc));
}

UnitaryMatrix kron_unitary(const std::vector<UnitaryMatrix> &factors) {
    if (factors.empty()) {
        throw InvalidArgumentError("kron_unitary: need at least one factor");
    }
    std::vector<ComplexMatrix> general;
    general.reserve(factors.size());
    for (const auto &u : factors) {
        general.emplace_back(u.mat());
    }
    return UnitaryMatrix(kron(general).mat());
}

} // namespace recurlab
