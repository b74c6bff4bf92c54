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

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "recurlab/common.hpp"

namespace recurlab {

/// Dense complex matrix with finite entries, row-major semantics at the
/// serialization boundary. Thin value wrapper over Eigen.
class ComplexMatrix {
  public:
    explicit ComplexMatrix(Eigen::MatrixXcd m);

    Eigen::Index rows() const { return m_.rows(); }
    Eigen::Index cols() const { return m_.cols(); }
    const Eigen::MatrixXcd &mat() const { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const {
        return m_(i, j);
    }

  private:
    Eigen::MatrixXcd m_;
};

/// Square matrix with ||U†U - I||_max <= 1e-10 * dim, checked on
/// construction. For dim > 2048 the check uses seeded unitary probes
/// instead of the full product.
class UnitaryMatrix {
  public:
    explicit UnitaryMatrix(Eigen::MatrixXcd m);

    Eigen::Index dim() const { return m_.rows(); }
    const Eigen::MatrixXcd &mat() const { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const {
        return m_(i, j);
    }

    static UnitaryMatrix identity(Eigen::Index dim);

  private:
    Eigen::MatrixXcd m_;
};

/// Full spectral data of a unitary, sorted by eigenphase ascending.
/// Eigenvalues are unit modulus, eigenvectors orthonormal columns, and
/// V diag(lambda) V† reconstructs the input within 1e-9 * dim.
struct SpectralDecomposition {
    Eigen::VectorXcd eigenvalues;
    Eigen::VectorXd eigenphases; // principal arguments in (-pi, pi]
    Eigen::MatrixXcd eigenvectors;
};

/// M = left * Sigma * right†, singular values descending.
struct SingularDecomposition {
    UnitaryMatrix left;
    Eigen::VectorXd singulars;
    UnitaryMatrix right;
};

/// Haar-measure sample via QR of a Ginibre matrix with the R-diagonal
/// phase correction. Deterministic per seed.
UnitaryMatrix haar_unitary(Eigen::Index dim, uint64_t seed);

SpectralDecomposition eigendecompose_unitary(const UnitaryMatrix &u);

/// Reassemble V diag(lambda) V† (the reconstruction the invariants are
/// stated against).
Eigen::MatrixXcd reconstruct(const SpectralDecomposition &d);

SingularDecomposition svd(const ComplexMatrix &m);

/// Reconstruction residual ||left Sigma right† - M||_max helper.
double svd_residual(const SingularDecomposition &d, const ComplexMatrix &m);

/// Kronecker product in big-endian factor order: the first factor owns
/// the most significant index block.
ComplexMatrix kron(const std::vector<ComplexMatrix> &factors);
UnitaryMatrix kron_unitary(const std::vector<UnitaryMatrix> &factors);

/// Principal argument of z mapped into (-pi, pi].
double principal_phase(Complex z);

/// max |A_ij| over all entries.
double max_abs(const Eigen::MatrixXcd &a);

} // namespace recurlab
