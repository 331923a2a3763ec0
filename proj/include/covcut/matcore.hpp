// SPDX-License-Identifier: Apache-2.0
//
// covcut — downlink channel covariance reconstruction from Type I codebook
// feedback via cutting planes and analytic-center optimization.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Numerical backbone: complex Hermitian eigendecomposition, matrix square
// roots, null-space bases, Haar-random unitaries and rank estimation.
// Everything is a pure value-semantics function over small dense matrices.

#ifndef COVCUT_MATCORE_HPP
#define COVCUT_MATCORE_HPP

#include <algorithm>
#include <cstdint>

#include "covcut/rng.hpp"
#include "covcut/types.hpp"

namespace covcut {

/// Default relative threshold for deciding that an eigenvalue or singular
/// value is numerically zero.
inline constexpr double kRankRelTol = 1e-8;

/// Eigendecomposition of a Hermitian matrix: real eigenvalues sorted
/// descending, matching orthonormal eigenvector columns. Degenerate
/// eigenspaces admit arbitrary rotations, so consumers must only depend on
/// spectra, subspaces and products, never on individual eigenvector phases.
struct EigDecomposition {
  RealVector eigenvalues;      // sorted descending
  ComplexMatrix eigenvectors;  // column k pairs with eigenvalues[k]

  ComplexMatrix reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
  }
};

inline EigDecomposition hermitian_eig(const HermitianMatrix& a) {
  require(a.dim() > 0, errc::invalid_argument, "empty matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.dense());
  require(es.info() == Eigen::Success, errc::invalid_argument, "eigensolver failed");
  const Index n = a.dim();
  EigDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {  // Eigen sorts ascending
    out.eigenvalues[k] = es.eigenvalues()[n - 1 - k];
    out.eigenvectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

/// Principal square root of a PSD matrix. With `psd_required` (the default)
/// an eigenvalue below -1e-10 * lambda_max raises not_psd; small negative
/// eigenvalues within that tolerance are clamped to zero either way.
inline HermitianMatrix matrix_sqrt(const HermitianMatrix& a, bool psd_required = true) {
  EigDecomposition eig = hermitian_eig(a);
  const double top = std::max(eig.eigenvalues.maxCoeff(), 0.0);
  if (psd_required) {
    require(eig.eigenvalues.minCoeff() >= -1e-10 * std::max(top, 1e-300), errc::not_psd,
            "matrix_sqrt: negative eigenvalue " + std::to_string(eig.eigenvalues.minCoeff()));
  }
  RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  ComplexMatrix s = eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
  return HermitianMatrix(s, /*psd=*/true, /*sym_tol=*/1e-10);
}

/// Inverse square root; requires every eigenvalue to exceed
/// rank_rel_tol * lambda_max, otherwise raises singular_matrix.
inline HermitianMatrix matrix_inv_sqrt(const HermitianMatrix& a,
                                       double rank_rel_tol = kRankRelTol) {
  EigDecomposition eig = hermitian_eig(a);
  const double top = eig.eigenvalues.maxCoeff();
  require(top > 0.0, errc::singular_matrix, "matrix_inv_sqrt: zero matrix");
  require(eig.eigenvalues.minCoeff() > rank_rel_tol * top, errc::singular_matrix,
          "matrix_inv_sqrt: eigenvalue below rank threshold");
  RealVector inv_roots = eig.eigenvalues.cwiseSqrt().cwiseInverse();
  ComplexMatrix s = eig.eigenvectors * inv_roots.asDiagonal() * eig.eigenvectors.adjoint();
  return HermitianMatrix(s, /*psd=*/true, /*sym_tol=*/1e-9 * inv_roots.maxCoeff());
}

/// Orthonormal basis of the null space of A (tall, wide or square). `tol` is
/// relative to the largest singular value; the returned columns n satisfy
/// ||A n|| <= tol * sigma_max. Column count is cols(A) - numerical rank.
inline ComplexMatrix null_space_basis(const ComplexMatrix& a, double tol = kRankRelTol) {
  require(a.rows() > 0 && a.cols() > 0, errc::invalid_argument, "empty matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  Index rank = 0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > tol * top) ++rank;
  }
  if (top <= 0.0) rank = 0;  // zero matrix: whole domain is null space
  return svd.matrixV().rightCols(a.cols() - rank);
}

/// Haar-like random unitary: QR of a complex Gaussian matrix with the phases
/// fixed so that R has a positive real diagonal. Deterministic given seed.
inline ComplexMatrix random_unitary(Index dim, std::uint64_t seed) {
  require(dim >= 1, errc::invalid_argument, "random_unitary: dim >= 1");
  Rng rng(seed);
  ComplexMatrix g(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) g(i, j) = rng.cgaussian();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const std::complex<double> d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0) ? (d / mag) : 1.0;
  }
  return q;
}

/// Number of eigenvalues above rel_tol * lambda_max; the zero matrix has
/// rank 0.
inline int rank_estimate(const HermitianMatrix& a, double rel_tol = kRankRelTol) {
  EigDecomposition eig = hermitian_eig(a);
  const double top = eig.eigenvalues.maxCoeff();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (eig.eigenvalues[k] > rel_tol * top) ++rank;
  }
  return rank;
}

}  // namespace covcut

#endif  // COVCUT_MATCORE_HPP
