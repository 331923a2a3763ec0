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

#ifndef COVCUT_TYPES_HPP
#define COVCUT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace covcut {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Error categories raised by the library. Each maps to one failure mode so
/// callers (and tests) can dispatch on the condition, not on message text.
enum class errc {
  invalid_argument,
  dimension_mismatch,
  not_hermitian,
  not_psd,
  singular_matrix,
  config_error,
  parse_error,
  io_error,
  infeasible_target,
  infeasible_problem,
  infeasible_evaluation,
  undefined_metric,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::not_hermitian: return "not_hermitian";
    case errc::not_psd: return "not_psd";
    case errc::singular_matrix: return "singular_matrix";
    case errc::config_error: return "config_error";
    case errc::parse_error: return "parse_error";
    case errc::io_error: return "io_error";
    case errc::infeasible_target: return "infeasible_target";
    case errc::infeasible_problem: return "infeasible_problem";
    case errc::infeasible_evaluation: return "infeasible_evaluation";
    case errc::undefined_metric: return "undefined_metric";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

/// Square complex Hermitian matrix. Symmetry is validated on construction
/// (within `sym_tol`, absolute) and then enforced exactly, so downstream code
/// can rely on entries(i,j) == conj(entries(j,i)) bitwise.
///
/// The `psd` tag records that the matrix is positive semidefinite; when set at
/// construction the spectrum is checked (smallest eigenvalue >= -1e-10 times
/// the largest).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const ComplexMatrix& m, bool psd = false, double sym_tol = 1e-12)
      : psd_(psd) {
    require(m.rows() == m.cols(), errc::dimension_mismatch, "Hermitian matrix must be square");
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    require(m.size() == 0 || asym <= sym_tol, errc::not_hermitian,
            "symmetry violation " + std::to_string(asym));
    m_ = 0.5 * (m + m.adjoint().eval());
    if (psd_ && m_.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      require(lo >= -1e-10 * std::max(hi, 0.0), errc::not_psd,
              "smallest eigenvalue " + std::to_string(lo));
    }
  }

  static HermitianMatrix Identity(Index n) {
    return HermitianMatrix(ComplexMatrix::Identity(n, n), /*psd=*/true);
  }

  static HermitianMatrix Zero(Index n) {
    return HermitianMatrix(ComplexMatrix::Zero(n, n), /*psd=*/true);
  }

  Index dim() const { return m_.rows(); }
  bool psd() const { return psd_; }
  const ComplexMatrix& dense() const { return m_; }

  double trace() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.norm(); }

  /// Real-valued quadratic form w^H M w.
  double quad_form(const ComplexVector& w) const {
    require(w.size() == dim(), errc::dimension_mismatch, "quad_form dimension");
    return (w.adjoint() * m_ * w)(0, 0).real();
  }

 private:
  ComplexMatrix m_;
  bool psd_ = false;
};

}  // namespace covcut

#endif  // COVCUT_TYPES_HPP
