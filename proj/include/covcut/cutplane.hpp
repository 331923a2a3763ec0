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
// eNB-side pilot weighting design. Each round builds a target effective
// covariance R whose top eigenvector is a chosen codeword, then solves
// Q^H C_hat Q = R in closed form:
//
//   full rank:      Q = C_hat^{-1/2} X Sigma W^H            (X random unitary,
//                   Sigma the N_A x N_P rectangular diagonal of sqrt(sigma_n),
//                   W the orthonormal completion of the chosen codeword)
//   rank K < N_A:   Q = S^+ U1 B + O, S = C_hat^{1/2}, B^H B = R,
//                   O in Null(U1^H)
//
// Under C_hat the designed Q makes the chosen codeword attain the maximum
// quadratic form, so the next feedback round either confirms the current
// center or cuts it out of the localization set.

#ifndef COVCUT_CUTPLANE_HPP
#define COVCUT_CUTPLANE_HPP

#include <cstdint>
#include <optional>

#include "covcut/codebook.hpp"
#include "covcut/matcore.hpp"
#include "covcut/rng.hpp"
#include "covcut/types.hpp"

namespace covcut {

struct CutDesignParams {
  int m_prime = 0;               // 0-based target codeword index
  RealVector sigmas;             // length N_P, non-increasing, sigma_1 > 0
  std::uint64_t complement_seed = 1;  // seeds the orthonormal completion {u_n}
  std::uint64_t unitary_seed = 1;     // seeds X

  /// Non-increasing, sigma_1 > 0, zeros only as a trailing block.
  void validate(int ports) const {
    require(sigmas.size() == ports, errc::config_error, "sigma schedule length != ports");
    require(sigmas[0] > 0.0, errc::config_error, "sigma_1 must be positive");
    for (Index n = 0; n + 1 < sigmas.size(); ++n) {
      require(sigmas[n] >= sigmas[n + 1], errc::config_error, "sigmas must be non-increasing");
    }
    require(sigmas.minCoeff() >= 0.0, errc::config_error, "sigmas must be nonnegative");
  }

  int positive_count() const {
    int k = 0;
    for (Index n = 0; n < sigmas.size(); ++n)
      if (sigmas[n] > 0.0) ++k;
    return k;
  }

  static CutDesignParams isotropic(int ports, int m_prime, std::uint64_t complement_seed,
                                   std::uint64_t unitary_seed) {
    CutDesignParams p;
    p.m_prime = m_prime;
    p.sigmas = RealVector::Ones(ports);
    p.complement_seed = complement_seed;
    p.unitary_seed = unitary_seed;
    return p;
  }

  /// Strict-cut schedule sigma_n = (1 - delta)^(n-1).
  static CutDesignParams geometric(int ports, int m_prime, double delta,
                                   std::uint64_t complement_seed, std::uint64_t unitary_seed) {
    require(delta > 0.0 && delta < 1.0, errc::config_error, "delta in (0,1)");
    CutDesignParams p;
    p.m_prime = m_prime;
    p.sigmas.resize(ports);
    double v = 1.0;
    for (int n = 0; n < ports; ++n, v *= 1.0 - delta) p.sigmas[n] = v;
    p.complement_seed = complement_seed;
    p.unitary_seed = unitary_seed;
    return p;
  }

  /// Copy with the trailing sigmas beyond `rank` zeroed (the rank-deficient
  /// feasibility rule: rank(R) must not exceed rank(C_hat)).
  CutDesignParams truncated_to_rank(int rank) const {
    CutDesignParams p = *this;
    for (Index n = rank; n < p.sigmas.size(); ++n) p.sigmas[n] = 0.0;
    return p;
  }
};

namespace detail {

/// Unitary [v, u_1, ..., u_{d-1}]: seeded random complements orthonormalized
/// against v with two-pass modified Gram-Schmidt.
inline ComplexMatrix orthonormal_completion(const ComplexVector& v, std::uint64_t seed) {
  const Index d = v.size();
  require(std::abs(v.norm() - 1.0) <= 1e-10, errc::invalid_argument,
          "completion anchor must be unit norm");
  ComplexMatrix w(d, d);
  w.col(0) = v;
  Rng rng(seed);
  Index built = 1;
  int attempts = 0;
  while (built < d) {
    ComplexVector g(d);
    for (Index i = 0; i < d; ++i) g[i] = rng.cgaussian();
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < built; ++j) g -= w.col(j).dot(g) * w.col(j);
    }
    const double norm = g.norm();
    if (norm > 1e-8) {
      w.col(built++) = g / norm;
      attempts = 0;
    } else {
      require(++attempts < 64, errc::invalid_argument, "orthonormal completion failed");
    }
  }
  return w;
}

}  // namespace detail

/// Target matrix R = sum_n sigma_n w_n w_n^H with w_1 the chosen codeword and
/// the rest a seeded orthonormal completion. Eigenvalues of R are exactly the
/// sigma schedule.
inline HermitianMatrix build_target_R(const CutDesignParams& params, const Codebook& book) {
  params.validate(book.ports());
  require(params.m_prime >= 0 && params.m_prime < book.size(), errc::config_error,
          "m_prime out of range");
  const ComplexMatrix w =
      detail::orthonormal_completion(book.codeword(params.m_prime), params.complement_seed);
  ComplexMatrix r = w * params.sigmas.asDiagonal() * w.adjoint();
  return HermitianMatrix(r, /*psd=*/true, /*sym_tol=*/1e-10 * std::max(1.0, r.norm()));
}

/// Proposition-1 design for full-rank C_hat. Throws singular_matrix when
/// C_hat is rank deficient at the default threshold; callers must then use
/// the rank-deficient path.
inline ComplexMatrix design_q_full_rank(const HermitianMatrix& c_hat,
                                        const CutDesignParams& params, const Codebook& book,
                                        double rank_rel_tol = kRankRelTol) {
  const Index na = c_hat.dim();
  const Index np = book.ports();
  require(np <= na, errc::dimension_mismatch, "ports must not exceed antennas");
  params.validate(book.ports());

  // singular_matrix if rank deficient at the threshold
  const HermitianMatrix inv_sqrt = matrix_inv_sqrt(c_hat, rank_rel_tol);
  const ComplexMatrix x = random_unitary(na, params.unitary_seed);
  const ComplexMatrix w =
      detail::orthonormal_completion(book.codeword(params.m_prime), params.complement_seed);

  ComplexMatrix x_sigma(na, np);  // X * Sigma with Sigma rectangular diagonal
  for (Index n = 0; n < np; ++n) x_sigma.col(n) = x.col(n) * std::sqrt(params.sigmas[n]);
  return inv_sqrt.dense() * x_sigma * w.adjoint();
}

/// Proposition-2 design for rank(C_hat) = K < N_A. The target rank must not
/// exceed K (infeasible_target otherwise). `null_seed` != 0 adds a random
/// component O from Null(U1^H), which leaves Q^H C_hat Q unchanged.
inline ComplexMatrix design_q_rank_deficient(const HermitianMatrix& c_hat, int rank,
                                             const CutDesignParams& params, const Codebook& book,
                                             std::uint64_t null_seed = 0) {
  const Index na = c_hat.dim();
  const Index np = book.ports();
  require(np <= na, errc::dimension_mismatch, "ports must not exceed antennas");
  require(rank >= 1 && rank < na, errc::invalid_argument, "rank must be in [1, N_A)");
  params.validate(book.ports());
  require(params.positive_count() <= rank, errc::infeasible_target,
          "target rank exceeds rank(C_hat): sigma schedule violates the rank rule");
  if (rank > np) {
    require(params.positive_count() == np, errc::infeasible_target,
            "N_P < K requires all sigmas positive");
  }

  const EigDecomposition eig = hermitian_eig(c_hat);
  require(eig.eigenvalues[rank - 1] > 0.0, errc::invalid_argument,
          "stated rank exceeds the positive spectrum");
  const ComplexMatrix u1 = eig.eigenvectors.leftCols(rank);

  // B with B^H B = R, K x N_P, from the target's eigenfactorization.
  const ComplexMatrix w =
      detail::orthonormal_completion(book.codeword(params.m_prime), params.complement_seed);
  ComplexMatrix b = ComplexMatrix::Zero(rank, np);
  for (int n = 0; n < params.positive_count(); ++n) {
    b.row(n) = std::sqrt(params.sigmas[n]) * w.col(n).adjoint();
  }

  // Q = S^+ (U1 B) = U1 diag(1/s_k) B with s_k the nonzero eigenvalues of
  // C_hat^{1/2}.
  RealVector inv_s = eig.eigenvalues.head(rank).cwiseSqrt().cwiseInverse();
  ComplexMatrix q = u1 * inv_s.asDiagonal() * b;

  if (null_seed != 0) {
    const ComplexMatrix u2 = eig.eigenvectors.rightCols(na - rank);
    Rng rng(null_seed);
    ComplexMatrix g(na - rank, np);
    for (Index i = 0; i < g.rows(); ++i)
      for (Index j = 0; j < g.cols(); ++j) g(i, j) = rng.cgaussian();
    q += u2 * g;
  }
  return q;
}

/// Post-design check of problem-(7) feasibility under C_hat.
struct CutReport {
  int predicted_pmi = 0;       // argmax of the quadratic form under C_hat
  bool target_attains_max = false;
  bool cut_is_proper = false;  // strict margin over every non-parallel codeword
  double min_margin = 0.0;     // smallest margin over non-parallel codewords
  int parallel_excluded = 0;   // codewords skipped as parallel to v_{m'}
};

inline CutReport validate_cut(const HermitianMatrix& c_hat, const ComplexMatrix& q_next,
                              const CutDesignParams& params, const Codebook& book) {
  require(q_next.rows() == c_hat.dim() && q_next.cols() == book.ports(),
          errc::dimension_mismatch, "validate_cut: Q dimensions");
  ComplexMatrix rc = q_next.adjoint() * c_hat.dense() * q_next;
  rc = 0.5 * (rc + rc.adjoint().eval());

  const ComplexVector& target = book.codeword(params.m_prime);
  CutReport report;
  double best = -std::numeric_limits<double>::infinity();
  const double target_form = (target.adjoint() * rc * target)(0, 0).real();
  double min_margin = std::numeric_limits<double>::infinity();
  for (int m = 0; m < book.size(); ++m) {
    const ComplexVector& v = book.codeword(m);
    const double form = (v.adjoint() * rc * v)(0, 0).real();
    if (form > best) {
      best = form;
      report.predicted_pmi = m;
    }
    if (m == params.m_prime) continue;
    if (std::abs(v.dot(target)) >= 1.0 - 1e-9) {
      ++report.parallel_excluded;
      continue;
    }
    min_margin = std::min(min_margin, target_form - form);
  }
  report.min_margin = std::isfinite(min_margin) ? min_margin : 0.0;
  report.target_attains_max = target_form >= best - 1e-12 * std::max(1.0, std::abs(best));
  report.cut_is_proper = std::isfinite(min_margin) && min_margin > 1e-12;
  return report;
}

}  // namespace covcut

#endif  // COVCUT_CUTPLANE_HPP
