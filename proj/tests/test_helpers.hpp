// SPDX-License-Identifier: Apache-2.0
//
// Shared generators for the test suites. Everything is seeded through
// covcut::Rng so failures reproduce exactly.

#ifndef COVCUT_TEST_HELPERS_HPP
#define COVCUT_TEST_HELPERS_HPP

#include "covcut/center.hpp"
#include "covcut/feedback.hpp"
#include "covcut/matcore.hpp"
#include "covcut/rng.hpp"
#include "covcut/types.hpp"

namespace covcut_test {

inline covcut::ComplexMatrix random_complex_matrix(covcut::Rng& rng, covcut::Index rows,
                                                   covcut::Index cols) {
  covcut::ComplexMatrix m(rows, cols);
  for (covcut::Index i = 0; i < rows; ++i)
    for (covcut::Index j = 0; j < cols; ++j) m(i, j) = rng.cgaussian();
  return m;
}

inline covcut::ComplexVector random_unit_vector(covcut::Rng& rng, covcut::Index n) {
  covcut::ComplexVector v(n);
  for (covcut::Index i = 0; i < n; ++i) v[i] = rng.cgaussian();
  v.normalize();
  return v;
}

inline covcut::HermitianMatrix random_hermitian(covcut::Rng& rng, covcut::Index n) {
  covcut::ComplexMatrix g = random_complex_matrix(rng, n, n);
  covcut::ComplexMatrix h = 0.5 * (g + g.adjoint().eval());
  return covcut::HermitianMatrix(h);
}

/// Random PSD with controlled spectrum: eigenvalues uniform in [lo, hi] on a
/// Haar basis; `rank` < n zeroes the tail.
inline covcut::HermitianMatrix random_psd(covcut::Rng& rng, covcut::Index n, covcut::Index rank,
                                          double lo = 0.1, double hi = 2.0) {
  covcut::ComplexMatrix u = covcut::random_unitary(n, rng.next_u64());
  covcut::RealVector eigs = covcut::RealVector::Zero(n);
  for (covcut::Index k = 0; k < rank; ++k) eigs[k] = rng.uniform(lo, hi);
  std::sort(eigs.data(), eigs.data() + n, std::greater<double>());
  covcut::ComplexMatrix m = u * eigs.asDiagonal() * u.adjoint();
  return covcut::HermitianMatrix(m, /*psd=*/true, 1e-10 * std::max(1.0, m.norm()));
}

inline covcut::HermitianMatrix diag_hermitian(const covcut::RealVector& d, bool psd = false) {
  covcut::ComplexMatrix m = covcut::ComplexMatrix::Zero(d.size(), d.size());
  for (covcut::Index i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return covcut::HermitianMatrix(m, psd);
}

inline covcut::Codebook random_codebook(covcut::Rng& rng, int ports, int count) {
  std::vector<covcut::ComplexVector> words;
  for (int m = 0; m < count; ++m) words.push_back(random_unit_vector(rng, ports));
  return covcut::Codebook(ports, std::move(words));
}

struct GeneratedProblem {
  covcut::CenterProblem prob;
  covcut::HermitianMatrix truth;
};

/// Center problem generated from genuine feedback rounds against a full-rank
/// ground truth (which is therefore a strictly feasible point of the problem).
inline GeneratedProblem make_center_problem(std::uint64_t seed, int dim, int ports, int rounds,
                                            int codewords = 6, double lambda = 1.0,
                                            double trace_upper = 2.0) {
  covcut::Rng rng(seed);
  covcut::Codebook book = random_codebook(rng, ports, codewords);

  covcut::HermitianMatrix c = random_psd(rng, dim, dim, 0.2, 1.0);
  covcut::ComplexMatrix scaled = c.dense() * (0.5 * trace_upper / c.trace());
  covcut::HermitianMatrix truth(scaled, /*psd=*/true, 1e-12);

  covcut::CenterProblem prob(dim, std::move(book));
  prob.trace_upper = trace_upper;
  prob.lambda = lambda;
  for (int t = 1; t <= rounds; ++t) {
    const covcut::ComplexMatrix q =
        covcut::random_unitary(dim, rng.next_u64()).leftCols(ports);
    const covcut::HermitianMatrix r = covcut::effective_covariance(truth, q);
    const auto [pmi, cqi] = covcut::select_pmi_and_cqi(r, prob.codebook);
    prob.records.push_back(covcut::FeedbackRecord{t, q, pmi, cqi});
  }
  return {std::move(prob), std::move(truth)};
}

}  // namespace covcut_test

#endif  // COVCUT_TEST_HELPERS_HPP
