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
// UE-side feedback model under the ideal-feedback assumption: the UE sees the
// effective covariance R = Q^H C Q exactly and reports the codeword index
// maximizing the quadratic form (PMI) together with the attained maximum
// (CQI). No quantization, no noise.

#ifndef COVCUT_FEEDBACK_HPP
#define COVCUT_FEEDBACK_HPP

#include <utility>
#include <vector>

#include "covcut/codebook.hpp"
#include "covcut/types.hpp"

namespace covcut {

/// One communication round's feedback together with the pilot weighting that
/// produced it. `weighting` is the Q actually in use during the round, so the
/// CQI equality reads v_pmi^H Q^H C Q v_pmi = cqi.
struct FeedbackRecord {
  int round = 0;           // t, 1-based
  ComplexMatrix weighting; // Q, N_A x N_P
  int pmi = 0;             // 0-based codeword index
  double cqi = 0.0;        // attained maximum quadratic form, >= 0
};

/// R = Q^H C Q, the covariance visible to the UE through the virtual ports.
inline HermitianMatrix effective_covariance(const HermitianMatrix& c, const ComplexMatrix& q) {
  require(q.rows() == c.dim(), errc::dimension_mismatch,
          "effective_covariance: Q rows must match covariance dimension");
  require(q.cols() >= 1, errc::dimension_mismatch, "effective_covariance: Q has no columns");
  ComplexMatrix r = q.adjoint() * c.dense() * q;
  // Symmetrize before validation; the triple product is Hermitian only up to
  // rounding.
  r = 0.5 * (r + r.adjoint().eval());
  return HermitianMatrix(r, /*psd=*/c.psd(), /*sym_tol=*/1e-10 * std::max(1.0, r.norm()));
}

/// PMI/CQI selection: argmax_m v_m^H R v_m with lowest-index tie-break.
inline std::pair<int, double> select_pmi_and_cqi(const HermitianMatrix& r, const Codebook& book) {
  require(book.size() > 0, errc::invalid_argument, "empty codebook");
  require(book.ports() == r.dim(), errc::dimension_mismatch,
          "select_pmi_and_cqi: codebook ports must match R dimension");
  int best = 0;
  double best_val = r.quad_form(book.codeword(0));
  for (int m = 1; m < book.size(); ++m) {
    const double val = r.quad_form(book.codeword(m));
    if (val > best_val) {
      best = m;
      best_val = val;
    }
  }
  return {best, best_val};
}

}  // namespace covcut

#endif  // COVCUT_FEEDBACK_HPP
