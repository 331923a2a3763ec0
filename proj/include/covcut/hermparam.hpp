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
// Isometric real coordinates for Hermitian matrices.
//
// An n x n Hermitian matrix C maps to x in R^(n^2):
//   x[0..n)                diagonal entries C_ii
//   then for each i<j      sqrt(2) Re C_ij, sqrt(2) Im C_ij (row-major pairs)
// The map preserves inner products: <A, B>_F = a . b and ||C||_F = |x|_2,
// so linear functionals tr(A C) become dot products in coordinates.

#ifndef COVCUT_HERMPARAM_HPP
#define COVCUT_HERMPARAM_HPP

#include "covcut/types.hpp"

namespace covcut {

inline Index herm_param_dim(Index n) { return n * n; }

inline RealVector herm_to_coords(const ComplexMatrix& c) {
  const Index n = c.rows();
  RealVector x(herm_param_dim(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) x[k++] = c(i, i).real();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      x[k++] = M_SQRT2 * c(i, j).real();
      x[k++] = M_SQRT2 * c(i, j).imag();
    }
  }
  return x;
}

inline ComplexMatrix herm_from_coords(const RealVector& x, Index n) {
  require(x.size() == herm_param_dim(n), errc::dimension_mismatch, "herm_from_coords size");
  ComplexMatrix c(n, n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) c(i, i) = x[k++];
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double re = x[k++] * M_SQRT1_2;
      const double im = x[k++] * M_SQRT1_2;
      c(i, j) = {re, im};
      c(j, i) = {re, -im};
    }
  }
  return c;
}

}  // namespace covcut

#endif  // COVCUT_HERMPARAM_HPP
