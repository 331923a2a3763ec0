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
// Ground-truth covariance sources: a synthetic geometric multipath model
// (uniform linear array, half-wavelength spacing) and CSV ingestion for
// externally generated covariances. Every emitted covariance is Frobenius
// normalized.
//
// Covariance CSV interchange format:
//   line 1:  dim,<N>,normalized,<0|1>
//   then N*N lines  i,j,re,im   (row-major, 0-based, 17 significant digits)

#ifndef COVCUT_CHANNELGEN_HPP
#define COVCUT_CHANNELGEN_HPP

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "covcut/matcore.hpp"
#include "covcut/rng.hpp"
#include "covcut/types.hpp"

namespace covcut {

struct SyntheticChannelConfig {
  int antennas = 8;
  int paths = 3;
  double angle_spread_deg = 30.0;
  int rank_target = 0;  // 0 = none; otherwise truncate spectrum to this rank
  std::uint64_t seed = 1;

  void validate() const {
    require(antennas >= 1, errc::config_error, "channel: antennas >= 1");
    require(paths >= 1, errc::config_error, "channel: paths >= 1");
    require(angle_spread_deg > 0.0 && angle_spread_deg <= 180.0, errc::config_error,
            "channel: angle spread in (0, 180]");
    require(rank_target >= 0 && rank_target <= antennas, errc::config_error,
            "channel: rank_target in [0, antennas]");
  }
};

namespace detail {

/// ULA steering vector, half-wavelength spacing, unit norm.
inline ComplexVector steering_vector(int antennas, double angle_rad) {
  ComplexVector a(antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
  const double freq = M_PI * std::sin(angle_rad);
  for (int k = 0; k < antennas; ++k) {
    a[k] = scale * std::complex<double>(std::cos(freq * k), std::sin(freq * k));
  }
  return a;
}

}  // namespace detail

/// C = sum_p alpha_p a(theta_p) a(theta_p)^H, path angles drawn around a
/// seeded mean with the configured spread, Dirichlet path powers, Frobenius
/// normalized. PSD by construction.
inline HermitianMatrix synth_covariance(const SyntheticChannelConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double mean_deg = rng.uniform(-60.0, 60.0);

  RealVector powers(cfg.paths);
  double total = 0.0;
  for (int p = 0; p < cfg.paths; ++p) {
    double u = rng.uniform();
    if (u < 1e-300) u = 1e-300;
    powers[p] = -std::log(u);  // Exp(1) draws; normalized below => Dirichlet(1,..,1)
    total += powers[p];
  }
  powers /= total;

  ComplexMatrix c = ComplexMatrix::Zero(cfg.antennas, cfg.antennas);
  for (int p = 0; p < cfg.paths; ++p) {
    const double offset = rng.uniform(-0.5 * cfg.angle_spread_deg, 0.5 * cfg.angle_spread_deg);
    const double angle = (mean_deg + offset) * M_PI / 180.0;
    const ComplexVector a = detail::steering_vector(cfg.antennas, angle);
    c += powers[p] * (a * a.adjoint());
  }

  if (cfg.rank_target > 0) {
    EigDecomposition eig = hermitian_eig(HermitianMatrix(c, true, 1e-10));
    const int keep = std::min<int>(cfg.rank_target, static_cast<int>(eig.eigenvalues.size()));
    ComplexMatrix truncated = ComplexMatrix::Zero(cfg.antennas, cfg.antennas);
    for (int k = 0; k < keep; ++k) {
      if (eig.eigenvalues[k] <= 0.0) break;
      truncated += eig.eigenvalues[k] * (eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint());
    }
    c = truncated;
  }

  const double norm = c.norm();
  require(norm > 0.0, errc::config_error, "degenerate synthetic covariance");
  c /= norm;
  return HermitianMatrix(c, /*psd=*/true, 1e-10);
}

inline void save_covariance(const std::string& path, const HermitianMatrix& c,
                            bool normalized = true) {
  std::ofstream out(path);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  const Index n = c.dim();
  out << "dim," << n << ",normalized," << (normalized ? 1 : 0) << "\n";
  char buf[128];
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const auto z = c.dense()(i, j);
      std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%.17g\n", static_cast<long long>(i),
                    static_cast<long long>(j), z.real(), z.imag());
      out << buf;
    }
  }
  require(out.good(), errc::io_error, "write failed for " + path);
}

/// Loads the covariance CSV format, validating Hermitian symmetry (1e-9) and
/// positive semidefiniteness (eigenvalues >= -1e-8), then applies Frobenius
/// normalization when the header requests it. Each failure mode raises its
/// own error code.
inline HermitianMatrix load_covariance(const std::string& path, int expect_dim = 0) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open " + path);

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errc::parse_error, "missing header line");
  int dim = 0, normalized = 0;
  {
    std::istringstream hdr(line);
    std::string tag_dim, tag_norm, dim_str, norm_str;
    if (!std::getline(hdr, tag_dim, ',') || !std::getline(hdr, dim_str, ',') ||
        !std::getline(hdr, tag_norm, ',') || !std::getline(hdr, norm_str)) {
      fail(errc::parse_error, "malformed header: " + line);
    }
    require(tag_dim == "dim" && tag_norm == "normalized", errc::parse_error,
            "malformed header: " + line);
    try {
      dim = std::stoi(dim_str);
      normalized = std::stoi(norm_str);
    } catch (const std::exception&) {
      fail(errc::parse_error, "malformed header: " + line);
    }
  }
  require(dim >= 1, errc::parse_error, "nonpositive dimension in header");
  require(normalized == 0 || normalized == 1, errc::parse_error, "normalized flag must be 0/1");
  require(expect_dim == 0 || expect_dim == dim, errc::dimension_mismatch,
          "file dimension " + std::to_string(dim) + " != expected " + std::to_string(expect_dim));

  ComplexMatrix m(dim, dim);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen(dim, dim);
  seen.setConstant(false);
  long entries = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string si, sj, sre, sim;
    if (!std::getline(row, si, ',') || !std::getline(row, sj, ',') ||
        !std::getline(row, sre, ',') || !std::getline(row, sim)) {
      fail(errc::parse_error, "malformed entry line: " + line);
    }
    int i = 0, j = 0;
    double re = 0.0, im = 0.0;
    try {
      i = std::stoi(si);
      j = std::stoi(sj);
      re = std::stod(sre);
      im = std::stod(sim);
    } catch (const std::exception&) {
      fail(errc::parse_error, "malformed entry line: " + line);
    }
    require(i >= 0 && i < dim && j >= 0 && j < dim, errc::dimension_mismatch,
            "entry index out of range: " + line);
    require(!seen(i, j), errc::parse_error, "duplicate entry: " + line);
    seen(i, j) = true;
    m(i, j) = {re, im};
    ++entries;
  }
  require(entries == static_cast<long>(dim) * dim, errc::dimension_mismatch,
          "expected " + std::to_string(static_cast<long>(dim) * dim) + " entries, found " +
              std::to_string(entries));

  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  require(asym <= 1e-9, errc::not_hermitian,
          "symmetry violation " + std::to_string(asym) + " in " + path);
  HermitianMatrix h(m, /*psd=*/false, 1e-9);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.dense());
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  require(lmin >= -1e-8, errc::not_psd, "negative eigenvalue " + std::to_string(lmin));

  ComplexMatrix out = h.dense();
  if (lmin < -1e-10 * lmax) {
    // within the file tolerance but below the type invariant: clamp the
    // offending eigenvalues to zero
    out = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
          es.eigenvectors().adjoint();
  }
  if (normalized == 1) {
    const double norm = out.norm();
    require(norm > 0.0, errc::not_psd, "zero matrix cannot be normalized");
    out /= norm;
  }
  return HermitianMatrix(out, /*psd=*/true, 1e-9);
}

}  // namespace covcut

#endif  // COVCUT_CHANNELGEN_HPP
