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
// Standard-inspired codebooks. The Type I rank-1 codebook is an oversampled
// 2-D DFT grid of beams, optionally with cross-polarization co-phasing; the
// Type II-style quantizer (a greedy multi-beam amplitude/phase-quantized
// combination) is used only as a genie-aided benchmark. Neither reproduces
// the 3GPP tables bit-exactly.

#ifndef COVCUT_CODEBOOK_HPP
#define COVCUT_CODEBOOK_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "covcut/types.hpp"

namespace covcut {

struct Type1Config {
  int n1 = 2;  // horizontal array size
  int n2 = 1;  // vertical array size
  int o1 = 4;  // horizontal oversampling
  int o2 = 1;  // vertical oversampling
  int cophase_count = 2;          // co-phasing alphabet size (cross-pol only)
  bool cross_polarized = true;

  int port_count() const { return (cross_polarized ? 2 : 1) * n1 * n2; }

  int codeword_count() const {
    const int beams = n1 * o1 * n2 * o2;
    return cross_polarized ? beams * cophase_count : beams;
  }

  void validate() const {
    require(n1 >= 1 && n2 >= 1, errc::config_error, "codebook: n1, n2 >= 1");
    require(o1 >= 1 && o2 >= 1, errc::config_error, "codebook: o1, o2 >= 1");
    require(cophase_count == 2 || cophase_count == 4, errc::config_error,
            "codebook: cophase_count in {2, 4}");
  }
};

/// Ordered list of unit-norm codewords shared by eNB and UE. The ordering is
/// fixed (beam-major, co-phase-minor) so PMI indices are stable across runs.
/// Codeword indices are 0-based throughout the library.
class Codebook {
 public:
  Codebook(int port_count, std::vector<ComplexVector> codewords)
      : ports_(port_count), words_(std::move(codewords)) {
    require(words_.size() >= 2, errc::config_error, "codebook needs at least 2 codewords");
    for (const auto& w : words_) {
      require(w.size() == ports_, errc::dimension_mismatch, "codeword length != port count");
      require(std::abs(w.norm() - 1.0) <= 1e-12, errc::config_error, "codeword not unit norm");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) {
      for (std::size_t j = i + 1; j < words_.size(); ++j) {
        require((words_[i] - words_[j]).cwiseAbs().maxCoeff() > 1e-9, errc::config_error,
                "duplicate codewords");
      }
    }
  }

  int ports() const { return static_cast<int>(ports_); }
  int size() const { return static_cast<int>(words_.size()); }
  const ComplexVector& codeword(int m) const {
    require(m >= 0 && m < size(), errc::invalid_argument, "codeword index out of range");
    return words_[static_cast<std::size_t>(m)];
  }

 private:
  Index ports_;
  std::vector<ComplexVector> words_;
};

namespace detail {

/// One 2-D DFT beam on an n1 x n2 grid; `f1`, `f2` are spatial frequencies in
/// cycles per element. Row-major flattening (x * n2 + y).
inline ComplexVector dft_beam(int n1, int n2, double f1, double f2) {
  ComplexVector b(n1 * n2);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n1 * n2));
  for (int x = 0; x < n1; ++x) {
    for (int y = 0; y < n2; ++y) {
      const double phase = 2.0 * M_PI * (f1 * x + f2 * y);
      b[x * n2 + y] = scale * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return b;
}

inline ComplexVector stack_polarized(const ComplexVector& b, std::complex<double> cophase) {
  ComplexVector w(2 * b.size());
  w.head(b.size()) = b * M_SQRT1_2;
  w.tail(b.size()) = b * (cophase * M_SQRT1_2);
  return w;
}

}  // namespace detail

inline Codebook gen_type1_codebook(const Type1Config& cfg) {
  cfg.validate();
  std::vector<ComplexVector> words;
  words.reserve(static_cast<std::size_t>(cfg.codeword_count()));
  for (int l = 0; l < cfg.n1 * cfg.o1; ++l) {
    for (int m = 0; m < cfg.n2 * cfg.o2; ++m) {
      const double f1 = static_cast<double>(l) / (cfg.n1 * cfg.o1);
      const double f2 = static_cast<double>(m) / (cfg.n2 * cfg.o2);
      ComplexVector beam = detail::dft_beam(cfg.n1, cfg.n2, f1, f2);
      if (!cfg.cross_polarized) {
        words.push_back(beam);
        continue;
      }
      for (int p = 0; p < cfg.cophase_count; ++p) {
        const double a = 2.0 * M_PI * p / cfg.cophase_count;
        words.push_back(detail::stack_polarized(beam, {std::cos(a), std::sin(a)}));
      }
    }
  }
  return Codebook(cfg.port_count(), std::move(words));
}

/// Greedy Type II-style quantizer: pick the rotation hypothesis whose
/// critically-sampled orthogonal beams capture the most target energy in the
/// top `beams` coefficients, quantize the coefficients (amplitude relative to
/// the strongest beam, co-phase PSK), and keep whichever of {quantized
/// combination, best single Type I codeword} correlates better with the
/// target. The fallback makes the single-beam dominance property structural.
inline ComplexVector type2_benchmark_quantize(const ComplexVector& target,
                                              const Type1Config& cfg, int beams,
                                              int phase_bits, int amp_bits) {
  cfg.validate();
  require(target.size() == cfg.port_count(), errc::config_error,
          "target length must equal the beam dimension");
  const int ortho = cfg.port_count();
  require(beams >= 1 && beams <= ortho, errc::config_error,
          "beams must not exceed the orthogonal DFT beam count");
  require(phase_bits >= 1 && phase_bits <= 16 && amp_bits >= 1 && amp_bits <= 16,
          errc::config_error, "quantizer bit widths out of range");
  require(target.norm() > 0.0, errc::invalid_argument, "zero target");

  const int per_pol = cfg.n1 * cfg.n2;
  std::vector<ComplexVector> best_basis;
  std::vector<std::complex<double>> best_coefs;
  std::vector<int> best_pick;
  double best_energy = -1.0;

  for (int r1 = 0; r1 < cfg.o1; ++r1) {
    for (int r2 = 0; r2 < cfg.o2; ++r2) {
      std::vector<ComplexVector> basis;
      basis.reserve(static_cast<std::size_t>(ortho));
      for (int k1 = 0; k1 < cfg.n1; ++k1) {
        for (int k2 = 0; k2 < cfg.n2; ++k2) {
          const double f1 = (k1 + static_cast<double>(r1) / cfg.o1) / cfg.n1;
          const double f2 = (k2 + static_cast<double>(r2) / cfg.o2) / cfg.n2;
          ComplexVector beam = detail::dft_beam(cfg.n1, cfg.n2, f1, f2);
          if (cfg.cross_polarized) {
            ComplexVector upper = ComplexVector::Zero(2 * per_pol);
            upper.head(per_pol) = beam;
            ComplexVector lower = ComplexVector::Zero(2 * per_pol);
            lower.tail(per_pol) = beam;
            basis.push_back(std::move(upper));
            basis.push_back(std::move(lower));
          } else {
            basis.push_back(std::move(beam));
          }
        }
      }
      std::vector<std::complex<double>> coefs(basis.size());
      for (std::size_t k = 0; k < basis.size(); ++k) coefs[k] = basis[k].dot(target);

      std::vector<int> order(basis.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::norm(coefs[static_cast<std::size_t>(a)]) >
               std::norm(coefs[static_cast<std::size_t>(b)]);
      });
      order.resize(static_cast<std::size_t>(beams));
      double energy = 0.0;
      for (int k : order) energy += std::norm(coefs[static_cast<std::size_t>(k)]);
      if (energy > best_energy) {
        best_energy = energy;
        best_basis = basis;
        best_coefs = coefs;
        best_pick = order;
      }
    }
  }

  // Quantize relative to the strongest selected beam.
  const std::complex<double> ref = best_coefs[static_cast<std::size_t>(best_pick[0])];
  const double ref_mag = std::abs(ref);
  const int amp_levels = (1 << amp_bits) - 1;
  const int phase_levels = 1 << phase_bits;
  ComplexVector combo = ComplexVector::Zero(target.size());
  for (int k : best_pick) {
    const std::complex<double> c = best_coefs[static_cast<std::size_t>(k)];
    const double rel = (ref_mag > 0.0) ? std::abs(c) / ref_mag : 0.0;
    const double amp = std::round(rel * amp_levels) / amp_levels;
    if (amp == 0.0) continue;
    const double ang = std::arg(c / ref);
    const double qang =
        std::round(ang * phase_levels / (2.0 * M_PI)) * (2.0 * M_PI / phase_levels);
    combo += amp * std::complex<double>(std::cos(qang), std::sin(qang)) *
             best_basis[static_cast<std::size_t>(k)];
  }

  double combo_corr = 0.0;
  if (combo.norm() > 0.0) {
    combo.normalize();
    combo_corr = std::abs(combo.dot(target));
  }

  // Fallback candidate: best single codeword from the Type I grid.
  const Codebook book = gen_type1_codebook(cfg);
  int best_m = 0;
  double best_corr = -1.0;
  for (int m = 0; m < book.size(); ++m) {
    const double corr = std::abs(book.codeword(m).dot(target));
    if (corr > best_corr) {
      best_corr = corr;
      best_m = m;
    }
  }
  if (combo_corr >= best_corr) return combo;
  return book.codeword(best_m);
}

}  // namespace covcut

#endif  // COVCUT_CODEBOOK_HPP
