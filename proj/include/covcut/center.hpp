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
// Analytic-center solver. Over Hermitian C it maximizes
//
//   sum_i sum_{m != m0(i)} (1/eta_i) log( v_{m0}^H Q_i^H C Q_i v_{m0}
//                                        - v_m^H Q_i^H C Q_i v_m )
//   + log det C + reg_sign * lambda * tr C
//   + log(b - tr C) [+ log(tr C - a) when a is finite]
//
// subject to the CQI equalities v_{m0}^H Q_i^H C Q_i v_{m0} = eta_i.
//
// Hermitian matrices are parameterized as real vectors (hermparam.hpp); the
// equalities are eliminated by restricting to their affine solution set, and
// a damped Newton method with backtracking runs in the reduced coordinates,
// so every iterate satisfies the equalities exactly and stays strictly
// feasible in the barriers. The objective is strictly concave (log det), so
// the negated reduced Hessian is positive definite and Cholesky-solvable.
//
// The m = m0(i) term of the paper-facing inner sum is excluded (its slack is
// identically zero) and the nuclear norm is realized as tr C, exact on the
// PSD cone. reg_sign = promote_low_rank (-1) penalizes the trace as the
// stated low-rank intent requires; as_printed (+1) keeps the printed sign.

#ifndef COVCUT_CENTER_HPP
#define COVCUT_CENTER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "covcut/codebook.hpp"
#include "covcut/feedback.hpp"
#include "covcut/hermparam.hpp"
#include "covcut/types.hpp"

namespace covcut {

enum class RegSign : int { promote_low_rank = -1, as_printed = +1 };

struct CenterProblem {
  CenterProblem(int dim_, Codebook book) : dim(dim_), codebook(std::move(book)) {}

  int dim;
  std::vector<FeedbackRecord> records;
  Codebook codebook;
  double trace_lower = -std::numeric_limits<double>::infinity();  // a; -inf disables
  double trace_upper = 2.0;                                       // b
  double lambda = 0.0;
  RegSign reg_sign = RegSign::promote_low_rank;

  void validate() const {
    require(dim >= 1, errc::config_error, "center: dim >= 1");
    require(std::isfinite(trace_upper) && trace_upper > 0.0, errc::config_error,
            "center: b must be finite and positive (PD matrices have positive trace)");
    require(trace_lower < trace_upper, errc::config_error, "center: a < b required");
    require(lambda >= 0.0, errc::config_error, "center: lambda >= 0");
    for (const auto& rec : records) {
      require(rec.weighting.rows() == dim, errc::dimension_mismatch,
              "center: record weighting rows != dim");
      require(rec.weighting.cols() == codebook.ports(), errc::dimension_mismatch,
              "center: record weighting cols != codebook ports");
      require(rec.pmi >= 0 && rec.pmi < codebook.size(), errc::invalid_argument,
              "center: record pmi out of range");
    }
  }
};

struct CenterParams {
  double tol = 1e-7;
  int max_iters = 200;
  double armijo_slope = 0.01;
  double step_shrink = 0.5;
  /// Per-iteration hook: (iteration, objective, projected gradient norm,
  /// accepted step size).
  std::function<void(int, double, double, double)> trace;
};

struct CenterSolution {
  HermitianMatrix estimate;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  double min_slack = 0.0;  // smallest barrier argument at the solution
  bool converged = false;
};

namespace detail {

/// Cuts with (numerically) zero normal are vacuous (0 >= 0) and carry no
/// information; keeping them would put log(0) in the objective. The same rule
/// must be applied by every code path that enumerates cuts.
inline bool cut_is_vacuous(const ComplexVector& p0, const ComplexVector& pm) {
  const double n0 = p0.squaredNorm();
  const double nm = pm.squaredNorm();
  const double cross = std::norm(p0.dot(pm));
  const double norm2 = std::max(0.0, n0 * n0 + nm * nm - 2.0 * cross);
  const double scale = std::max({1.0, n0, nm});
  return std::sqrt(norm2) <= 1e-14 * scale;
}

struct CompiledCenter {
  Index dim = 0;
  Index n = 0;  // parameter dimension dim^2
  RealMatrix cuts;        // one row per barrier cut
  RealVector weights;     // 1/eta_i per cut
  RealMatrix eq;          // deduplicated equality rows
  RealVector eq_rhs;
  RealMatrix null_basis;  // n x f orthonormal basis of Null(eq)
  RealVector x_particular;  // min-norm solution of eq x = rhs
  RealVector trace_vec;
  double trace_lo = -std::numeric_limits<double>::infinity();
  double trace_hi = 0.0;
  double lambda = 0.0;
  double sign = -1.0;
  double eta_scale = 1.0;
  /// Uniform barrier shift for the phase-I subproblems: every barrier
  /// argument (cut slacks, eigenvalues, trace box) is relaxed by `shift`.
  /// The production solve runs with shift = 0.
  double shift = 0.0;

  bool has_lower() const { return std::isfinite(trace_lo); }

  ComplexMatrix matrix_at(const RealVector& x) const { return herm_from_coords(x, dim); }

  RealVector project(const RealVector& x) const {
    return x_particular + null_basis * (null_basis.transpose() * (x - x_particular));
  }

  /// Objective pieces at x. Returns false when x is not strictly feasible
  /// for the (possibly shifted) barriers.
  struct Eval {
    bool feasible = false;
    double value = -std::numeric_limits<double>::infinity();
    RealVector cut_slacks;  // shifted
    double trace = 0.0;
    double logdet = 0.0;
    Eigen::LLT<ComplexMatrix> llt;  // factorization of C + shift*I
  };

  Eval evaluate(const RealVector& x) const {
    Eval ev;
    ev.trace = trace_vec.dot(x);
    if (!(ev.trace < trace_hi + shift) || (has_lower() && !(ev.trace > trace_lo - shift))) {
      return ev;
    }
    ev.cut_slacks = cuts.rows() > 0 ? RealVector((cuts * x).array() + shift) : RealVector(0);
    if (ev.cut_slacks.size() > 0 && ev.cut_slacks.minCoeff() <= 0.0) return ev;
    ComplexMatrix c = matrix_at(x);
    if (shift != 0.0) c += shift * ComplexMatrix::Identity(dim, dim);
    ev.llt.compute(c);
    if (ev.llt.info() != Eigen::Success) return ev;
    ev.logdet = 0.0;
    for (Index i = 0; i < dim; ++i) {
      const double d = ev.llt.matrixL()(i, i).real();
      if (!(d > 0.0)) return ev;
      ev.logdet += 2.0 * std::log(d);
    }
    ev.feasible = true;
    ev.value = ev.logdet + sign * lambda * ev.trace + std::log(trace_hi + shift - ev.trace);
    if (has_lower()) ev.value += std::log(ev.trace - trace_lo + shift);
    for (Index j = 0; j < ev.cut_slacks.size(); ++j) {
      ev.value += weights[j] * std::log(ev.cut_slacks[j]);
    }
    return ev;
  }

  RealVector gradient(const Eval& ev) const {
    const ComplexMatrix inv = ev.llt.solve(ComplexMatrix::Identity(dim, dim));
    RealVector g = herm_to_coords(0.5 * (inv + inv.adjoint().eval()));
    double tcoef = sign * lambda - 1.0 / (trace_hi + shift - ev.trace);
    if (has_lower()) tcoef += 1.0 / (ev.trace - trace_lo + shift);
    g += tcoef * trace_vec;
    if (cuts.rows() > 0) {
      g.noalias() += cuts.transpose() * (weights.array() / ev.cut_slacks.array()).matrix();
    }
    return g;
  }

  RealMatrix hessian(const Eval& ev) const {
    RealMatrix h = RealMatrix::Zero(n, n);
    if (cuts.rows() > 0) {
      const RealVector d = (weights.array() / ev.cut_slacks.array().square()).matrix();
      h.noalias() -= cuts.transpose() * d.asDiagonal() * cuts;
    }
    const double hi_gap = trace_hi + shift - ev.trace;
    double tcoef = 1.0 / (hi_gap * hi_gap);
    if (has_lower()) {
      const double lo_gap = ev.trace - trace_lo + shift;
      tcoef += 1.0 / (lo_gap * lo_gap);
    }
    h.noalias() -= tcoef * trace_vec * trace_vec.transpose();

    // log det part: column k is -coords(W B_k W) with W = C^{-1} and B_k the
    // k-th basis element (exploiting its 1- or 2-entry sparsity).
    const ComplexMatrix w = ev.llt.solve(ComplexMatrix::Identity(dim, dim));
    Index k = 0;
    for (Index i = 0; i < dim; ++i, ++k) {
      const ComplexMatrix m = w.col(i) * w.row(i);
      h.col(k) -= herm_to_coords(m);
    }
    for (Index i = 0; i < dim; ++i) {
      for (Index j = i + 1; j < dim; ++j) {
        const ComplexMatrix a = w.col(i) * w.row(j);
        const ComplexMatrix b = w.col(j) * w.row(i);
        h.col(k++) -= herm_to_coords(M_SQRT1_2 * (a + b));
        h.col(k++) -= herm_to_coords(std::complex<double>(0.0, M_SQRT1_2) * (a - b));
      }
    }
    return h;
  }

  /// Minimum raw (unshifted) barrier argument at x, including the PSD
  /// barrier proxy lambda_min(C). Positive iff x is strictly feasible.
  double min_slack(const RealVector& x) const {
    double best = trace_hi - trace_vec.dot(x);
    if (has_lower()) best = std::min(best, trace_vec.dot(x) - trace_lo);
    if (cuts.rows() > 0) best = std::min(best, (cuts * x).minCoeff());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_at(x), Eigen::EigenvaluesOnly);
    return std::min(best, es.eigenvalues().minCoeff());
  }
};

inline CompiledCenter compile_center(const CenterProblem& prob) {
  prob.validate();
  CompiledCenter cc;
  cc.dim = prob.dim;
  cc.n = herm_param_dim(cc.dim);
  cc.trace_lo = prob.trace_lower;
  cc.trace_hi = prob.trace_upper;
  cc.lambda = prob.lambda;
  cc.sign = static_cast<double>(static_cast<int>(prob.reg_sign));
  cc.trace_vec = herm_to_coords(ComplexMatrix::Identity(cc.dim, cc.dim));

  std::vector<RealVector> cut_rows;
  std::vector<double> cut_weights;
  std::vector<RealVector> eq_rows;
  std::vector<double> eq_rhs;

  for (const auto& rec : prob.records) {
    require(rec.cqi > 0.0, errc::infeasible_problem,
            "nonpositive CQI leaves no strict interior");
    cc.eta_scale = std::max(cc.eta_scale, rec.cqi);
    const ComplexVector p0 = rec.weighting * prob.codebook.codeword(rec.pmi);
    const ComplexMatrix e0 = p0 * p0.adjoint();
    RealVector erow = herm_to_coords(e0);

    bool duplicate = false;
    for (std::size_t r = 0; r < eq_rows.size(); ++r) {
      const double diff = (eq_rows[r] - erow).norm();
      if (diff <= 1e-12 * std::max(1.0, erow.norm())) {
        require(std::abs(eq_rhs[r] - rec.cqi) <= 1e-10 * std::max(1.0, std::abs(rec.cqi)),
                errc::infeasible_problem, "contradictory CQI equalities");
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      if (erow.norm() <= 1e-14) {
        require(std::abs(rec.cqi) <= 1e-12, errc::infeasible_problem,
                "zero weighting row with nonzero CQI");
        continue;  // 0 = 0, vacuous
      }
      eq_rows.push_back(std::move(erow));
      eq_rhs.push_back(rec.cqi);
    }

    for (int m = 0; m < prob.codebook.size(); ++m) {
      if (m == rec.pmi) continue;
      const ComplexVector pm = rec.weighting * prob.codebook.codeword(m);
      if (cut_is_vacuous(p0, pm)) continue;
      const ComplexMatrix a = e0 - pm * pm.adjoint();
      cut_rows.push_back(herm_to_coords(a));
      cut_weights.push_back(1.0 / rec.cqi);
    }
  }

  cc.cuts.resize(static_cast<Index>(cut_rows.size()), cc.n);
  cc.weights.resize(static_cast<Index>(cut_rows.size()));
  for (std::size_t j = 0; j < cut_rows.size(); ++j) {
    cc.cuts.row(static_cast<Index>(j)) = cut_rows[j].transpose();
    cc.weights[static_cast<Index>(j)] = cut_weights[j];
  }
  cc.eq.resize(static_cast<Index>(eq_rows.size()), cc.n);
  cc.eq_rhs.resize(static_cast<Index>(eq_rows.size()));
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    cc.eq.row(static_cast<Index>(r)) = eq_rows[r].transpose();
    cc.eq_rhs[static_cast<Index>(r)] = eq_rhs[r];
  }

  if (cc.eq.rows() == 0) {
    cc.null_basis = RealMatrix::Identity(cc.n, cc.n);
    cc.x_particular = RealVector::Zero(cc.n);
    return cc;
  }

  Eigen::JacobiSVD<RealMatrix> svd(cc.eq, Eigen::ComputeFullV | Eigen::ComputeThinU);
  const double top = svd.singularValues()(0);
  Index rank = 0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > 1e-12 * top) ++rank;
  }
  RealVector y = svd.matrixU().transpose() * cc.eq_rhs;
  RealVector z = RealVector::Zero(svd.singularValues().size());
  for (Index k = 0; k < rank; ++k) z[k] = y[k] / svd.singularValues()(k);
  cc.x_particular = svd.matrixV().leftCols(z.size()) * z;
  const double residual = (cc.eq * cc.x_particular - cc.eq_rhs).cwiseAbs().maxCoeff();
  require(residual <= 1e-9 * std::max(1.0, cc.eq_rhs.cwiseAbs().maxCoeff()),
          errc::infeasible_problem, "inconsistent CQI equalities");
  cc.null_basis = svd.matrixV().rightCols(cc.n - rank);
  return cc;
}

struct NewtonResult {
  RealVector x;
  CompiledCenter::Eval eval;
  double grad_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton ascent in the equality-reduced coordinates. `x` must be
/// strictly feasible for the (possibly shifted) barriers. The reduced Newton
/// system is Jacobi-equilibrated and solved with one step of iterative
/// refinement; barrier Hessians near thin facets are otherwise conditioned
/// badly enough to stall the terminal convergence.
inline NewtonResult newton_maximize(const CompiledCenter& cc, RealVector x,
                                    const CenterParams& params) {
  NewtonResult res;
  res.eval = cc.evaluate(x);
  require(res.eval.feasible, errc::infeasible_problem, "Newton start point rejected");

  const Index f = cc.null_basis.cols();
  int stalled = 0;
  for (; res.iterations < params.max_iters; ++res.iterations) {
    const RealVector g = cc.gradient(res.eval);
    const RealVector gr = cc.null_basis.transpose() * g;
    res.grad_norm = gr.norm();
    if (res.grad_norm <= params.tol || f == 0) {
      res.converged = true;
      break;
    }

    const RealMatrix h = cc.hessian(res.eval);
    RealMatrix hr = cc.null_basis.transpose() * h * cc.null_basis;
    hr = -0.5 * (hr + hr.transpose().eval());

    RealVector scale(f);
    for (Index i = 0; i < f; ++i) scale[i] = 1.0 / std::sqrt(std::max(hr(i, i), 1e-300));
    RealMatrix hs = scale.asDiagonal() * hr * scale.asDiagonal();
    const RealVector gs = scale.asDiagonal() * gr;

    RealVector p;
    double ridge = 0.0;
    for (;;) {
      Eigen::LLT<RealMatrix> llt(ridge > 0.0 ? RealMatrix(hs + ridge * RealMatrix::Identity(f, f))
                                             : hs);
      if (llt.info() == Eigen::Success) {
        RealVector ps = llt.solve(gs);
        ps += llt.solve(gs - hs * ps);  // one refinement pass
        p = scale.asDiagonal() * ps;
        break;
      }
      ridge = (ridge == 0.0) ? 1e-10 : ridge * 100.0;
      require(ridge < 1e12, errc::infeasible_problem, "Newton system irreparably indefinite");
    }

    const double decrement2 = gr.dot(p);
    if (decrement2 <= 0.0) break;  // no ascent left in the Newton metric

    double step = 1.0;
    bool accepted = false;
    const double value_before = res.eval.value;
    const RealVector dir = cc.null_basis * p;
    while (step >= 1e-14) {
      const RealVector xc = x + step * dir;
      const auto evc = cc.evaluate(xc);
      if (evc.feasible && evc.value >= res.eval.value + params.armijo_slope * step * decrement2) {
        x = xc;
        res.eval = evc;
        accepted = true;
        break;
      }
      step *= params.step_shrink;
    }
    if (params.trace) {
      params.trace(res.iterations + 1, res.eval.value, res.grad_norm, accepted ? step : 0.0);
    }
    if (!accepted) break;  // line search floor: report best iterate
    if (decrement2 <= params.tol * params.tol) {
      // Newton decrement converged; the step just taken polishes the gradient
      ++res.iterations;
      res.converged = true;
      break;
    }
    // Floating-point floor: objective no longer moves. Accept when the
    // self-concordant suboptimality bound lambda^2/2 is at tolerance.
    if (res.eval.value - value_before <= 1e-13 * (1.0 + std::abs(value_before))) {
      if (++stalled >= 3) {
        ++res.iterations;
        res.converged = decrement2 <= 2.0 * params.tol;
        break;
      }
    } else {
      stalled = 0;
    }
  }
  res.x = std::move(x);
  return res;
}

/// Max-min-slack phase-I: over (x, t) on the equality subspace, maximize
///
///   kappa * t + sum_j log(s_j(x) - t) + log det(C(x) - t I)
///            + log(b - tr - t) [+ log(tr - a - t)]
///
/// by damped Newton, escalating kappa until the slack variable t turns
/// positive (then every raw barrier argument exceeds t > 0). Exhausting the
/// kappa schedule with t <= 0 certifies an empty interior.
inline bool phase_one_max_min_slack(const CompiledCenter& cc, RealVector& x_io) {
  const Index n = cc.n;
  const Index f = cc.null_basis.cols();
  const Index n_cuts = cc.cuts.rows();
  RealVector x = x_io;
  double t = cc.min_slack(x);
  t = t - 0.5 * std::abs(t) - 1e-3 * cc.trace_hi / static_cast<double>(cc.dim);

  struct Eval {
    bool ok = false;
    double value = -std::numeric_limits<double>::infinity();
    RealVector shat;
    double u = 0.0, v = 0.0, trace = 0.0, logdet = 0.0;
    Eigen::LLT<ComplexMatrix> llt;
  };
  const bool lower = cc.has_lower();
  double kappa = 4.0 * static_cast<double>(n_cuts + cc.dim + 2);

  const auto evaluate = [&](const RealVector& xx, double tt) {
    Eval ev;
    ev.trace = cc.trace_vec.dot(xx);
    ev.u = cc.trace_hi - ev.trace - tt;
    if (!(ev.u > 0.0)) return ev;
    if (lower) {
      ev.v = ev.trace - cc.trace_lo - tt;
      if (!(ev.v > 0.0)) return ev;
    }
    ev.shat = n_cuts > 0 ? RealVector((cc.cuts * xx).array() - tt) : RealVector(0);
    if (ev.shat.size() > 0 && ev.shat.minCoeff() <= 0.0) return ev;
    ComplexMatrix c = cc.matrix_at(xx);
    c -= tt * ComplexMatrix::Identity(cc.dim, cc.dim);
    ev.llt.compute(c);
    if (ev.llt.info() != Eigen::Success) return ev;
    ev.logdet = 0.0;
    for (Index i = 0; i < cc.dim; ++i) {
      const double d = ev.llt.matrixL()(i, i).real();
      if (!(d > 0.0)) return ev;
      ev.logdet += 2.0 * std::log(d);
    }
    ev.ok = true;
    ev.value = kappa * tt + ev.logdet + std::log(ev.u);
    if (lower) ev.value += std::log(ev.v);
    for (Index j = 0; j < ev.shat.size(); ++j) ev.value += std::log(ev.shat[j]);
    return ev;
  };

  for (int round = 0; round < 8; ++round) {
    Eval ev = evaluate(x, t);
    if (!ev.ok) return false;  // should not happen: t chosen strictly inside
    for (int iter = 0; iter < 80; ++iter) {
      const ComplexMatrix w = ev.llt.solve(ComplexMatrix::Identity(cc.dim, cc.dim));
      const ComplexMatrix w2 = w * w;

      RealVector gx = herm_to_coords(0.5 * (w + w.adjoint().eval()));
      double tcoef = -1.0 / ev.u;
      if (lower) tcoef += 1.0 / ev.v;
      gx += tcoef * cc.trace_vec;
      if (n_cuts > 0) gx.noalias() += cc.cuts.transpose() * ev.shat.cwiseInverse();
      double gt = kappa - w.trace().real() - 1.0 / ev.u;
      if (lower) gt -= 1.0 / ev.v;
      if (n_cuts > 0) gt -= ev.shat.cwiseInverse().sum();

      RealVector g(f + 1);
      g.head(f) = cc.null_basis.transpose() * gx;
      g[f] = gt;
      if (g.norm() <= 1e-8 * std::max(1.0, kappa)) break;  // centered for this kappa

      // Hessian blocks
      RealMatrix hxx = RealMatrix::Zero(n, n);
      if (n_cuts > 0) {
        const RealVector d = ev.shat.array().square().inverse();
        hxx.noalias() -= cc.cuts.transpose() * d.asDiagonal() * cc.cuts;
      }
      double tq = 1.0 / (ev.u * ev.u);
      if (lower) tq += 1.0 / (ev.v * ev.v);
      hxx.noalias() -= tq * cc.trace_vec * cc.trace_vec.transpose();
      Index k = 0;
      for (Index i = 0; i < cc.dim; ++i, ++k) {
        hxx.col(k) -= herm_to_coords(w.col(i) * w.row(i));
      }
      for (Index i = 0; i < cc.dim; ++i) {
        for (Index j2 = i + 1; j2 < cc.dim; ++j2) {
          const ComplexMatrix a = w.col(i) * w.row(j2);
          const ComplexMatrix b = w.col(j2) * w.row(i);
          hxx.col(k++) -= herm_to_coords(M_SQRT1_2 * (a + b));
          hxx.col(k++) -= herm_to_coords(std::complex<double>(0.0, M_SQRT1_2) * (a - b));
        }
      }
      RealVector hxt = herm_to_coords(0.5 * (w2 + w2.adjoint().eval()));
      double xtcoef = -1.0 / (ev.u * ev.u);
      if (lower) xtcoef += 1.0 / (ev.v * ev.v);
      hxt += xtcoef * cc.trace_vec;
      if (n_cuts > 0) {
        hxt.noalias() += cc.cuts.transpose() * ev.shat.array().square().inverse().matrix();
      }
      double htt = -w2.trace().real() - 1.0 / (ev.u * ev.u);
      if (lower) htt -= 1.0 / (ev.v * ev.v);
      if (n_cuts > 0) htt -= ev.shat.array().square().inverse().sum();

      RealMatrix m(f + 1, f + 1);
      m.topLeftCorner(f, f) = -(cc.null_basis.transpose() * hxx * cc.null_basis);
      m.block(0, f, f, 1) = -(cc.null_basis.transpose() * hxt);
      m.block(f, 0, 1, f) = m.block(0, f, f, 1).transpose();
      m(f, f) = -htt;
      m = 0.5 * (m + m.transpose().eval());

      RealVector scale(f + 1);
      for (Index i = 0; i <= f; ++i) scale[i] = 1.0 / std::sqrt(std::max(m(i, i), 1e-300));
      RealMatrix ms = scale.asDiagonal() * m * scale.asDiagonal();
      const RealVector gs = scale.asDiagonal() * g;
      RealVector p;
      double ridge = 0.0;
      for (;;) {
        Eigen::LLT<RealMatrix> llt(
            ridge > 0.0 ? RealMatrix(ms + ridge * RealMatrix::Identity(f + 1, f + 1)) : ms);
        if (llt.info() == Eigen::Success) {
          RealVector ps = llt.solve(gs);
          ps += llt.solve(gs - ms * ps);
          p = scale.asDiagonal() * ps;
          break;
        }
        ridge = (ridge == 0.0) ? 1e-10 : ridge * 100.0;
        if (ridge >= 1e12) return false;
      }
      const double decrement2 = g.dot(p);
      if (decrement2 <= 0.0) break;

      const RealVector dx = cc.null_basis * p.head(f);
      const double dt = p[f];
      double step = 1.0;
      bool accepted = false;
      while (step >= 1e-14) {
        Eval evc = evaluate(x + step * dx, t + step * dt);
        if (evc.ok && evc.value >= ev.value + 0.01 * step * decrement2) {
          x += step * dx;
          t += step * dt;
          ev = std::move(evc);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      if (t > 1e-9 * cc.trace_hi) {  // strictly feasible with margin
        x_io = x;
        return true;
      }
    }
    if (t > 0.0) {
      x_io = x;
      return true;
    }
    kappa *= 16.0;
  }
  if (t > 0.0) {
    x_io = x;
    return true;
  }
  return false;
}

/// Strictly feasible point on the equality subspace. Starts from the
/// projection of (b / 2N) I (or of `hint` when given); if any barrier
/// argument is nonpositive, runs the max-min-slack phase-I until the minimum
/// slack turns positive.
inline RealVector feasible_start_coords(const CompiledCenter& cc, const RealVector* hint) {
  const double init_scale = cc.trace_hi / (2.0 * static_cast<double>(cc.dim));
  RealVector x0 = cc.trace_vec * init_scale;
  if (cc.has_lower() && cc.trace_lo > 0.0) {
    // centre of the trace box when a lower bound is active
    const double mid = 0.5 * (cc.trace_lo + cc.trace_hi) / static_cast<double>(cc.dim);
    x0 = cc.trace_vec * mid;
  }
  RealVector x = cc.project(hint ? *hint : x0);
  if (cc.min_slack(x) > 0.0) return x;

  if (phase_one_max_min_slack(cc, x) && cc.min_slack(x) > 0.0) return x;
  if (hint != nullptr) {
    // retry from the neutral start before giving up
    x = cc.project(x0);
    if (cc.min_slack(x) > 0.0) return x;
    if (phase_one_max_min_slack(cc, x) && cc.min_slack(x) > 0.0) return x;
  }
  fail(errc::infeasible_problem,
       "phase-I could not find a strict interior point (max-min slack <= 0)");
}

}  // namespace detail

/// Objective value and Hermitian gradient of the center functional at a
/// strictly feasible C (C need not satisfy the CQI equalities; the cut slacks
/// are evaluated as differences of quadratic forms).
struct ObjectiveEval {
  double value = 0.0;
  HermitianMatrix gradient;
};

inline ObjectiveEval evaluate_center_objective(const HermitianMatrix& c,
                                               const CenterProblem& prob) {
  prob.validate();
  require(c.dim() == prob.dim, errc::dimension_mismatch, "evaluate: C dimension");

  Eigen::LLT<ComplexMatrix> llt(c.dense());
  require(llt.info() == Eigen::Success, errc::infeasible_evaluation, "C not positive definite");
  double logdet = 0.0;
  for (Index i = 0; i < c.dim(); ++i) {
    const double d = llt.matrixL()(i, i).real();
    require(d > 0.0, errc::infeasible_evaluation, "C not positive definite");
    logdet += 2.0 * std::log(d);
  }
  const double tr = c.trace();
  require(tr < prob.trace_upper, errc::infeasible_evaluation, "trace at or above upper bound");
  const bool has_lower = std::isfinite(prob.trace_lower);
  if (has_lower) {
    require(tr > prob.trace_lower, errc::infeasible_evaluation, "trace at or below lower bound");
  }

  const double sign = static_cast<double>(static_cast<int>(prob.reg_sign));
  double value = logdet + sign * prob.lambda * tr + std::log(prob.trace_upper - tr);
  if (has_lower) value += std::log(tr - prob.trace_lower);

  ComplexMatrix grad = llt.solve(ComplexMatrix::Identity(c.dim(), c.dim()));
  double tcoef = sign * prob.lambda - 1.0 / (prob.trace_upper - tr);
  if (has_lower) tcoef += 1.0 / (tr - prob.trace_lower);
  grad += tcoef * ComplexMatrix::Identity(c.dim(), c.dim());

  for (const auto& rec : prob.records) {
    require(rec.cqi > 0.0, errc::infeasible_problem, "nonpositive CQI leaves no strict interior");
    const double weight = 1.0 / rec.cqi;
    const ComplexVector p0 = rec.weighting * prob.codebook.codeword(rec.pmi);
    const double form0 = c.quad_form(p0);
    for (int m = 0; m < prob.codebook.size(); ++m) {
      if (m == rec.pmi) continue;
      const ComplexVector pm = rec.weighting * prob.codebook.codeword(m);
      if (detail::cut_is_vacuous(p0, pm)) continue;
      const double slack = form0 - c.quad_form(pm);
      require(slack > 0.0, errc::infeasible_evaluation, "nonpositive cut slack");
      value += weight * std::log(slack);
      grad += (weight / slack) * (p0 * p0.adjoint() - pm * pm.adjoint());
    }
  }
  grad = 0.5 * (grad + grad.adjoint().eval());
  return {value, HermitianMatrix(grad, /*psd=*/false, 1e-9 * std::max(1.0, grad.norm()))};
}

/// Strictly feasible starting matrix: exact on the equality subspace, PD,
/// positive cut slacks, trace strictly inside the bounds.
inline HermitianMatrix find_feasible_start(const CenterProblem& prob) {
  const detail::CompiledCenter cc = detail::compile_center(prob);
  const RealVector x = detail::feasible_start_coords(cc, nullptr);
  return HermitianMatrix(cc.matrix_at(x), /*psd=*/true, 1e-10);
}

inline CenterSolution solve_center(const CenterProblem& prob, const CenterParams& params = {},
                                   const HermitianMatrix* warm_start = nullptr) {
  const detail::CompiledCenter cc = detail::compile_center(prob);

  RealVector x;
  if (warm_start != nullptr) {
    require(warm_start->dim() == prob.dim, errc::dimension_mismatch, "warm start dimension");
    const RealVector hint = herm_to_coords(warm_start->dense());
    x = detail::feasible_start_coords(cc, &hint);
  } else {
    x = detail::feasible_start_coords(cc, nullptr);
  }

  detail::NewtonResult res = detail::newton_maximize(cc, std::move(x), params);

  CenterSolution sol;
  sol.converged = res.converged;
  double grad_norm = res.grad_norm;
  if (!sol.converged || grad_norm > params.tol) {
    // recompute the exit residual at the final iterate
    grad_norm = (cc.null_basis.transpose() * cc.gradient(res.eval)).norm();
    if (grad_norm <= params.tol) sol.converged = true;
  }

  sol.estimate = HermitianMatrix(cc.matrix_at(res.x), /*psd=*/true, 1e-10);
  sol.objective = res.eval.value;
  sol.kkt_residual = grad_norm;
  sol.iterations = res.iterations;
  sol.min_slack = cc.min_slack(res.x);
  return sol;
}

inline CenterSolution solve_center(const CenterProblem& prob, double tol, int max_iters) {
  CenterParams params;
  params.tol = tol;
  params.max_iters = max_iters;
  return solve_center(prob, params);
}

}  // namespace covcut

#endif  // COVCUT_CENTER_HPP
