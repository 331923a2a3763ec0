// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its runtime. Criteria 6-8 share one desk-scale Monte-Carlo run;
// criterion 7 executes a second, independent run to compare summaries.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <optional>
#include <sstream>

#include "center_oracle.hpp"
#include "covcut/covcut.hpp"
#include "test_helpers.hpp"

using namespace covcut;
using covcut_test::make_center_problem;
using covcut_test::random_psd;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const char* name, bool pass, double seconds) {
  std::printf("[acceptance] criterion %d (%s): %s (%.2f s)\n", criterion, name,
              pass ? "PASS" : "FAIL", seconds);
  std::fflush(stdout);
}

Codebook desk_book() {
  Type1Config cfg;  // n1=2, o1=4, cross-pol, cophase 2: N_P = 4, M = 16
  return gen_type1_codebook(cfg);
}

RealVector random_sigmas(Rng& rng, int ports, int positive) {
  RealVector s = RealVector::Zero(ports);
  for (int n = 0; n < positive; ++n) s[n] = rng.uniform(0.1, 3.0);
  std::sort(s.data(), s.data() + ports, std::greater<double>());
  return s;
}

// ---- shared desk-scale run (criteria 6, 7, 8) ------------------------------

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.antennas = 8;
  cfg.ports = 4;
  cfg.rounds = 20;
  cfg.trials = 50;
  // Type1Config defaults give M = 16 over 4 ports
  cfg.channel.paths = 3;
  cfg.channel.angle_spread_deg = 30.0;
  cfg.center.lambda = 1.0;        // paper-stated regularization weight
  cfg.center.trace_upper = 2.0;   // paper-stated b
  cfg.center.trace_lower = -std::numeric_limits<double>::infinity();  // a
  cfg.cut.schedule = SigmaSchedule::isotropic;  // paper-stated all-ones sigmas
  cfg.master_seed = 2024;
  cfg.jobs = 1;
  return cfg;
}

struct DeskOutcome {
  McResult mc;
  double max_eq_residual = 0.0;
  double min_cut_slack = std::numeric_limits<double>::infinity();
  long audited_rounds = 0;
  std::string summary_csv;
  double seconds = 0.0;
};

DeskOutcome run_desk_once() {
  const ExperimentConfig cfg = desk_config();
  const Codebook book = gen_type1_codebook(cfg.codebook);
  DeskOutcome out;
  Stopwatch watch;
  const auto observer = [&](int /*trial*/, int /*round*/, const HermitianMatrix& est,
                            const std::vector<FeedbackRecord>& records) {
    for (const auto& rec : records) {
      const ComplexVector p0 = rec.weighting * book.codeword(rec.pmi);
      const double form0 = est.quad_form(p0);
      out.max_eq_residual = std::max(out.max_eq_residual, std::abs(form0 - rec.cqi));
      for (int m = 0; m < book.size(); ++m) {
        if (m == rec.pmi) continue;
        const ComplexVector pm = rec.weighting * book.codeword(m);
        out.min_cut_slack = std::min(out.min_cut_slack, form0 - est.quad_form(pm));
      }
    }
    ++out.audited_rounds;
  };
  out.mc = monte_carlo_summary(cfg, observer);
  out.seconds = watch.seconds();
  std::ostringstream csv;
  write_summary_csv(csv, out.mc);
  out.summary_csv = csv.str();
  return out;
}

const DeskOutcome& desk_outcome() {
  static DeskOutcome cached = run_desk_once();
  return cached;
}

}  // namespace

TEST_CASE("criterion 1: Proposition 1 multiply-back", "[acceptance]") {
  Stopwatch watch;
  const Codebook book = desk_book();
  Rng rng(101);
  bool ok = true;
  for (int i = 0; i < 100; ++i) {
    const HermitianMatrix c_hat = random_psd(rng, 8, 8);
    CutDesignParams params;
    params.m_prime = rng.uniform_int(0, book.size() - 1);
    params.sigmas = random_sigmas(rng, 4, 4);
    params.complement_seed = rng.next_u64();
    params.unitary_seed = rng.next_u64();
    const ComplexMatrix q = design_q_full_rank(c_hat, params, book);
    const HermitianMatrix r = build_target_R(params, book);
    const double rel = (q.adjoint() * c_hat.dense() * q - r.dense()).norm() / r.dense().norm();
    if (!(rel <= 1e-8)) ok = false;
  }
  const double secs = watch.seconds();
  const bool pass = ok && secs < 5.0;
  report(1, "Proposition 1 multiply-back, 100 full-rank instances", pass, secs);
  REQUIRE(ok);
  REQUIRE(secs < 5.0);
}

TEST_CASE("criterion 2: Proposition 2 multiply-back", "[acceptance]") {
  Stopwatch watch;
  const Codebook book = desk_book();
  Rng rng(202);
  bool ok = true;
  for (int rank : {1, 2, 3, 5, 6, 7}) {
    for (int i = 0; i < 100; ++i) {
      const HermitianMatrix c_hat = random_psd(rng, 8, rank);
      CutDesignParams params;
      params.m_prime = rng.uniform_int(0, book.size() - 1);
      params.sigmas = random_sigmas(rng, 4, std::min(rank, 4));
      params.complement_seed = rng.next_u64();
      const std::uint64_t o_seed = rng.next_u64();
      const HermitianMatrix r = build_target_R(params, book);
      for (const std::uint64_t null_seed : {std::uint64_t{0}, o_seed}) {
        const ComplexMatrix q = design_q_rank_deficient(c_hat, rank, params, book, null_seed);
        const double rel = (q.adjoint() * c_hat.dense() * q - r.dense()).norm() /
                           std::max(1e-300, r.dense().norm());
        if (!(rel <= 1e-8)) ok = false;
      }
    }
  }
  const double secs = watch.seconds();
  const bool pass = ok && secs < 10.0;
  report(2, "Proposition 2 multiply-back, 100 instances per rank regime", pass, secs);
  REQUIRE(ok);
  REQUIRE(secs < 10.0);
}

TEST_CASE("criterion 3: strict-schedule cut validity", "[acceptance]") {
  Stopwatch watch;
  const Codebook book = desk_book();
  Rng rng(303);
  int proper = 0;
  int excluded_instances = 0;
  for (int i = 0; i < 1000; ++i) {
    const HermitianMatrix c_hat = random_psd(rng, 8, 8);
    const auto params = CutDesignParams::geometric(4, rng.uniform_int(0, book.size() - 1), 0.1,
                                                   rng.next_u64(), rng.next_u64());
    const ComplexMatrix q = design_q_full_rank(c_hat, params, book);
    const CutReport rep = validate_cut(c_hat, q, params, book);
    if (rep.parallel_excluded > 0) ++excluded_instances;
    if (rep.cut_is_proper && rep.predicted_pmi == params.m_prime) ++proper;
  }
  const double secs = watch.seconds();
  const bool pass = proper >= 990 && secs < 10.0;
  std::printf("[acceptance]   proper+predicted: %d/1000, parallel-degenerate instances: %d\n",
              proper, excluded_instances);
  report(3, "cut validity under strict sigma schedule", pass, secs);
  REQUIRE(proper >= 990);
  REQUIRE(secs < 10.0);
}

TEST_CASE("criterion 4: center solver vs dense grid oracle", "[acceptance]") {
  Stopwatch watch;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = covcut_test::make_real_2x2_instance(seed);
    const CenterProblem prob = inst.to_problem();
    const CenterSolution sol = solve_center(prob);
    if (!sol.converged || sol.kkt_residual > 1e-6) ok = false;

    const auto grid = covcut_test::grid_search_center_2x2(inst, 1e-3);
    Eigen::Matrix2d solved;
    solved << sol.estimate.dense()(0, 0).real(), sol.estimate.dense()(0, 1).real(),
        sol.estimate.dense()(1, 0).real(), sol.estimate.dense()(1, 1).real();
    const double dist = (solved - grid.maximizer).norm();
    if (!(grid.feasible_points > 0) || !(dist <= 1e-3)) ok = false;
  }
  const double secs = watch.seconds();
  const bool pass = ok && secs < 60.0;
  report(4, "center matches dense grid search on 20 2x2 instances", pass, secs);
  REQUIRE(ok);
  REQUIRE(secs < 60.0);
}

TEST_CASE("criterion 5: objective gradient vs finite differences", "[acceptance]") {
  Stopwatch watch;
  Rng dir_rng(404);
  bool ok = true;
  int checked = 0;
  std::uint64_t seed = 1000;
  while (checked < 50) {
    const int dim = 3 + (checked % 4);  // N_A in {3,4,5,6}
    auto [prob, truth] = make_center_problem(seed++, dim, std::max(2, dim / 2), 2);
    const HermitianMatrix start = find_feasible_start(prob);

    // blend toward the strictly feasible truth until slacks are fat enough
    // for a 1e-6 central difference to be numerically meaningful
    std::optional<HermitianMatrix> point;
    for (double theta : {0.5, 0.25, 0.75, 0.9}) {
      ComplexMatrix mix = theta * truth.dense() + (1.0 - theta) * start.dense();
      const HermitianMatrix cand(mix, true, 1e-10);
      double min_slack = std::numeric_limits<double>::infinity();
      for (const auto& rec : prob.records) {
        const ComplexVector p0 = rec.weighting * prob.codebook.codeword(rec.pmi);
        const double form0 = cand.quad_form(p0);
        for (int m = 0; m < prob.codebook.size(); ++m) {
          if (m == rec.pmi) continue;
          const ComplexVector pm = rec.weighting * prob.codebook.codeword(m);
          min_slack = std::min(min_slack, form0 - cand.quad_form(pm));
        }
      }
      if (min_slack >= 1e-3) {
        point = cand;
        break;
      }
    }
    if (!point) continue;  // redraw: near-degenerate feedback instance

    const auto eval = evaluate_center_objective(*point, prob);
    ComplexMatrix dir = covcut_test::random_hermitian(dir_rng, dim).dense();
    dir /= dir.norm();
    const double eps = 1e-6;
    const HermitianMatrix plus(point->dense() + eps * dir, false, 1e-9);
    const HermitianMatrix minus(point->dense() - eps * dir, false, 1e-9);
    const double fd = (evaluate_center_objective(plus, prob).value -
                       evaluate_center_objective(minus, prob).value) /
                      (2.0 * eps);
    const double analytic = (eval.gradient.dense() * dir).trace().real();
    const double rel = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
    if (!(rel <= 1e-5)) ok = false;
    ++checked;
  }
  const double secs = watch.seconds();
  const bool pass = ok && secs < 30.0;
  report(5, "gradient finite-difference agreement on 50 feasible points", pass, secs);
  REQUIRE(ok);
  REQUIRE(secs < 30.0);
}

TEST_CASE("criterion 6: desk-scale qualitative curve reproduction", "[acceptance]") {
  const DeskOutcome& desk = desk_outcome();
  const McResult& mc = desk.mc;

  const bool no_failures = mc.failed_trials == 0;
  const bool constraints_ok =
      desk.max_eq_residual <= 1e-8 && desk.min_cut_slack >= -1e-12 && desk.audited_rounds == 1000;
  const double mean1 = mc.summary.front().mean_precision;
  const double mean20 = mc.summary.back().mean_precision;
  const bool rises = mean20 >= mean1 + 0.05;
  const bool beats_type1 = mean20 >= mc.type1_mean;
  const bool gap_shrinks = (mc.type2_mean - mean20) < (mc.type2_mean - mean1);
  const bool in_time = desk.seconds < 1200.0;

  std::printf(
      "[acceptance]   mean(t=1)=%.4f mean(t=20)=%.4f type1=%.4f type2=%.4f "
      "max_eq_res=%.2e min_cut_slack=%.2e failed=%d\n",
      mean1, mean20, mc.type1_mean, mc.type2_mean, desk.max_eq_residual, desk.min_cut_slack,
      mc.failed_trials);
  const bool pass = no_failures && constraints_ok && rises && beats_type1 && gap_shrinks && in_time;
  report(6, "desk-scale end-to-end curve properties", pass, desk.seconds);
  REQUIRE(no_failures);
  REQUIRE(constraints_ok);
  REQUIRE(rises);
  REQUIRE(beats_type1);
  REQUIRE(gap_shrinks);
  REQUIRE(in_time);
}

TEST_CASE("criterion 7: determinism of the desk-scale run", "[acceptance]") {
  Stopwatch watch;
  const DeskOutcome& first = desk_outcome();
  const DeskOutcome second = run_desk_once();
  const bool pass = first.summary_csv == second.summary_csv && !first.summary_csv.empty();
  report(7, "byte-identical summaries for identical master seeds", pass, watch.seconds());
  REQUIRE(pass);
}

TEST_CASE("criterion 8: beam-precision metric sanity", "[acceptance]") {
  Stopwatch watch;
  Rng rng(808);
  bool perfect_ok = true;
  for (int rep = 0; rep < 10; ++rep) {
    const HermitianMatrix c = random_psd(rng, 8, 1 + rep % 8);
    if (std::abs(beam_precision(c, c) - 1.0) > 1e-12) perfect_ok = false;
  }

  const DeskOutcome& desk = desk_outcome();
  long violations = 0;
  long logged = 0;
  for (const auto& trial : desk.mc.trials) {
    for (const auto& log : trial.rounds) {
      ++logged;
      if (!(log.beam_precision >= 0.0 && log.beam_precision <= 1.0 + 1e-12)) ++violations;
    }
  }
  const double secs = watch.seconds();
  const bool pass = perfect_ok && violations == 0 && logged == 1000;
  std::printf("[acceptance]   logged rounds: %ld, range violations: %ld\n", logged, violations);
  report(8, "beam precision equals 1 at truth and stays in [0,1]", pass, secs);
  REQUIRE(perfect_ok);
  REQUIRE(violations == 0);
  REQUIRE(logged == 1000);
}
