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
// End-to-end reconstruction loop and Monte-Carlo harness. Each round: the UE
// observes R(t) = Q(t-1)^H C Q(t-1) and feeds back PMI/CQI; the eNB appends
// the record, re-solves the analytic center, and designs the next weighting
// from the center's rank branch. Beam precision is logged per round; Type I
// and Type II benchmark precisions are constant reference lines.
//
// Trials are embarrassingly parallel. Every trial derives its own RNG stream
// from the master seed, and aggregation runs in trial order, so results are
// byte-identical regardless of the worker count.

#ifndef COVCUT_SIM_HPP
#define COVCUT_SIM_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "covcut/center.hpp"
#include "covcut/channelgen.hpp"
#include "covcut/codebook.hpp"
#include "covcut/cutplane.hpp"
#include "covcut/feedback.hpp"
#include "covcut/matcore.hpp"
#include "covcut/types.hpp"

namespace covcut {

enum class SigmaSchedule { isotropic, geometric };
enum class InitQPolicy { dft, random_semiunitary };

struct CenterConfig {
  double lambda = 1.0;
  double trace_upper = 2.0;
  double trace_lower = -std::numeric_limits<double>::infinity();
  RegSign reg_sign = RegSign::promote_low_rank;
  double tol = 1e-7;
  int max_iters = 200;
  bool warm_start = true;
};

struct CutConfig {
  SigmaSchedule schedule = SigmaSchedule::isotropic;
  double geometric_delta = 0.1;
};

struct Type2BenchmarkConfig {
  int beams = 4;
  int phase_bits = 3;
  int amp_bits = 3;
  int oversampling = 4;
};

struct ExperimentConfig {
  int antennas = 8;  // N_A
  int ports = 4;     // N_P
  int rounds = 20;   // T
  int trials = 50;
  Type1Config codebook{};
  SyntheticChannelConfig channel{};
  std::string covariance_file;  // non-empty: shared ground truth for all trials
  CenterConfig center{};
  CutConfig cut{};
  double rank_rel_tol = kRankRelTol;
  InitQPolicy init_q = InitQPolicy::dft;
  Type2BenchmarkConfig type2{};
  std::uint64_t master_seed = 1;
  int jobs = 1;  // 0 = hardware concurrency

  void validate() const {
    require(antennas >= 1, errc::config_error, "antennas >= 1 required");
    require(ports >= 1, errc::config_error, "ports >= 1 required");
    require(ports <= antennas, errc::config_error,
            "N_P ≤ N_A violated: ports must not exceed antennas");
    require(rounds >= 1, errc::config_error, "rounds >= 1 required");
    require(trials >= 1, errc::config_error, "trials >= 1 required");
    codebook.validate();
    require(codebook.port_count() == ports, errc::config_error,
            "codebook port count must equal ports");
    require(rank_rel_tol > 0.0 && rank_rel_tol < 1.0, errc::config_error,
            "rank_rel_tol in (0, 1) required");
    if (covariance_file.empty()) channel.validate();
    if (cut.schedule == SigmaSchedule::geometric) {
      require(cut.geometric_delta > 0.0 && cut.geometric_delta < 1.0, errc::config_error,
              "geometric sigma delta in (0, 1) required");
    }
  }
};

struct RoundLog {
  int round = 0;
  int pmi = 0;
  double cqi = 0.0;
  double beam_precision = 0.0;
  int solver_iterations = 0;
  double solver_kkt = 0.0;
  bool solver_converged = false;
  double solver_min_slack = 0.0;
  bool cut_is_proper = false;
  int rank_branch = 0;  // rank the weighting design branched on
  double wall_ms = 0.0;
};

struct BenchmarkReport {
  double type1_precision = 0.0;
  double type2_precision = 0.0;
  int type1_pmi = 0;
};

/// p = w^H C_true w / d with w the unit principal eigenvector of C_est and d
/// the largest eigenvalue of C_true.
inline double beam_precision(const HermitianMatrix& c_true, const HermitianMatrix& c_est) {
  require(c_true.dim() == c_est.dim(), errc::dimension_mismatch, "beam_precision dimensions");
  const EigDecomposition true_eig = hermitian_eig(c_true);
  const double d = true_eig.eigenvalues[0];
  require(d > 0.0, errc::undefined_metric, "beam precision undefined for zero covariance");
  const EigDecomposition est_eig = hermitian_eig(c_est);
  const ComplexVector w = est_eig.eigenvectors.col(0);
  return c_true.quad_form(w) / d;
}

/// Spectrum truncation to the leading `rank` eigenvalues (PSD input).
inline HermitianMatrix truncate_spectrum(const HermitianMatrix& a, int rank) {
  require(rank >= 1 && rank <= a.dim(), errc::invalid_argument, "truncate_spectrum rank");
  const EigDecomposition eig = hermitian_eig(a);
  ComplexMatrix out = ComplexMatrix::Zero(a.dim(), a.dim());
  for (int k = 0; k < rank; ++k) {
    if (eig.eigenvalues[k] <= 0.0) break;
    out += eig.eigenvalues[k] * (eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint());
  }
  return HermitianMatrix(out, /*psd=*/true, 1e-10 * std::max(1.0, out.norm()));
}

/// Initial pilot weighting Q(0): the first N_P columns of the N_A-point DFT
/// matrix (semi-unitary), or a seeded random semi-unitary alternative.
inline ComplexMatrix initial_weighting(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  if (cfg.init_q == InitQPolicy::random_semiunitary) {
    return random_unitary(cfg.antennas, Rng::derive(trial_seed, 0x51C0)).leftCols(cfg.ports);
  }
  ComplexMatrix q(cfg.antennas, cfg.ports);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.antennas));
  for (int j = 0; j < cfg.antennas; ++j) {
    for (int k = 0; k < cfg.ports; ++k) {
      const double phase = -2.0 * M_PI * j * k / cfg.antennas;
      q(j, k) = scale * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return q;
}

/// Observer called after each round with the freshly solved center and the
/// records accumulated so far (for external constraint auditing).
using RoundObserver =
    std::function<void(int round, const HermitianMatrix& estimate,
                       const std::vector<FeedbackRecord>& records)>;

/// Per-iteration solver trace sink: (round, iteration, objective, grad norm,
/// step size).
using SolverTraceSink = std::function<void(int, int, double, double, double)>;

inline std::vector<RoundLog> run_reconstruction(const ExperimentConfig& cfg,
                                                const HermitianMatrix& c_true,
                                                std::uint64_t trial_seed,
                                                const RoundObserver& observer = {},
                                                const SolverTraceSink& trace = {}) {
  cfg.validate();
  require(c_true.dim() == cfg.antennas, errc::dimension_mismatch,
          "ground truth dimension != antennas");
  require(c_true.trace() < cfg.center.trace_upper, errc::config_error,
          "trace(C_true) must lie strictly below the trace upper bound b");

  const Codebook book = gen_type1_codebook(cfg.codebook);
  Rng rng(Rng::derive(trial_seed, 0xC07));
  ComplexMatrix q = initial_weighting(cfg, trial_seed);

  CenterProblem prob(cfg.antennas, book);
  prob.trace_lower = cfg.center.trace_lower;
  prob.trace_upper = cfg.center.trace_upper;
  prob.lambda = cfg.center.lambda;
  prob.reg_sign = cfg.center.reg_sign;

  std::vector<RoundLog> logs;
  logs.reserve(static_cast<std::size_t>(cfg.rounds));
  HermitianMatrix previous;
  bool have_previous = false;

  for (int t = 1; t <= cfg.rounds; ++t) {
    const auto start = std::chrono::steady_clock::now();
    RoundLog log;
    log.round = t;

    const HermitianMatrix r = effective_covariance(c_true, q);
    const auto [pmi, cqi] = select_pmi_and_cqi(r, book);
    log.pmi = pmi;
    log.cqi = cqi;
    prob.records.push_back(FeedbackRecord{t, q, pmi, cqi});

    CenterParams params;
    params.tol = cfg.center.tol;
    params.max_iters = cfg.center.max_iters;
    if (trace) {
      params.trace = [&trace, t](int iter, double obj, double gnorm, double step) {
        trace(t, iter, obj, gnorm, step);
      };
    }
    const CenterSolution sol =
        solve_center(prob, params, (cfg.center.warm_start && have_previous) ? &previous : nullptr);
    log.solver_iterations = sol.iterations;
    log.solver_kkt = sol.kkt_residual;
    log.solver_converged = sol.converged;
    log.solver_min_slack = sol.min_slack;

    const int rank = rank_estimate(sol.estimate, cfg.rank_rel_tol);
    log.rank_branch = rank;

    const int m_prime = rng.uniform_int(0, book.size() - 1);
    const std::uint64_t cseed = rng.next_u64();
    const std::uint64_t useed = rng.next_u64();
    CutDesignParams cut_params =
        cfg.cut.schedule == SigmaSchedule::isotropic
            ? CutDesignParams::isotropic(cfg.ports, m_prime, cseed, useed)
            : CutDesignParams::geometric(cfg.ports, m_prime, cfg.cut.geometric_delta, cseed,
                                         useed);
    if (rank >= cfg.antennas) {
      q = design_q_full_rank(sol.estimate, cut_params, book, cfg.rank_rel_tol);
      log.cut_is_proper = validate_cut(sol.estimate, q, cut_params, book).cut_is_proper;
    } else {
      cut_params = cut_params.truncated_to_rank(std::min(rank, cfg.ports));
      const HermitianMatrix c_deficient = truncate_spectrum(sol.estimate, rank);
      q = design_q_rank_deficient(c_deficient, rank, cut_params, book);
      log.cut_is_proper = validate_cut(c_deficient, q, cut_params, book).cut_is_proper;
    }

    log.beam_precision = beam_precision(c_true, sol.estimate);
    log.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            start)
                      .count();
    logs.push_back(log);

    if (observer) observer(t, sol.estimate, prob.records);
    previous = sol.estimate;
    have_previous = true;
  }
  return logs;
}

/// Constant Type I / Type II reference precisions. The Type I baseline
/// beamforms with the best round-1 codeword mapped through Q(0); the Type II
/// benchmark quantizes the true principal eigenvector (genie-aided upper
/// reference).
inline BenchmarkReport run_benchmarks(const ExperimentConfig& cfg, const HermitianMatrix& c_true,
                                      std::uint64_t trial_seed) {
  cfg.validate();
  require(c_true.dim() == cfg.antennas, errc::dimension_mismatch,
          "ground truth dimension != antennas");
  const EigDecomposition true_eig = hermitian_eig(c_true);
  const double d = true_eig.eigenvalues[0];
  require(d > 0.0, errc::undefined_metric, "benchmarks undefined for zero covariance");

  BenchmarkReport report;
  const Codebook book = gen_type1_codebook(cfg.codebook);
  const ComplexMatrix q0 = initial_weighting(cfg, trial_seed);
  const HermitianMatrix r = effective_covariance(c_true, q0);
  const auto [pmi, cqi] = select_pmi_and_cqi(r, book);
  report.type1_pmi = pmi;
  ComplexVector beam = q0 * book.codeword(pmi);
  const double beam_norm = beam.norm();
  if (beam_norm > 0.0) {
    beam /= beam_norm;
    report.type1_precision = c_true.quad_form(beam) / d;
  }

  Type1Config grid;
  grid.n1 = cfg.antennas;
  grid.n2 = 1;
  grid.o1 = cfg.type2.oversampling;
  grid.o2 = 1;
  grid.cophase_count = 2;
  grid.cross_polarized = false;
  const int beams = std::min(cfg.type2.beams, cfg.antennas);
  const ComplexVector quantized = type2_benchmark_quantize(
      true_eig.eigenvectors.col(0), grid, beams, cfg.type2.phase_bits, cfg.type2.amp_bits);
  report.type2_precision = c_true.quad_form(quantized) / d;
  return report;
}

struct TrialResult {
  int trial = 0;
  bool failed = false;
  std::string error;
  std::vector<RoundLog> rounds;
  BenchmarkReport bench;
};

struct SummaryRow {
  int round = 0;
  double mean_precision = 0.0;
  double stderr_precision = 0.0;
  double type1_ref = 0.0;
  double type2_ref = 0.0;
};

struct McResult {
  std::vector<SummaryRow> summary;
  std::vector<TrialResult> trials;
  int failed_trials = 0;
  double type1_mean = 0.0;
  double type2_mean = 0.0;
};

/// Observer with the trial index prepended; safe to call concurrently for
/// distinct trials.
using TrialRoundObserver = std::function<void(int trial, int round, const HermitianMatrix&,
                                              const std::vector<FeedbackRecord>&)>;

/// Monte-Carlo level trace sink: (trial, round, iteration, objective,
/// gradient norm, step size). Forces sequential trial execution.
using McTraceSink = std::function<void(int, int, int, double, double, double)>;

inline McResult monte_carlo_summary(const ExperimentConfig& cfg,
                                    const TrialRoundObserver& observer = {},
                                    const McTraceSink& trace = {}) {
  cfg.validate();
  const bool from_file = !cfg.covariance_file.empty();
  HermitianMatrix shared_truth;
  if (from_file) shared_truth = load_covariance(cfg.covariance_file, cfg.antennas);

  McResult result;
  result.trials.resize(static_cast<std::size_t>(cfg.trials));

  const auto run_trial = [&](int i) {
    TrialResult& tr = result.trials[static_cast<std::size_t>(i)];
    tr.trial = i;
    const std::uint64_t trial_seed = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(i));
    try {
      HermitianMatrix c_true;
      if (from_file) {
        c_true = shared_truth;
      } else {
        SyntheticChannelConfig ch = cfg.channel;
        ch.antennas = cfg.antennas;
        ch.seed = Rng::derive(trial_seed, 0xCAA);
        c_true = synth_covariance(ch);
      }
      RoundObserver round_obs;
      if (observer) {
        round_obs = [&observer, i](int round, const HermitianMatrix& est,
                                   const std::vector<FeedbackRecord>& recs) {
          observer(i, round, est, recs);
        };
      }
      SolverTraceSink trial_trace;
      if (trace) {
        trial_trace = [&trace, i](int round, int iter, double obj, double gnorm, double step) {
          trace(i, round, iter, obj, gnorm, step);
        };
      }
      tr.rounds = run_reconstruction(cfg, c_true, trial_seed, round_obs, trial_trace);
      tr.bench = run_benchmarks(cfg, c_true, trial_seed);
    } catch (const std::exception& e) {
      tr.failed = true;
      tr.error = e.what();
    }
  };

  int jobs = cfg.jobs;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, cfg.trials));
  if (jobs == 1 || trace) {  // tracing shares one sink; keep it ordered
    for (int i = 0; i < cfg.trials; ++i) run_trial(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < cfg.trials; i = next.fetch_add(1)) run_trial(i);
      });
    }
    for (auto& th : workers) th.join();
  }

  // Deterministic reduction in trial order.
  int ok = 0;
  double t1_sum = 0.0, t2_sum = 0.0;
  for (const auto& tr : result.trials) {
    if (tr.failed) {
      ++result.failed_trials;
      continue;
    }
    ++ok;
    t1_sum += tr.bench.type1_precision;
    t2_sum += tr.bench.type2_precision;
  }
  require(ok > 0, errc::infeasible_problem, "every Monte-Carlo trial failed");
  result.type1_mean = t1_sum / ok;
  result.type2_mean = t2_sum / ok;

  result.summary.resize(static_cast<std::size_t>(cfg.rounds));
  for (int t = 0; t < cfg.rounds; ++t) {
    SummaryRow& row = result.summary[static_cast<std::size_t>(t)];
    row.round = t + 1;
    double sum = 0.0;
    for (const auto& tr : result.trials) {
      if (!tr.failed) sum += tr.rounds[static_cast<std::size_t>(t)].beam_precision;
    }
    const double mean = sum / ok;
    double var = 0.0;
    for (const auto& tr : result.trials) {
      if (!tr.failed) {
        const double d = tr.rounds[static_cast<std::size_t>(t)].beam_precision - mean;
        var += d * d;
      }
    }
    row.mean_precision = mean;
    row.stderr_precision = ok > 1 ? std::sqrt(var / (ok - 1)) / std::sqrt(ok) : 0.0;
    row.type1_ref = result.type1_mean;
    row.type2_ref = result.type2_mean;
  }
  return result;
}

// ---- emission helpers -----------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

inline void write_summary_csv(std::ostream& out, const McResult& result) {
  out << "round,mean_precision,stderr,type1_ref,type2_ref\n";
  for (const auto& row : result.summary) {
    out << row.round << ',' << detail::fmt17(row.mean_precision) << ','
        << detail::fmt17(row.stderr_precision) << ',' << detail::fmt17(row.type1_ref) << ','
        << detail::fmt17(row.type2_ref) << '\n';
  }
}

inline void write_rounds_jsonl(std::ostream& out, const McResult& result) {
  for (const auto& tr : result.trials) {
    if (tr.failed) {
      out << "{\"trial\":" << tr.trial << ",\"failed\":true,\"error\":\""
          << detail::json_escape(tr.error) << "\"}\n";
      continue;
    }
    for (const auto& log : tr.rounds) {
      out << "{\"trial\":" << tr.trial << ",\"round\":" << log.round << ",\"pmi\":" << log.pmi
          << ",\"cqi\":" << detail::fmt17(log.cqi)
          << ",\"beam_precision\":" << detail::fmt17(log.beam_precision)
          << ",\"solver_iterations\":" << log.solver_iterations
          << ",\"solver_kkt\":" << detail::fmt17(log.solver_kkt)
          << ",\"solver_converged\":" << (log.solver_converged ? "true" : "false")
          << ",\"min_slack\":" << detail::fmt17(log.solver_min_slack)
          << ",\"cut_is_proper\":" << (log.cut_is_proper ? "true" : "false")
          << ",\"rank_branch\":" << log.rank_branch
          << ",\"type1_ref\":" << detail::fmt17(tr.bench.type1_precision)
          << ",\"type2_ref\":" << detail::fmt17(tr.bench.type2_precision)
          << ",\"wall_ms\":" << detail::fmt17(log.wall_ms) << "}\n";
    }
  }
}

}  // namespace covcut

#endif  // COVCUT_SIM_HPP
