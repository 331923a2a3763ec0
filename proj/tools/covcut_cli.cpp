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
// Command-line front end.
//
//   covcut run           execute a Monte-Carlo experiment from a JSON config
//   covcut gen-channel   generate a synthetic covariance CSV
//   covcut dump-codebook write the Type I codebook as CSV
//   covcut validate      schema-check a config and print it fully resolved
//
// Exit codes: 0 success (including runs with partial trial failures),
// 1 runtime failure, 2 bad configuration. Failures emit one machine-readable
// JSON object on stderr. COVCUT_LOG={quiet,info,debug} controls progress
// output on stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covcut/covcut.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int log_level() {  // 0 quiet, 1 info, 2 debug
  const char* env = std::getenv("COVCUT_LOG");
  if (env == nullptr) return 0;
  const std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[covcut] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[covcut] " << msg << "\n";
}

struct CliFailure {
  int exit_code;
  std::string code;
  std::string message;
};

[[noreturn]] void die(int exit_code, const std::string& code, const std::string& message) {
  throw CliFailure{exit_code, code, message};
}

int exit_code_for(covcut::errc code) {
  switch (code) {
    case covcut::errc::config_error:
    case covcut::errc::parse_error:
    case covcut::errc::invalid_argument:
      return 2;
    default:
      return 1;
  }
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      die(2, "config_error", "unknown config key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
T take(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    die(2, "config_error", std::string("config key '") + key + "' has the wrong type");
  }
}

covcut::ExperimentConfig config_from_json(const json& root) {
  covcut::ExperimentConfig cfg;
  cfg.jobs = 0;  // CLI default: all available processors
  check_keys(root,
             {"antennas", "ports", "rounds", "trials", "seed", "jobs", "codebook", "channel",
              "covariance_file", "center", "cut", "rank_rel_tol", "init_q", "type2"},
             "top level");

  cfg.antennas = take(root, "antennas", cfg.antennas);
  cfg.ports = take(root, "ports", cfg.ports);
  cfg.rounds = take(root, "rounds", cfg.rounds);
  cfg.trials = take(root, "trials", cfg.trials);
  cfg.master_seed = take<std::uint64_t>(root, "seed", cfg.master_seed);
  cfg.jobs = take(root, "jobs", cfg.jobs);
  cfg.covariance_file = take<std::string>(root, "covariance_file", cfg.covariance_file);
  cfg.rank_rel_tol = take(root, "rank_rel_tol", cfg.rank_rel_tol);

  const std::string init_q = take<std::string>(root, "init_q", "dft");
  if (init_q == "dft") {
    cfg.init_q = covcut::InitQPolicy::dft;
  } else if (init_q == "random_semiunitary") {
    cfg.init_q = covcut::InitQPolicy::random_semiunitary;
  } else {
    die(2, "config_error", "init_q must be 'dft' or 'random_semiunitary'");
  }

  if (root.contains("codebook")) {
    const json& cb = root.at("codebook");
    check_keys(cb, {"n1", "n2", "o1", "o2", "cophase_count", "cross_polarized"}, "codebook");
    cfg.codebook.n1 = take(cb, "n1", cfg.codebook.n1);
    cfg.codebook.n2 = take(cb, "n2", cfg.codebook.n2);
    cfg.codebook.o1 = take(cb, "o1", cfg.codebook.o1);
    cfg.codebook.o2 = take(cb, "o2", cfg.codebook.o2);
    cfg.codebook.cophase_count = take(cb, "cophase_count", cfg.codebook.cophase_count);
    cfg.codebook.cross_polarized = take(cb, "cross_polarized", cfg.codebook.cross_polarized);
  }

  if (root.contains("channel")) {
    const json& ch = root.at("channel");
    check_keys(ch, {"paths", "angle_spread_deg", "rank_target"}, "channel");
    cfg.channel.paths = take(ch, "paths", cfg.channel.paths);
    cfg.channel.angle_spread_deg = take(ch, "angle_spread_deg", cfg.channel.angle_spread_deg);
    cfg.channel.rank_target = take(ch, "rank_target", cfg.channel.rank_target);
  }

  if (root.contains("center")) {
    const json& ce = root.at("center");
    check_keys(ce,
               {"lambda", "trace_upper", "trace_lower", "reg_sign", "tol", "max_iters",
                "warm_start"},
               "center");
    cfg.center.lambda = take(ce, "lambda", cfg.center.lambda);
    cfg.center.trace_upper = take(ce, "trace_upper", cfg.center.trace_upper);
    if (ce.contains("trace_lower") && !ce.at("trace_lower").is_null()) {
      cfg.center.trace_lower = take(ce, "trace_lower", cfg.center.trace_lower);
    }
    cfg.center.tol = take(ce, "tol", cfg.center.tol);
    cfg.center.max_iters = take(ce, "max_iters", cfg.center.max_iters);
    cfg.center.warm_start = take(ce, "warm_start", cfg.center.warm_start);
    const std::string sign = take<std::string>(ce, "reg_sign", "promote_low_rank");
    if (sign == "promote_low_rank") {
      cfg.center.reg_sign = covcut::RegSign::promote_low_rank;
    } else if (sign == "as_printed") {
      cfg.center.reg_sign = covcut::RegSign::as_printed;
    } else {
      die(2, "config_error", "reg_sign must be 'promote_low_rank' or 'as_printed'");
    }
  }

  if (root.contains("cut")) {
    const json& cu = root.at("cut");
    check_keys(cu, {"sigma_schedule", "geometric_delta"}, "cut");
    const std::string schedule = take<std::string>(cu, "sigma_schedule", "isotropic");
    if (schedule == "isotropic") {
      cfg.cut.schedule = covcut::SigmaSchedule::isotropic;
    } else if (schedule == "geometric") {
      cfg.cut.schedule = covcut::SigmaSchedule::geometric;
    } else {
      die(2, "config_error", "sigma_schedule must be 'isotropic' or 'geometric'");
    }
    cfg.cut.geometric_delta = take(cu, "geometric_delta", cfg.cut.geometric_delta);
  }

  if (root.contains("type2")) {
    const json& t2 = root.at("type2");
    check_keys(t2, {"beams", "phase_bits", "amp_bits", "oversampling"}, "type2");
    cfg.type2.beams = take(t2, "beams", cfg.type2.beams);
    cfg.type2.phase_bits = take(t2, "phase_bits", cfg.type2.phase_bits);
    cfg.type2.amp_bits = take(t2, "amp_bits", cfg.type2.amp_bits);
    cfg.type2.oversampling = take(t2, "oversampling", cfg.type2.oversampling);
  }
  return cfg;
}

json config_to_json(const covcut::ExperimentConfig& cfg) {
  json root;
  root["antennas"] = cfg.antennas;
  root["ports"] = cfg.ports;
  root["rounds"] = cfg.rounds;
  root["trials"] = cfg.trials;
  root["seed"] = cfg.master_seed;
  root["jobs"] = cfg.jobs;
  root["covariance_file"] = cfg.covariance_file;
  root["rank_rel_tol"] = cfg.rank_rel_tol;
  root["init_q"] = cfg.init_q == covcut::InitQPolicy::dft ? "dft" : "random_semiunitary";
  root["codebook"] = {{"n1", cfg.codebook.n1},
                      {"n2", cfg.codebook.n2},
                      {"o1", cfg.codebook.o1},
                      {"o2", cfg.codebook.o2},
                      {"cophase_count", cfg.codebook.cophase_count},
                      {"cross_polarized", cfg.codebook.cross_polarized}};
  root["channel"] = {{"paths", cfg.channel.paths},
                     {"angle_spread_deg", cfg.channel.angle_spread_deg},
                     {"rank_target", cfg.channel.rank_target}};
  root["center"] = {
      {"lambda", cfg.center.lambda},
      {"trace_upper", cfg.center.trace_upper},
      {"trace_lower", std::isfinite(cfg.center.trace_lower) ? json(cfg.center.trace_lower)
                                                            : json(nullptr)},
      {"reg_sign", cfg.center.reg_sign == covcut::RegSign::promote_low_rank ? "promote_low_rank"
                                                                            : "as_printed"},
      {"tol", cfg.center.tol},
      {"max_iters", cfg.center.max_iters},
      {"warm_start", cfg.center.warm_start}};
  root["cut"] = {{"sigma_schedule", cfg.cut.schedule == covcut::SigmaSchedule::isotropic
                                        ? "isotropic"
                                        : "geometric"},
                 {"geometric_delta", cfg.cut.geometric_delta}};
  root["type2"] = {{"beams", cfg.type2.beams},
                   {"phase_bits", cfg.type2.phase_bits},
                   {"amp_bits", cfg.type2.amp_bits},
                   {"oversampling", cfg.type2.oversampling}};
  return root;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) die(2, "io_error", "cannot open config file " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    die(2, "parse_error", std::string("config JSON parse failure: ") + e.what());
  }
  if (!root.is_object()) die(2, "parse_error", "config root must be a JSON object");
  return root;
}

void apply_overrides(json& root, const std::vector<std::string>& overrides) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      die(2, "config_error", "override must look like key.path=value: " + kv);
    }
    const std::string path = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // plain string
    }
    // descend into dotted path, requiring the key to already exist somewhere
    // sensible: top-level keys may be created, nested groups must exist
    std::vector<std::string> parts;
    std::istringstream split(path);
    std::string part;
    while (std::getline(split, part, '.')) parts.push_back(part);
    if (parts.empty()) die(2, "config_error", "empty override key: " + kv);
    json* node = &root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
      node = &(*node)[parts[i]];
      if (!node->is_object()) {
        die(2, "config_error", "override path crosses a non-object: " + kv);
      }
    }
    (*node)[parts.back()] = value;
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- subcommand payloads --------------------------------------------------

struct RunArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  int trials = -1;
  int rounds = -1;
  std::int64_t seed = -1;
  int jobs = -1;
  bool solver_trace = false;
};

int cmd_run(const RunArgs& args) {
  json root = load_config_file(args.config_path);
  apply_overrides(root, args.overrides);
  covcut::ExperimentConfig cfg = config_from_json(root);
  if (args.trials >= 0) cfg.trials = args.trials;
  if (args.rounds >= 0) cfg.rounds = args.rounds;
  if (args.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(args.seed);
  if (args.jobs >= 0) cfg.jobs = args.jobs;
  try {
    cfg.validate();
  } catch (const covcut::Error& e) {
    die(2, covcut::errc_name(e.code()), e.what());
  }

  fs::create_directories(args.out_dir);
  log_info("running " + std::to_string(cfg.trials) + " trials x " + std::to_string(cfg.rounds) +
           " rounds (seed " + std::to_string(cfg.master_seed) + ")");

  std::ofstream trace_file;
  covcut::McTraceSink trace;
  if (args.solver_trace) {
    trace_file.open(fs::path(args.out_dir) / "solver_trace.csv");
    if (!trace_file.good()) die(1, "io_error", "cannot open solver_trace.csv for writing");
    trace_file << "trial,round,iteration,objective,grad_norm,step\n";
    trace = [&trace_file](int trial, int round, int iter, double obj, double gnorm, double step) {
      trace_file << trial << ',' << round << ',' << iter << ',' << fmt17(obj) << ','
                 << fmt17(gnorm) << ',' << fmt17(step) << '\n';
    };
  }

  covcut::TrialRoundObserver observer;
  if (log_level() >= 2) {
    observer = [](int trial, int round, const covcut::HermitianMatrix&,
                  const std::vector<covcut::FeedbackRecord>&) {
      log_debug("trial " + std::to_string(trial) + " round " + std::to_string(round) + " done");
    };
  }

  const covcut::McResult result = covcut::monte_carlo_summary(cfg, observer, trace);

  {
    std::ofstream out(fs::path(args.out_dir) / "summary.csv");
    if (!out.good()) die(1, "io_error", "cannot write summary.csv");
    covcut::write_summary_csv(out, result);
  }
  {
    std::ofstream out(fs::path(args.out_dir) / "rounds.jsonl");
    if (!out.good()) die(1, "io_error", "cannot write rounds.jsonl");
    covcut::write_rounds_jsonl(out, result);
  }
  {
    json resolved = config_to_json(cfg);
    resolved["run"] = {{"trials_requested", cfg.trials},
                       {"trials_failed", result.failed_trials},
                       {"type1_mean", result.type1_mean},
                       {"type2_mean", result.type2_mean}};
    std::ofstream out(fs::path(args.out_dir) / "config.resolved.json");
    if (!out.good()) die(1, "io_error", "cannot write config.resolved.json");
    out << resolved.dump(2) << "\n";
  }
  log_info("done; failed trials: " + std::to_string(result.failed_trials));
  return 0;
}

struct GenChannelArgs {
  std::string out_path;
  int antennas = 8;
  int paths = 3;
  double spread = 30.0;
  int rank_target = 0;
  std::uint64_t seed = 1;
};

int cmd_gen_channel(const GenChannelArgs& args) {
  covcut::SyntheticChannelConfig cfg;
  cfg.antennas = args.antennas;
  cfg.paths = args.paths;
  cfg.angle_spread_deg = args.spread;
  cfg.rank_target = args.rank_target;
  cfg.seed = args.seed;
  const covcut::HermitianMatrix c = covcut::synth_covariance(cfg);
  covcut::save_covariance(args.out_path, c, /*normalized=*/true);
  log_info("wrote " + args.out_path);
  return 0;
}

struct DumpCodebookArgs {
  std::string config_path;
  std::string out_path;
};

int cmd_dump_codebook(const DumpCodebookArgs& args) {
  covcut::Type1Config cb;
  if (!args.config_path.empty()) {
    const json root = load_config_file(args.config_path);
    cb = config_from_json(root).codebook;
  }
  const covcut::Codebook book = covcut::gen_type1_codebook(cb);
  std::ofstream out(args.out_path);
  if (!out.good()) die(1, "io_error", "cannot write " + args.out_path);
  for (int m = 0; m < book.size(); ++m) {
    const covcut::ComplexVector& w = book.codeword(m);
    for (covcut::Index i = 0; i < w.size(); ++i) {
      if (i > 0) out << ',';
      out << fmt17(w[i].real()) << ',' << fmt17(w[i].imag());
    }
    out << '\n';
  }
  log_info("wrote " + std::to_string(book.size()) + " codewords to " + args.out_path);
  return 0;
}

struct ValidateArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

int cmd_validate(const ValidateArgs& args) {
  json root = load_config_file(args.config_path);
  apply_overrides(root, args.overrides);
  covcut::ExperimentConfig cfg = config_from_json(root);
  try {
    cfg.validate();
    if (!cfg.covariance_file.empty()) {
      covcut::load_covariance(cfg.covariance_file, cfg.antennas);
    }
  } catch (const covcut::Error& e) {
    die(2, covcut::errc_name(e.code()), e.what());
  }
  std::cout << config_to_json(cfg).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"channel covariance reconstruction from Type I codebook feedback"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run a Monte-Carlo experiment");
  run->add_option("--config", run_args.config_path, "experiment config (JSON)")->required();
  run->add_option("--out", run_args.out_dir, "output directory (default: .)");
  run->add_option("--trials", run_args.trials, "override trial count");
  run->add_option("--rounds", run_args.rounds, "override round count");
  run->add_option("--seed", run_args.seed, "override master seed");
  run->add_option("--jobs", run_args.jobs, "trial worker count (0 = all processors)");
  run->add_flag("--solver-trace", run_args.solver_trace, "write solver_trace.csv");
  run->add_option("--set", run_args.overrides, "config override key.path=value")
      ->take_all()
      ->expected(-1);

  GenChannelArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen-channel", "generate a synthetic covariance CSV");
  gen->add_option("--out", gen_args.out_path, "output CSV path")->required();
  gen->add_option("--antennas", gen_args.antennas, "array size N_A");
  gen->add_option("--paths", gen_args.paths, "multipath component count");
  gen->add_option("--spread", gen_args.spread, "angle spread in degrees");
  gen->add_option("--rank-target", gen_args.rank_target, "truncate to this rank (0 = off)");
  gen->add_option("--seed", gen_args.seed, "generator seed");

  DumpCodebookArgs dump_args;
  CLI::App* dump = app.add_subcommand("dump-codebook", "write the Type I codebook as CSV");
  dump->add_option("--out", dump_args.out_path, "output CSV path")->required();
  dump->add_option("--config", dump_args.config_path, "experiment config supplying the codebook");

  ValidateArgs val_args;
  CLI::App* val = app.add_subcommand("validate", "schema-check a config, print it resolved");
  val->add_option("--config", val_args.config_path, "experiment config (JSON)")->required();
  val->add_option("--set", val_args.overrides, "config override key.path=value")
      ->take_all()
      ->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "{\"error\":{\"code\":\"cli_usage\",\"message\":\""
              << e.what() << "\"}}\n";
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (gen->parsed()) return cmd_gen_channel(gen_args);
    if (dump->parsed()) return cmd_dump_codebook(dump_args);
    if (val->parsed()) return cmd_validate(val_args);
    return 2;
  } catch (const CliFailure& f) {
    std::cerr << "{\"error\":{\"code\":\"" << f.code << "\",\"message\":\""
              << covcut::detail::json_escape(f.message) << "\"}}\n";
    return f.exit_code;
  } catch (const covcut::Error& e) {
    std::cerr << "{\"error\":{\"code\":\"" << covcut::errc_name(e.code()) << "\",\"message\":\""
              << covcut::detail::json_escape(e.what()) << "\"}}\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":{\"code\":\"runtime_error\",\"message\":\""
              << covcut::detail::json_escape(e.what()) << "\"}}\n";
    return 1;
  }
}
