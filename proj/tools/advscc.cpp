// Copyright 2026 The advscc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// advscc: command-line front end for the constrained-adversary games and
// the continuous single-class learner.
//
// Exit codes: 0 success, 1 internal failure or failed check, 2 bad input,
// 3 infeasible game (the status JSON is still written).

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "advscc/adversary_oracle.hpp"
#include "advscc/checks.hpp"
#include "advscc/discrete_game.hpp"
#include "advscc/experiments.hpp"
#include "advscc/io.hpp"
#include "advscc/scc.hpp"

namespace {

using advscc::Error;
using advscc::ErrorCode;
using advscc::io::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInfeasible = 3;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInternal:
    case ErrorCode::kNumericalBreakdown:
      return kExitFailure;
    case ErrorCode::kAdversaryInfeasible:
    case ErrorCode::kNoFeasiblePoint:
      return kExitInfeasible;
    default:
      return kExitBadInput;
  }
}

struct Common {
  std::string out;
  bool timing = false;
};

void write_output(const Common& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + c.out + "'");
  f << text;
}

void write_json(const Common& c, const json& j) { write_output(c, j.dump(2) + "\n"); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  f << text;
}

// --seed wins; ADVSCC_SEED is the fallback.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ADVSCC_SEED")) {
    const std::string s(env);
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (s.empty() || pos != s.size() || s[0] == '-')
      throw Error(ErrorCode::kParse, "ADVSCC_SEED is not an unsigned integer: '" + s + "'");
    return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "a seed is required: pass --seed or set ADVSCC_SEED");
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-o,--out", c.out, "output file (default stdout)");
  app->add_flag("--timing", c.timing, "record wall time in the output");
}

int finish_result(const Common& c, advscc::io::ResultFile r, const Stopwatch& sw) {
  if (c.timing) r.timing_seconds = sw.seconds();
  write_json(c, advscc::io::to_json(r));
  std::cerr << r.command << ": status=" << r.status;
  if (r.z) std::cerr << " z=" << *r.z;
  if (r.z_i) std::cerr << " z_i=" << *r.z_i;
  if (r.value) std::cerr << " value=" << *r.value;
  if (r.type2) std::cerr << " type2=" << *r.type2;
  if (r.vulnerable) std::cerr << " vulnerable=" << (*r.vulnerable ? "true" : "false");
  std::cerr << "\n";
  return r.status == "adversary_infeasible" ? kExitInfeasible : kExitOk;
}

// ------------------------------------------------------------ commands

struct SpecArgs {
  Common common;
  std::string spec;
};

int cmd_solve(const SpecArgs& a) {
  Stopwatch sw;
  const auto spec = advscc::io::load_spec(a.spec).game();
  return finish_result(a.common, advscc::io::make_result(advscc::solve_soft(spec), spec), sw);
}

int cmd_hard(const SpecArgs& a) {
  Stopwatch sw;
  const auto spec = advscc::io::load_spec(a.spec).game();
  return finish_result(a.common, advscc::io::make_result(advscc::solve_hard_ldrs(spec), spec), sw);
}

int cmd_dual(const SpecArgs& a) {
  Stopwatch sw;
  const auto spec = advscc::io::load_spec(a.spec).dual();
  return finish_result(a.common, advscc::io::make_result(advscc::solve_dual(spec)), sw);
}

struct OracleArgs {
  Common common;
  std::string spec;
  std::string r;
  std::string mode = "structured";
  int resolution = 1000;
};

int cmd_oracle(const OracleArgs& a) {
  Stopwatch sw;
  const auto spec = advscc::io::load_spec(a.spec).game();
  const auto r = advscc::io::load_rejection(a.r);
  const auto mode = advscc::response_mode_from_string(a.mode);
  advscc::BestResponse br;
  try {
    switch (mode) {
      case advscc::ResponseMode::kStructured: br = advscc::best_response(r, spec); break;
      case advscc::ResponseMode::kBrute:
        br = advscc::brute_force_best_response(r, spec, a.resolution);
        break;
      case advscc::ResponseMode::kUnrestricted:
        br = advscc::unrestricted_best_response(r, spec.p);
        break;
    }
  } catch (const Error& e) {
    if (exit_code_for(e.code()) != kExitInfeasible) throw;
    advscc::io::ResultFile res;
    res.command = "oracle";
    res.status = "adversary_infeasible";
    res.mode = a.mode;
    res.r_events.assign(r.rates().begin(), r.rates().end());
    std::cerr << "oracle: " << e.what() << "\n";
    return finish_result(a.common, res, sw);
  }
  return finish_result(a.common, advscc::io::make_result(br, r, spec), sw);
}

struct TrainArgs {
  Common common;
  std::string data;
  double delta = 0.1;
  std::optional<std::uint64_t> seed;
  std::optional<double> pitch;
  std::optional<std::size_t> pitch_singletons;
  std::size_t min_count = 1;
  bool negbinom = false;
  double validation_fraction = 0.0;
  std::string solver = "newton";
  std::size_t max_centers = 200;
};

int cmd_scc_train(const TrainArgs& a) {
  Stopwatch sw;
  const std::uint64_t seed = resolve_seed(a.seed);
  const auto pts = advscc::io::load_points(a.data);
  advscc::SccConfig cfg;
  cfg.pitch = a.pitch;
  cfg.pitch_singletons = a.pitch_singletons;
  cfg.min_count = a.min_count;
  cfg.negbinom = a.negbinom;
  cfg.validation_fraction = a.validation_fraction;
  cfg.classifier.max_centers = a.max_centers;
  if (a.solver == "newton") {
    cfg.classifier.solver = advscc::KernelSolver::kNewton;
  } else if (a.solver == "gradient") {
    cfg.classifier.solver = advscc::KernelSolver::kGradient;
  } else {
    throw Error(ErrorCode::kParse, "unknown solver '" + a.solver + "'");
  }
  const auto model = advscc::train_scc(pts, a.delta, cfg, seed);
  json j = advscc::io::to_json(model);
  if (a.common.timing) j["timing_seconds"] = sw.seconds();
  write_json(a.common, j);
  std::cerr << "scc-train: n=" << model.n_train << " synthetic=" << model.n_synthetic
            << " cells=" << model.covered.size() << " pitch=" << model.grid.pitch
            << " t-=" << model.t_minus << " t+=" << model.t_plus << " seed=" << seed << "\n";
  return kExitOk;
}

struct EvalArgs {
  Common common;
  std::string model;
  std::string data;
  bool per_point = false;
};

int cmd_scc_eval(const EvalArgs& a) {
  Stopwatch sw;
  const auto model = advscc::io::load_model(a.model);
  const auto pts = advscc::io::load_points(a.data);
  if (pts.empty()) throw Error(ErrorCode::kEmptySample, "no points in '" + a.data + "'");
  std::vector<int> flags;
  std::size_t rejected = 0;
  for (const auto& x : pts) {
    const bool r = advscc::reject(model, x);
    rejected += r;
    if (a.per_point) flags.push_back(r ? 1 : 0);
  }
  json j = {{"format", "advscc/scc-eval"},
            {"version", advscc::io::kFormatVersion},
            {"n", pts.size()},
            {"rejected", rejected},
            {"reject_fraction", static_cast<double>(rejected) / static_cast<double>(pts.size())},
            {"model_seed", model.seed},
            {"tool_version", advscc::io::kToolVersion}};
  if (a.per_point) j["reject"] = flags;
  if (a.common.timing) j["timing_seconds"] = sw.seconds();
  write_json(a.common, j);
  std::cerr << "scc-eval: rejected " << rejected << " of " << pts.size() << " ("
            << j["reject_fraction"].get<double>() << ")\n";
  return kExitOk;
}

struct SweepArgs {
  Common common;
  std::string family = "arbitrary";
  std::size_t n_events = 50;
  double delta = 0.05;
  std::vector<double> lambdas;
  std::size_t reps = 50;
  std::optional<std::uint64_t> seed;
  std::string divergence = "kl2";
  std::size_t jobs = 1;
  std::string raw;
  std::string summary;
};

int cmd_sweep(const SweepArgs& a) {
  Stopwatch sw;
  advscc::SweepConfig cfg;
  cfg.family = advscc::family_from_string(a.family);
  cfg.n_events = a.n_events;
  cfg.delta = a.delta;
  if (!a.lambdas.empty()) cfg.lambda_grid = a.lambdas;
  cfg.reps = a.reps;
  cfg.seed = resolve_seed(a.seed);
  cfg.divergence = advscc::DivergenceKind::parse(a.divergence);
  cfg.jobs = a.jobs;
  const auto rep = advscc::run_sweep(cfg);
  if (!a.raw.empty()) write_file(a.raw, advscc::raw_csv(rep));
  if (!a.summary.empty()) write_file(a.summary, advscc::summary_csv(rep));

  json rows = json::array();
  std::size_t failures = 0;
  for (const auto& s : rep.summary) {
    failures += s.failures;
    rows.push_back({{"lambda", s.lambda},
                    {"count", s.count},
                    {"failures", s.failures},
                    {"mean_hard", s.mean_hard},
                    {"sem_hard", s.sem_hard},
                    {"mean_soft", s.mean_soft},
                    {"sem_soft", s.sem_soft}});
  }
  json j = {{"format", "advscc/sweep"},
            {"version", advscc::io::kFormatVersion},
            {"family", a.family},
            {"n_events", cfg.n_events},
            {"delta", cfg.delta},
            {"reps", cfg.reps},
            {"seed", cfg.seed},
            {"divergence", cfg.divergence.name()},
            {"summary", rows},
            {"failures", failures},
            {"tool_version", advscc::io::kToolVersion}};
  if (cfg.lambda_grid == advscc::default_lambda_grid())
    j["note"] = "lambda grid read as 0.5 to 12.5 in steps of 0.5 (25 points)";
  if (a.common.timing) j["timing_seconds"] = sw.seconds();
  write_json(a.common, j);
  std::cerr << "sweep: " << rep.rows.size() << " instances, " << failures << " failures\n";
  for (const auto& s : rep.summary)
    std::cerr << "  lambda=" << s.lambda << " hard=" << s.mean_hard << " soft=" << s.mean_soft
              << "\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

struct CheckArgs {
  Common common;
  std::string what = "all";
  std::size_t trials = 1000;
  std::size_t n_events = 5;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> divergences = {"kl2", "sqeuclid"};
  std::string spec;
};

int cmd_check(const CheckArgs& a) {
  Stopwatch sw;
  const std::uint64_t seed = resolve_seed(a.seed);
  if (a.what != "all" && a.what != "divergence" && a.what != "properties")
    throw Error(ErrorCode::kParse, "unknown battery '" + a.what + "'");
  bool ok = true;
  json j = {{"format", "advscc/check"},
            {"version", advscc::io::kFormatVersion},
            {"seed", seed},
            {"trials", a.trials},
            {"tool_version", advscc::io::kToolVersion}};

  if (a.what == "all" || a.what == "divergence") {
    json results = json::array();
    for (std::size_t i = 0; i < a.divergences.size(); ++i) {
      const auto kind = advscc::DivergenceKind::parse(a.divergences[i]);
      advscc::Rng rng = advscc::make_rng(seed, {1, i});
      const auto r = advscc::divergence_property_battery(kind, a.trials, a.n_events, rng);
      ok = ok && r.all_passed();
      results.push_back({{"divergence", kind.name()},
                         {"receding", {r.receding_passed, r.receding_applicable}},
                         {"two_symmetric", {r.symmetric_passed, r.trials}},
                         {"convex", {r.convex_passed, r.trials}},
                         {"transfer", {r.transfer_passed, r.trials}},
                         {"passed", r.all_passed()}});
      std::cerr << "divergence " << kind.name() << ": receding " << r.receding_passed << "/"
                << r.receding_applicable << ", 2-symmetric " << r.symmetric_passed << "/"
                << r.trials << ", convex " << r.convex_passed << "/" << r.trials << ", transfer "
                << r.transfer_passed << "/" << r.trials << "\n";
    }
    j["divergence"] = results;
  }

  if (a.what == "all" || a.what == "properties") {
    std::vector<advscc::GameSpec> specs;
    if (!a.spec.empty()) {
      specs.push_back(advscc::io::load_spec(a.spec).game());
    } else {
      // Small targets with a tied level set, for KL and squared Euclidean.
      const std::vector<double> v = {0.05, 0.1, 0.1, 0.3, 0.45};
      specs.emplace_back(advscc::Pmf::from_values(v), 0.1, 1.0, advscc::DivergenceKind::kl2());
      specs.emplace_back(advscc::Pmf::from_values(v), 0.1, 0.3,
                         advscc::DivergenceKind::sq_euclid());
    }
    json results = json::array();
    for (std::size_t i = 0; i < specs.size(); ++i) {
      advscc::Rng rng = advscc::make_rng(seed, {2, i});
      const auto r = advscc::property_abc_transfer_check(specs[i], a.trials, rng);
      ok = ok && r.all_passed();
      results.push_back({{"divergence", specs[i].divergence.name()},
                         {"lambda", specs[i].lambda},
                         {"sampled", r.sampled},
                         {"membership", {r.membership_passed, r.sampled}},
                         {"a", {r.a_passed, r.a_applicable}},
                         {"b", {r.b_passed, r.b_applicable}},
                         {"c", {r.c_passed, r.c_applicable}},
                         {"passed", r.all_passed()}});
      std::cerr << "properties: sampled " << r.sampled << "/" << r.trials << ", membership "
                << r.membership_passed << ", A " << r.a_passed << "/" << r.a_applicable << ", B "
                << r.b_passed << "/" << r.b_applicable << ", C " << r.c_passed << "/"
                << r.c_applicable << "\n";
    }
    j["properties"] = results;
  }

  j["passed"] = ok;
  if (a.common.timing) j["timing_seconds"] = sw.seconds();
  write_json(a.common, j);
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal single-class classification against constrained adversaries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", advscc::io::kToolVersion);

  SpecArgs solve_args, hard_args, dual_args;
  auto* solve = app.add_subcommand("solve", "optimal soft rejection function (LP)");
  auto* hard = app.add_subcommand("hard", "low-density hard rejection");
  auto* dual = app.add_subcommand("dual", "minimum type I error for a target pass rate");
  for (auto [cmd, args] : {std::pair{solve, &solve_args}, {hard, &hard_args}, {dual, &dual_args}}) {
    cmd->add_option("--spec", args->spec, "spec JSON")->required();
    add_common(cmd, args->common);
  }

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "adversary best response to a rejection function");
  oracle->add_option("--spec", oracle_args.spec, "spec JSON")->required();
  oracle->add_option("--r", oracle_args.r, "rejection-function JSON")->required();
  oracle->add_option("--mode", oracle_args.mode, "structured | brute | unrestricted");
  oracle->add_option("--resolution", oracle_args.resolution, "lattice resolution for brute mode");
  add_common(oracle, oracle_args.common);

  TrainArgs train_args;
  auto* train = app.add_subcommand("scc-train", "train the continuous single-class learner");
  train->add_option("--data", train_args.data, "points (CSV or JSON lines)")->required();
  train->add_option("--delta", train_args.delta, "type I error budget");
  train->add_option("--seed", train_args.seed, "random seed (default $ADVSCC_SEED)");
  auto* pitch = train->add_option("--pitch", train_args.pitch, "fixed grid pitch");
  train->add_option("--pitch-singletons", train_args.pitch_singletons,
                    "choose the pitch with at most this many singleton cells")
      ->excludes(pitch);
  train->add_option("--min-count", train_args.min_count, "points needed to cover a cell");
  train->add_flag("--negbinom", train_args.negbinom, "negative-binomial synthetic sample size");
  train->add_option("--validation-fraction", train_args.validation_fraction,
                    "hold out this fraction for the thresholds");
  train->add_option("--solver", train_args.solver, "newton | gradient");
  train->add_option("--max-centers", train_args.max_centers, "kernel centers");
  add_common(train, train_args.common);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("scc-eval", "apply a trained model to points");
  eval->add_option("--model", eval_args.model, "model JSON")->required();
  eval->add_option("--data", eval_args.data, "points (CSV or JSON lines)")->required();
  eval->add_flag("--per-point", eval_args.per_point, "include one decision per point");
  add_common(eval, eval_args.common);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "type II error across divergence radii");
  sweep->add_option("--family", sweep_args.family, "arbitrary | gaussian");
  sweep->add_option("--n-events", sweep_args.n_events, "events per instance");
  sweep->add_option("--delta", sweep_args.delta, "type I error budget");
  sweep->add_option("--lambdas", sweep_args.lambdas, "radii (default 0.5..12.5 step 0.5)")
      ->delimiter(',');
  sweep->add_option("--reps", sweep_args.reps, "instances per radius");
  sweep->add_option("--seed", sweep_args.seed, "random seed (default $ADVSCC_SEED)");
  sweep->add_option("--divergence", sweep_args.divergence, "kl2 | sqeuclid | bregman:<name>");
  sweep->add_option("--jobs", sweep_args.jobs, "worker threads");
  sweep->add_option("--raw", sweep_args.raw, "per-instance CSV");
  sweep->add_option("--summary", sweep_args.summary, "per-radius CSV");
  add_common(sweep, sweep_args.common);

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "randomised property batteries");
  check->add_option("--what", check_args.what, "all | divergence | properties");
  check->add_option("--trials", check_args.trials, "trials per battery");
  check->add_option("--n-events", check_args.n_events, "events in the divergence battery");
  check->add_option("--seed", check_args.seed, "random seed (default $ADVSCC_SEED)");
  check->add_option("--divergence", check_args.divergences, "divergences to check")
      ->delimiter(',');
  check->add_option("--spec", check_args.spec, "spec for the transfer-property battery");
  add_common(check, check_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (hard->parsed()) return cmd_hard(hard_args);
    if (dual->parsed()) return cmd_dual(dual_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (train->parsed()) return cmd_scc_train(train_args);
    if (eval->parsed()) return cmd_scc_eval(eval_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (check->parsed()) return cmd_check(check_args);
  } catch (const Error& e) {
    std::cerr << "advscc: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "advscc: internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitBadInput;
}
