// aircomp: command-line front end.
//
//   aircomp solve --instance inst.json [--policy P] [--round floor] [--a A]
//   aircomp sweep --spec spec.json --out result.csv [--threads N] [--timing]
//   aircomp oracle --instances dir --out report.csv [--points N]
//   aircomp gen-instance --k K --h-mean X --out inst.json
//   aircomp train --instance inst.json [--policy P] [--rounds T] [--eta E] --out run.csv
//
// Exit status: 0 ok, 2 invalid input, 3 numerical anomaly, 1 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aircomp/errors.hpp"
#include "aircomp/experiments.hpp"
#include "aircomp/fl_sim.hpp"
#include "aircomp/io.hpp"
#include "aircomp/lower_solver.hpp"
#include "aircomp/upper_solver.hpp"
#include "aircomp/verification.hpp"

namespace fs = std::filesystem;
using namespace aircomp;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitAnomaly = 3;

struct Globals {
  std::uint64_t seed = 42;
  double tol = 1e-3;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file " + path);
  return out;
}

void emit_json(const json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
  }
}

Rounding parse_rounding(const std::string& s) {
  if (s == "floor") return Rounding::FloorWithRepair;
  if (s == "continuous") return Rounding::Continuous;
  throw ValidationError("--round expects 'floor' or 'continuous'");
}

struct SolveArgs {
  std::string instance;
  std::string policy = "PROPOSED";
  std::string round = "continuous";
  std::optional<double> a;
  std::string out;
};

void cmd_solve(const SolveArgs& args) {
  const ProblemInstance inst = load_instance(args.instance);
  require_valid(inst);
  const Rounding mode = parse_rounding(args.round);

  if (args.a) {
    const LowerSolution sol = solve_lower(inst, *args.a);
    const auto S = S_from_beta(sol.beta, inst, mode);
    emit_json(to_json(*args.a, sol, S), args.out);
    return;
  }

  const Policy policy = parse_policy(args.policy);
  if (policy == Policy::Proposed) {
    GlobalSolution g = solve_global(inst);
    json doc = to_json(g);
    if (mode == Rounding::FloorWithRepair) {
      const auto S = S_from_beta(g.lower.beta, inst, mode);
      doc["S"] = S;
      doc["mse_rounded"] = mse(inst, g.a_star, g.lower.b, S);
    }
    doc["policy"] = "PROPOSED";
    emit_json(doc, args.out);
    return;
  }
  const Allocation alloc = run_policy(inst, policy);
  json doc = to_json(alloc);
  doc["policy"] = std::string(to_string(policy));
  emit_json(doc, args.out);
}

struct SweepArgs {
  std::string spec;
  std::string out;
  std::size_t threads = 1;
  bool timing = false;
};

void cmd_sweep(const SweepArgs& args, const Globals& g, bool seed_given) {
  std::ifstream in(args.spec);
  if (!in) throw ValidationError("cannot open sweep spec " + args.spec);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(args.spec + ": " + e.what());
  }
  SweepSpec spec = sweep_spec_from_json(doc);
  if (seed_given) spec.seed = g.seed;
  const auto rows = run_sweep(spec, {args.threads});
  auto out = open_out(args.out);
  write_sweep_csv(out, spec, rows, args.timing);
}

struct OracleArgs {
  std::string dir;
  std::string out;
  std::size_t points = 100000;
};

void cmd_oracle(const OracleArgs& args, const Globals& g) {
  if (!fs::is_directory(args.dir)) throw ValidationError(args.dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(args.dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  auto out = open_out(args.out);
  out << "instance_id,oracle,solver_mse,oracle_mse,rel_gap,pass\n";
  for (const auto& f : files) {
    const ProblemInstance inst = load_instance(f);
    require_valid(inst);
    const OracleReport r = grid_oracle(inst, args.points, g.tol);
    out << f.stem().string() << ',' << r.oracle << ',' << format_double(r.solver_value) << ','
        << format_double(r.best_value) << ',' << format_double(r.rel_gap) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
}

struct GenArgs {
  std::size_t k = 20;
  double h_mean = kDefaultHMean;
  double b_max = kDefaultBMax;
  double c = 1.0;
  double sigma2 = 1.0;
  std::optional<double> s_t;
  std::optional<double> st_fraction;
  std::string out;
};

void cmd_gen(const GenArgs& args, const Globals& g) {
  if (args.k == 0) throw ValidationError("--k must be positive");
  const auto h = sample_channels(args.k, args.h_mean, g.seed);
  const auto& pool = default_dataset_sizes();
  ProblemInstance inst;
  inst.sigma2 = args.sigma2;
  for (std::size_t k = 0; k < args.k; ++k) {
    inst.devices.push_back({h[k], args.b_max, args.c, pool[k % pool.size()]});
  }
  if (args.st_fraction) {
    inst.S_T = *args.st_fraction * inst.total_data();
  } else if (args.s_t) {
    inst.S_T = *args.s_t;
  } else {
    inst.S_T = std::min(kDefaultST, inst.total_data());
  }
  require_valid(inst);
  emit_json(to_json(inst), args.out);
}

struct TrainArgs {
  std::string instance;
  std::string policy = "PROPOSED";
  std::size_t rounds = 200;
  double eta = 0.05;
  std::size_t dim = 10;
  std::string loss = "least-squares";
  std::string c_mode = "unit";
  std::string out;
};

void cmd_train(const TrainArgs& args, const Globals& g) {
  const ProblemInstance inst = load_instance(args.instance);
  require_valid(inst);
  std::vector<std::size_t> sizes;
  for (const auto& d : inst.devices) {
    if (d.D != std::floor(d.D)) throw ValidationError("train needs integer dataset sizes D");
    sizes.push_back(static_cast<std::size_t>(d.D));
  }
  TaskOptions topts;
  topts.dim = args.dim;
  if (args.loss == "least-squares") {
    topts.loss = LossFamily::LeastSquares;
  } else if (args.loss == "logistic") {
    topts.loss = LossFamily::Logistic;
  } else {
    throw ValidationError("--loss expects 'least-squares' or 'logistic'");
  }
  TrainOptions opts;
  opts.rounds = args.rounds;
  opts.eta = args.eta;
  opts.seed = g.seed;
  if (args.c_mode == "unit") {
    opts.c_mode = GradientPower::Unit;
  } else if (args.c_mode == "empirical") {
    opts.c_mode = GradientPower::Empirical;
  } else {
    throw ValidationError("--c expects 'unit' or 'empirical'");
  }
  const SyntheticTask task = make_task(sizes, topts, g.seed);
  const TrainingRun run = train(inst, parse_policy(args.policy), task, opts);
  if (args.out.empty() || args.out == "-") {
    write_training_csv(std::cout, run, task);
  } else {
    auto out = open_out(args.out);
    write_training_csv(out, run, task);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receive/transmit gain and data-size selection for over-the-air aggregation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--tol", g.tol, "relative tolerance for oracle pass/fail")->capture_default_str();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "optimise one instance");
  s->add_option("--instance", solve.instance, "instance JSON")->required();
  s->add_option("--policy", solve.policy, "PROPOSED, COP, TPC or AIRFEDSGD")->capture_default_str();
  s->add_option("--round", solve.round, "continuous or floor")->capture_default_str();
  s->add_option("--a", solve.a, "solve the inner problem at this receive gain only");
  s->add_option("--out", solve.out, "output JSON (default stdout)");

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "run a parameter sweep over all policies");
  w->add_option("--spec", sweep.spec, "sweep spec JSON")->required();
  w->add_option("--out", sweep.out, "output CSV")->required();
  w->add_option("--threads", sweep.threads, "worker threads")->capture_default_str();
  w->add_flag("--timing", sweep.timing, "fill runtime_ms (output no longer reproducible)");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "compare the solver against the grid oracle");
  o->add_option("--instances", oracle.dir, "directory of instance JSON files")->required();
  o->add_option("--out", oracle.out, "output CSV")->required();
  o->add_option("--points", oracle.points, "grid size")->capture_default_str();

  GenArgs gen;
  auto* gi = app.add_subcommand("gen-instance", "sample an instance with Rayleigh channels");
  gi->add_option("--k", gen.k, "number of devices")->capture_default_str();
  gi->add_option("--h-mean", gen.h_mean, "mean channel gain")->capture_default_str();
  gi->add_option("--b-max", gen.b_max, "transmit gain cap")->capture_default_str();
  gi->add_option("--c", gen.c, "gradient power")->capture_default_str();
  gi->add_option("--sigma2", gen.sigma2, "noise variance")->capture_default_str();
  auto* st = gi->add_option("--s-t", gen.s_t, "data threshold S_T (default min(40000, sum D))");
  gi->add_option("--st-fraction", gen.st_fraction, "S_T as a fraction of sum D")->excludes(st);
  gi->add_option("--out", gen.out, "output JSON (default stdout)");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "federated training over the simulated channel");
  t->add_option("--instance", tr.instance, "instance JSON (integer D)")->required();
  t->add_option("--policy", tr.policy, "allocation policy")->capture_default_str();
  t->add_option("--rounds", tr.rounds, "rounds T")->capture_default_str();
  t->add_option("--eta", tr.eta, "step size")->capture_default_str();
  t->add_option("--dim", tr.dim, "model dimension")->capture_default_str();
  t->add_option("--loss", tr.loss, "least-squares or logistic")->capture_default_str();
  t->add_option("--c", tr.c_mode, "gradient power for the optimiser: unit or empirical")
      ->capture_default_str();
  t->add_option("--out", tr.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*s) cmd_solve(solve);
    if (*w) cmd_sweep(sweep, g, seed_opt->count() > 0);
    if (*o) cmd_oracle(oracle, g);
    if (*gi) cmd_gen(gen, g);
    if (*t) cmd_train(tr, g);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalAnomaly& e) {
    std::cerr << "numerical anomaly: " << e.what() << '\n';
    return kExitAnomaly;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
