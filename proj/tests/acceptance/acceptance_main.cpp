// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aircomp/errors.hpp"
#include "aircomp/experiments.hpp"
#include "aircomp/fl_sim.hpp"
#include "aircomp/lower_solver.hpp"
#include "aircomp/upper_solver.hpp"
#include "aircomp/verification.hpp"

namespace fs = std::filesystem;
using namespace aircomp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ProblemInstance random_instance(std::size_t K, std::uint64_t seed, double st_fraction) {
  const auto h = sample_channels(K, kDefaultHMean, seed);
  ProblemInstance inst;
  inst.sigma2 = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    inst.devices.push_back({h[k], kDefaultBMax, 1.0, default_dataset_sizes()[k % 20]});
  }
  inst.S_T = st_fraction * inst.total_data();
  return inst;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. solve_global vs the 1e5-point grid on 200 random instances.
Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t fails = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto inst = random_instance(2 + i % 5, 10000 + i, 0.8);
    const OracleReport r = grid_oracle(inst, 100000, 1e-3);
    worst = std::max(worst, std::abs(r.rel_gap));
    if (std::abs(r.rel_gap) > 1e-3) ++fails;
  }
  const double secs = seconds_since(t0);
  return {fails == 0 && secs < 60.0,
          "max |rel gap| " + fmt("%.3g", worst) + ", " + std::to_string(fails) +
              " over 1e-3, " + fmt("%.2f", secs) + " s (limit 60 s)"};
}

// 2. KKT residuals of solve_lower on 1000 random (instance, a) pairs.
Outcome kkt_certification() {
  CounterRng rng(77, 1);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto inst = random_instance(2 + i % 9, 20000 + i, 0.3 + 0.65 * rng.uniform());
    const double a_max = interval_layout(inst).a_max;
    const double a = a_max * std::pow(10.0, -3.0 + 3.3 * rng.uniform());
    const auto sol = solve_lower(inst, a);
    worst = std::max(worst, kkt_certify(inst, a, sol).max_residual());
  }
  return {worst <= 1e-8, "max residual " + fmt("%.3g", worst) + " (limit 1e-8)"};
}

// 3. E(a) = a^2 sigma^2 wherever the partition says a >= a_th or sum_{K1} beta_max > 1.
Outcome analytic_floors() {
  CounterRng rng(78, 1);
  double worst = 0.0;
  std::size_t hits = 0, cap_hits = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto inst = random_instance(1 + i % 8, 30000 + i, 0.3 + 0.7 * rng.uniform());
    inst.sigma2 = 0.25 + 2.0 * rng.uniform();
    const double a_max = interval_layout(inst).a_max;
    for (int j = 0; j < 20; ++j) {
      const double a = a_max * 2.0 * rng.uniform() + 1e-9;
      const Partition part = partition(inst, a);
      double k1_caps = 0.0;
      for (std::size_t k : part.k1) k1_caps += inst.devices[k].D / inst.S_T;
      if (!(k1_caps > 1.0 || a >= a_threshold(inst, part))) continue;
      ++hits;
      if (k1_caps > 1.0) ++cap_hits;
      const double floor = a * a * inst.sigma2;
      worst = std::max(worst, std::abs(solve_lower(inst, a).E - floor) / floor);
    }
  }
  return {hits > cap_hits && cap_hits > 0 && worst <= 1e-12,
          std::to_string(hits) + " floor points (" + std::to_string(cap_hits) +
              " with K1 caps > 1), max rel error " + fmt("%.3g", worst) +
              " (limit 1e-12)"};
}

// 4. Closed-form micro-instances.
Outcome micro_instances() {
  const ProblemInstance one{{{1, 1, 1, 100}}, 100.0, 1.0};
  const ProblemInstance two{{{1, 1, 1, 100}, {1, 1, 1, 100}}, 125.0, 1.0};
  const auto g1 = solve_global(one);
  const auto g2 = solve_global(two);
  const double err = std::max({std::abs(g1.a_star - 0.5), std::abs(g1.mse - 0.5),
                               std::abs(g2.a_star - 1.0 / 3.0), std::abs(g2.mse - 1.0 / 6.0)});
  return {err <= 1e-6, "K=1 a*=" + fmt("%.9f", g1.a_star) + " mse=" + fmt("%.9f", g1.mse) +
                           "; K=2 a*=" + fmt("%.9f", g2.a_star) + " mse=" +
                           fmt("%.9f", g2.mse) + "; max error " + fmt("%.2g", err)};
}

// Rows of run_sweep are laid out [value][trial][policy].
struct SweepView {
  const SweepSpec& spec;
  const std::vector<SweepRow>& rows;
  double mse(std::size_t v, std::size_t t, std::size_t p) const {
    return rows[(v * spec.trials + t) * kAllPolicies.size() + p].mse;
  }
};

std::size_t trend_violations(const SweepView& s, std::size_t p, int sign, double tol) {
  std::size_t bad = 0;
  for (std::size_t t = 0; t < s.spec.trials; ++t) {
    for (std::size_t v = 1; v < s.spec.values.size(); ++v) {
      const double d = s.mse(v, t, p) - s.mse(v - 1, t, p);
      if (sign * d < -tol) ++bad;
    }
  }
  return bad;
}

std::size_t dominance_violations(const SweepView& s, double tol) {
  std::size_t bad = 0;
  for (std::size_t v = 0; v < s.spec.values.size(); ++v) {
    for (std::size_t t = 0; t < s.spec.trials; ++t) {
      const double p = s.mse(v, t, 0), c = s.mse(v, t, 1), tp = s.mse(v, t, 2),
                   f = s.mse(v, t, 3);
      if (p > c + tol || c > tp + tol || c > f + tol) ++bad;
    }
  }
  return bad;
}

// 5. Sweep trends at desk scale.
Outcome sweep_trends() {
  constexpr double tol = 1e-9;
  const double total = [] {
    double s = 0.0;
    for (double d : default_dataset_sizes()) s += d;
    return s;
  }();
  std::size_t bad = 0;
  std::ostringstream why;

  SweepSpec st;
  st.axis = SweepAxis::ST;
  st.values = {20000, 30000, 40000, 50000, 60000, 70000, total};
  st.trials = 10;
  st.seed = 2024;
  const auto st_rows = run_sweep(st, {4});
  const SweepView sv{st, st_rows};
  const std::size_t st_mono = trend_violations(sv, 0, +1, tol);
  std::size_t cop_const = 0, equal_end = 0;
  for (std::size_t t = 0; t < st.trials; ++t) {
    for (std::size_t v = 1; v < st.values.size(); ++v) {
      if (std::abs(sv.mse(v, t, 1) - sv.mse(0, t, 1)) > tol) ++cop_const;
    }
    if (std::abs(sv.mse(st.values.size() - 1, t, 0) - sv.mse(st.values.size() - 1, t, 1)) > tol) {
      ++equal_end;
    }
  }
  why << "S_T: " << st_mono << " non-monotone, " << cop_const << " COP changes, " << equal_end
      << " unequal at S_T=sum D; ";

  SweepSpec ks;
  ks.axis = SweepAxis::K;
  ks.values = {11, 12, 14, 16, 18, 20, 25, 30};
  ks.trials = 10;
  ks.seed = 2025;
  const auto k_rows = run_sweep(ks, {4});
  const SweepView kv{ks, k_rows};
  const std::size_t k_mono = trend_violations(kv, 0, -1, tol);
  why << "K: " << k_mono << " non-monotone; ";

  SweepSpec ss;
  ss.axis = SweepAxis::Sigma2;
  ss.values = {0.25, 0.5, 1, 2, 4};
  ss.trials = 10;
  ss.seed = 2026;
  const auto s_rows = run_sweep(ss, {4});
  const SweepView nv{ss, s_rows};
  std::size_t s_mono = 0;
  for (std::size_t p = 0; p < kAllPolicies.size(); ++p) s_mono += trend_violations(nv, p, +1, tol);
  why << "sigma2: " << s_mono << " non-monotone; ";

  const std::size_t dom =
      dominance_violations(sv, tol) + dominance_violations(kv, tol) + dominance_violations(nv, tol);
  why << "dominance: " << dom << " violations";

  bad = st_mono + cop_const + equal_end + k_mono + s_mono + dom;
  return {bad == 0, why.str()};
}

// 6. x_k(a) non-increasing and midpoint-convex on every descent region.
Outcome structure_probes() {
  std::size_t triples = 0, mono = 0, conv = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto inst = random_instance(2 + i % 9, 40000 + i, 0.4 + 0.01 * static_cast<double>(i));
    const IntervalLayout layout = interval_layout(inst);
    std::vector<const GainInterval*> regions;
    for (const auto& iv : layout.intervals) {
      if (iv.has_descent_part() && iv.split() - iv.lo > 1e-9) regions.push_back(&iv);
    }
    if (regions.empty()) continue;
    const std::size_t per_region = (100 + regions.size() - 1) / regions.size();
    std::size_t taken = 0;
    for (std::size_t r = 0; r < regions.size() && taken < 100; ++r) {
      const double w = regions[r]->split() - regions[r]->lo;
      const double lo = regions[r]->lo + 1e-9 * w;
      const double hi = regions[r]->split() - 1e-9 * w;
      const std::size_t n = std::min(per_region, 100 - taken);
      for (std::size_t k = 0; k < inst.size(); ++k) {
        auto fn = [&inst, k](double a) { return F_values(inst, a)[k]; };
        const auto p = probe_monotone_convex(sample_triples(fn, lo, hi, n, i * 131 + r),
                                             Trend::NonIncreasing, 1e-9);
        mono += p.monotone_violations;
        conv += p.convexity_violations;
        triples += p.triples;
      }
      taken += n;
    }
  }
  return {mono == 0 && conv == 0 && triples > 0,
          std::to_string(triples) + " device triples, " + std::to_string(mono) +
              " monotonicity and " + std::to_string(conv) + " convexity violations"};
}

// 7. FL simulation properties.
Outcome fl_properties() {
  std::ostringstream why;
  bool ok = true;

  // (a) Exact offset with a silent channel equals centralized gradient descent.
  {
    const std::vector<std::size_t> sizes{40, 25, 35, 50};
    const auto task = make_task(sizes, {}, 5);
    ProblemInstance inst;
    inst.sigma2 = 1.0;
    const auto h = sample_channels(sizes.size(), kDefaultHMean, 6);
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      inst.devices.push_back({h[k], kDefaultBMax, 1.0, static_cast<double>(sizes[k])});
    }
    inst.S_T = inst.total_data();
    Allocation alloc;
    alloc.a = 0.2;
    for (const auto& d : inst.devices) {
      alloc.b.push_back(d.D / inst.total_data() / (alloc.a * d.h));
      alloc.S.push_back(d.D);
    }
    TrainOptions opts;
    opts.rounds = 200;
    opts.channel_sigma2 = 0.0;
    const auto run = train_with_allocation(inst, alloc, task, opts);
    std::vector<double> w(task.dim, 0.0);
    double worst = 0.0;
    for (std::size_t t = 0; t < opts.rounds; ++t) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        worst = std::max(worst, std::abs(run.rounds[t].w[i] - w[i]));
      }
      const auto g = task.global_gradient(w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= opts.eta * g[i];
    }
    for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(run.w_final[i] - w[i]));
    ok = ok && worst <= 1e-10;
    why << "noise-free max deviation " << fmt("%.3g", worst) << " (limit 1e-10); ";
  }

  // (b) Fixed orthogonal gradients with ||g_k||^2 / N = 1.
  {
    const std::size_t N = 1000;
    const auto inst = random_instance(6, 77, 0.6);
    const auto g = solve_global(inst);
    std::vector<std::vector<double>> grads(inst.size(), std::vector<double>(N, 0.0));
    std::vector<double> h;
    for (std::size_t k = 0; k < inst.size(); ++k) {
      grads[k][k] = std::sqrt(static_cast<double>(N));
      h.push_back(inst.devices[k].h);
    }
    const auto z = ideal_aggregate(grads, g.S);
    double acc = 0.0;
    const std::size_t reps = 400;
    for (std::size_t r = 0; r < reps; ++r) {
      CounterRng rng(91, r);
      const auto zh = ota_aggregate(grads, h, g.a_star, g.lower.b, inst.sigma2, rng);
      double e = 0.0;
      for (std::size_t i = 0; i < N; ++i) e += (zh[i] - z[i]) * (zh[i] - z[i]);
      acc += e / static_cast<double>(N);
    }
    const double analytic = mse(inst, g.a_star, g.lower.b, g.S);
    const double rel = std::abs(acc / reps - analytic) / analytic;
    ok = ok && rel <= 0.05;
    why << "controlled error vs analytic " << fmt("%.3g", rel) << " (limit 0.05); ";
  }

  // (c) PROPOSED vs COP final loss over 50 seeds.
  {
    std::size_t wins = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const std::size_t K = 10;
      const auto h = sample_channels(K, kDefaultHMean, 1000 + s);
      ProblemInstance inst;
      inst.sigma2 = 1.0;
      std::vector<std::size_t> sizes;
      for (std::size_t k = 0; k < K; ++k) {
        const double D = std::round(default_dataset_sizes()[k] / 40.0);
        sizes.push_back(static_cast<std::size_t>(D));
        inst.devices.push_back({h[k], kDefaultBMax, 1.0, D});
      }
      inst.S_T = 0.5 * inst.total_data();
      const auto task = make_task(sizes, {}, 2000 + s);
      TrainOptions opts;
      opts.rounds = 200;
      opts.eta = 0.05;
      opts.seed = 3000 + s;
      opts.keep_vectors = false;
      const double p = train(inst, Policy::Proposed, task, opts).final_loss;
      const double c = train(inst, Policy::Cop, task, opts).final_loss;
      if (p <= c) ++wins;
    }
    ok = ok && wins >= 35;
    why << "PROPOSED <= COP on " << wins << "/50 seeds (need 35)";
  }
  return {ok, why.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + AIRCOMP_CLI_PATH + "\" " + args;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// 8. Byte-identical sweep CSVs, serial and parallel, library and CLI.
Outcome determinism() {
  SweepSpec spec;
  spec.axis = SweepAxis::ST;
  spec.values = {25000, 40000, 55000, 70000};
  spec.trials = 6;
  spec.seed = 99;
  auto csv = [&](std::size_t threads) {
    std::ostringstream out;
    write_sweep_csv(out, spec, run_sweep(spec, {threads}), false);
    return out.str();
  };
  const std::string serial = csv(1);
  const bool lib_ok = serial == csv(1) && serial == csv(4) && serial == csv(7);

  const fs::path dir = fs::path(AIRCOMP_TEST_TMP) / "acceptance";
  fs::create_directories(dir);
  const fs::path spec_path = dir / "spec.json";
  std::ofstream(spec_path) << to_json(spec).dump(2) << '\n';
  std::vector<std::string> outs;
  bool cli_ok = true;
  for (const char* threads : {"1", "1", "4"}) {
    const fs::path out = dir / ("sweep_" + std::to_string(outs.size()) + ".csv");
    cli_ok = cli_ok && run_cli("sweep --spec " + spec_path.string() + " --out " + out.string() +
                               " --threads " + threads) == 0;
    outs.push_back(slurp(out));
  }
  cli_ok = cli_ok && outs[0] == outs[1] && outs[0] == outs[2] && outs[0] == serial;
  return {lib_ok && cli_ok, std::string("library ") + (lib_ok ? "identical" : "DIFFERS") +
                                ", CLI " + (cli_ok ? "identical" : "DIFFERS") + " (" +
                                std::to_string(serial.size()) + " bytes)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"1 oracle equivalence", oracle_equivalence},
      {"2 KKT certification", kkt_certification},
      {"3 analytic floors", analytic_floors},
      {"4 closed-form micro-instances", micro_instances},
      {"5 sweep trends", sweep_trends},
      {"6 structure probes", structure_probes},
      {"7 FL simulation properties", fl_properties},
      {"8 determinism", determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " ["
              << fmt("%.2f", seconds_since(t0)) << " s]" << std::endl;
  }
  return all ? 0 : 1;
}
