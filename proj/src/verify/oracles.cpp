#include "aircomp/verification.hpp"

#include <algorithm>
#include <cmath>

#include "aircomp/errors.hpp"
#include "aircomp/lower_solver.hpp"
#include "aircomp/rng.hpp"
#include "aircomp/upper_solver.hpp"

namespace aircomp {

std::vector<double> grid_points(const ProblemInstance& inst, std::size_t n_points) {
  if (n_points < 2) throw ValidationError("grid needs at least 2 points");
  const IntervalLayout layout = interval_layout(inst);
  const double a_max = layout.a_max;
  const std::size_t n_log = n_points / 2;
  const std::size_t n_lin = n_points - n_log;

  std::vector<double> pts;
  pts.reserve(n_points + layout.breakpoints.size() + layout.intervals.size() + 1);
  for (std::size_t i = 0; i < n_log; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_log - 1);
    pts.push_back(a_max * std::pow(10.0, -6.0 + 6.0 * t));
  }
  for (std::size_t i = 1; i <= n_lin; ++i) {
    pts.push_back(a_max * static_cast<double>(i) / static_cast<double>(n_lin));
  }
  for (double s : layout.breakpoints) {
    if (s <= a_max) pts.push_back(s);
  }
  for (const auto& iv : layout.intervals) {
    if (iv.a_th > 0.0 && iv.a_th <= a_max) pts.push_back(iv.a_th);
  }
  pts.push_back(a_max);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

GridBest grid_search(const ProblemInstance& inst, std::size_t n_points) {
  LowerLevel level(inst);
  GridBest best;
  bool have = false;
  for (double a : grid_points(inst, n_points)) {
    const double E = level.value(a);
    ++best.samples;
    if (!have || E < best.E) {  // ascending a, so strict < keeps the smaller a
      best.a = a;
      best.E = E;
      have = true;
    }
  }
  return best;
}

OracleReport grid_oracle(const ProblemInstance& inst, std::size_t n_points, double rel_tol) {
  const GridBest g = grid_search(inst, n_points);
  OracleReport r;
  r.oracle = "grid";
  r.best_value = g.E;
  r.best_point = g.a;
  r.samples = g.samples;
  r.solver_value = solve_global(inst).mse;
  r.rel_gap = (r.solver_value - r.best_value) / r.best_value;
  r.pass = std::abs(r.rel_gap) <= rel_tol;
  return r;
}

std::vector<double> project_capped_simplex(const std::vector<double>& v,
                                           const std::vector<double>& cap) {
  if (v.size() != cap.size() || v.empty()) throw ValidationError("projection size mismatch");
  double cap_sum = 0.0;
  for (double c : cap) cap_sum += c;
  if (cap_sum < 1.0 - kFeasTol) throw ValidationError("caps sum below 1; set is empty");

  auto mass = [&](double t) {
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += std::clamp(v[k] - t, 0.0, cap[k]);
    return s;
  };
  // mass(lo) >= min(cap_sum, 1) = 1 and mass(hi) = 0.
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::clamp(v[k] - t, 0.0, cap[k]);
  return out;
}

LowerOracleResult lower_oracle(const ProblemInstance& inst, double a, std::size_t max_iters) {
  require_valid(inst);
  if (!(a > 0.0)) throw ValidationError("receive gain a must be positive");
  const std::size_t K = inst.size();
  const std::vector<double> cap = beta_max(inst);

  // With b eliminated the residual of device k is -max(beta_k - a h_k b_max_k, 0).
  std::vector<double> reach(K);
  double c_max = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    reach[k] = a * inst.devices[k].h * inst.devices[k].b_max;
    c_max = std::max(c_max, inst.devices[k].c);
  }
  const double step = 1.0 / (2.0 * c_max);

  double cap_sum = 0.0;
  for (double c : cap) cap_sum += c;
  std::vector<double> beta(K), trial(K);
  for (std::size_t k = 0; k < K; ++k) beta[k] = cap[k] / cap_sum;

  LowerOracleResult r;
  for (; r.iterations < max_iters; ++r.iterations) {
    for (std::size_t k = 0; k < K; ++k) {
      const double grad = 2.0 * inst.devices[k].c * std::max(beta[k] - reach[k], 0.0);
      trial[k] = beta[k] - step * grad;
    }
    trial = project_capped_simplex(trial, cap);
    double move = 0.0;
    for (std::size_t k = 0; k < K; ++k) move = std::max(move, std::abs(trial[k] - beta[k]));
    beta.swap(trial);
    if (move < 1e-15) {
      ++r.iterations;
      break;
    }
  }
  r.beta = beta;
  WeightVector w{beta};
  r.b = eliminate_b(inst, a, w);
  r.E = mse_beta(inst, a, r.b, w);
  return r;
}

GridBest brute_force(const ProblemInstance& inst, double a_hi, std::size_t n_a,
                     std::size_t n_beta) {
  require_valid(inst);
  const std::size_t K = inst.size();
  if (K > 3) throw ValidationError("brute force supports K <= 3");
  if (n_a == 0 || n_beta == 0) throw ValidationError("brute force needs a non-empty lattice");
  const std::vector<double> cap = beta_max(inst);

  // Simplex lattice points with step 1/n_beta that respect the caps.
  std::vector<std::vector<double>> lattice;
  auto emit = [&](const std::vector<std::size_t>& counts) {
    std::vector<double> beta(K);
    for (std::size_t k = 0; k < K; ++k) {
      beta[k] = static_cast<double>(counts[k]) / static_cast<double>(n_beta);
      if (beta[k] > cap[k] + kFeasTol) return;
    }
    lattice.push_back(std::move(beta));
  };
  if (K == 1) {
    emit({n_beta});
  } else if (K == 2) {
    for (std::size_t i = 0; i <= n_beta; ++i) emit({i, n_beta - i});
  } else {
    for (std::size_t i = 0; i <= n_beta; ++i) {
      for (std::size_t j = 0; i + j <= n_beta; ++j) emit({i, j, n_beta - i - j});
    }
  }

  GridBest best;
  bool have = false;
  for (std::size_t ia = 1; ia <= n_a; ++ia) {
    const double a = a_hi * static_cast<double>(ia) / static_cast<double>(n_a);
    for (const auto& beta : lattice) {
      WeightVector w{beta};
      const double E = mse_beta(inst, a, eliminate_b(inst, a, w), w);
      ++best.samples;
      if (!have || E < best.E) {
        best.a = a;
        best.E = E;
        have = true;
      }
    }
  }
  return best;
}

ProbeResult probe_monotone_convex(const std::vector<SampleTriple>& samples, Trend trend,
                                  double tol) {
  ProbeResult r;
  r.triples = samples.size();
  for (const auto& s : samples) {
    bool mono_bad = false;
    if (trend == Trend::NonIncreasing) {
      mono_bad = s.f_mid > s.f_lo + tol || s.f_hi > s.f_mid + tol;
    } else if (trend == Trend::NonDecreasing) {
      mono_bad = s.f_mid < s.f_lo - tol || s.f_hi < s.f_mid - tol;
    }
    if (mono_bad) ++r.monotone_violations;
    // Midpoint convexity, interpolating in case x_mid is not the exact midpoint.
    const double w = (s.x_mid - s.x_lo) / (s.x_hi - s.x_lo);
    if (s.f_mid > (1.0 - w) * s.f_lo + w * s.f_hi + tol) ++r.convexity_violations;
  }
  return r;
}

std::vector<SampleTriple> sample_triples(const std::function<double(double)>& fn, double lo,
                                         double hi, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 0x7269706c65ULL);
  std::vector<SampleTriple> out;
  out.reserve(n);
  while (out.size() < n) {
    double p = lo + (hi - lo) * rng.uniform();
    double q = lo + (hi - lo) * rng.uniform();
    if (p > q) std::swap(p, q);
    if (!(q > p) || p <= lo) continue;
    SampleTriple s;
    s.x_lo = p;
    s.x_hi = q;
    s.x_mid = 0.5 * (p + q);
    s.f_lo = fn(s.x_lo);
    s.f_mid = fn(s.x_mid);
    s.f_hi = fn(s.x_hi);
    out.push_back(s);
  }
  return out;
}

}  // namespace aircomp
