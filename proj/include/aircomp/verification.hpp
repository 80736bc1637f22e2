#pragma once
// Independent oracles. Deliberately slow and simple: a dense grid over a, a
// projected-gradient solver for the inner problem, a brute-force joint search
// for very small K, and sampled monotonicity/convexity probes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aircomp/model.hpp"

namespace aircomp {

struct OracleReport {
  std::string oracle;
  double best_value = 0.0;
  double best_point = 0.0;  ///< a at the oracle optimum
  double solver_value = 0.0;
  double rel_gap = 0.0;  ///< (solver - oracle) / oracle
  std::size_t samples = 0;
  bool pass = false;
};

struct GridBest {
  double a = 0.0;
  double E = 0.0;
  std::size_t samples = 0;
};

/// Half log-spaced (a_max * 1e-6 .. a_max), half uniform, plus every
/// breakpoint, interval threshold and a_max itself. Sorted, unique.
std::vector<double> grid_points(const ProblemInstance& inst, std::size_t n_points);

/// min E(a) over grid_points; ties keep the smaller a.
GridBest grid_search(const ProblemInstance& inst, std::size_t n_points);

/// grid_search compared against solve_global.
OracleReport grid_oracle(const ProblemInstance& inst, std::size_t n_points = 100000,
                         double rel_tol = 1e-3);

/// Euclidean projection onto {0 <= beta <= cap, sum beta = 1}, by bisection
/// on the shift t in sum_k clamp(v_k - t, 0, cap_k) = 1.
std::vector<double> project_capped_simplex(const std::vector<double>& v,
                                           const std::vector<double>& cap);

struct LowerOracleResult {
  std::vector<double> beta;
  std::vector<double> b;
  double E = 0.0;
  std::size_t iterations = 0;
};

/// Projected gradient on beta with b eliminated, step 1 / (2 max c).
LowerOracleResult lower_oracle(const ProblemInstance& inst, double a,
                               std::size_t max_iters = 100000);

/// Joint brute force for tiny K (<= 3): a on a uniform grid over
/// (0, a_hi], beta on a simplex lattice with step 1/n_beta, b eliminated.
GridBest brute_force(const ProblemInstance& inst, double a_hi, std::size_t n_a,
                     std::size_t n_beta);

struct SampleTriple {
  double x_lo = 0.0, x_mid = 0.0, x_hi = 0.0;
  double f_lo = 0.0, f_mid = 0.0, f_hi = 0.0;
};

enum class Trend { Any, NonIncreasing, NonDecreasing };

struct ProbeResult {
  std::size_t monotone_violations = 0;
  std::size_t convexity_violations = 0;
  std::size_t triples = 0;
  bool clean() const { return monotone_violations == 0 && convexity_violations == 0; }
};

ProbeResult probe_monotone_convex(const std::vector<SampleTriple>& samples, Trend trend,
                                  double tol = 1e-9);

/// n random midpoint triples inside [lo, hi], drawn from a seeded stream.
std::vector<SampleTriple> sample_triples(const std::function<double(double)>& fn, double lo,
                                         double hi, std::size_t n, std::uint64_t seed);

}  // namespace aircomp
