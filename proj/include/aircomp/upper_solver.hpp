#pragma once
// Outer problem: minimise E(a) over a > 0.
//
// The breakpoints s_k = beta_max_k / (h_k b_max_k) cut (0, inf) into
// intervals on which the K1/K2 partition is fixed. Beyond a_max (the first
// breakpoint where sum_{K1} beta_max exceeds 1) E(a) = a^2 sigma^2, so the
// search stops there. Each interval [l, r) splits at its threshold a_th into
// a descent part B = [l, a_th), where the water-filling branch is active,
// and C = [a_th, r), where E(a) = a^2 sigma^2. B is further cut where devices
// enter or leave their beta cap; E is convex on each resulting piece and is
// minimised there by golden-section search.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "aircomp/lower_solver.hpp"
#include "aircomp/model.hpp"

namespace aircomp {

struct GainInterval {
  double lo = 0.0;  ///< inclusive, except lo == 0 for the first interval
  double hi = 0.0;  ///< exclusive
  std::size_t n_k1 = 0;
  std::size_t n_k2 = 0;
  double a_th = 0.0;  ///< threshold of this interval's partition (0 if K2 empty)

  /// Boundary between the descent part B = [lo, split) and C = [split, hi).
  double split() const;
  bool has_descent_part() const { return split() > lo; }
  bool has_floor_part() const { return split() < hi; }
};

struct IntervalLayout {
  std::vector<double> breakpoints;   ///< s_(1) <= ... <= s_(K)
  std::vector<std::size_t> order;    ///< device index of each sorted breakpoint
  double a_max = 0.0;
  std::vector<GainInterval> intervals;  ///< tile (0, a_max)
};

IntervalLayout interval_layout(const ProblemInstance& inst);

/// Water-level slack x_k(a) = -lambda*(a) / (2 c_k) for every device; all
/// zeros when the bisection branch does not apply at a.
std::vector<double> F_values(const ProblemInstance& inst, double a);

/// Membership tolerance: k is capped (beta_k = beta_max_k) when
/// x_k(a) - (beta_max_k - a h_k b_max_k) exceeds this. Tangency and the
/// identity x_k = beta_max_k - a h_k b_max_k count as uncapped.
inline constexpr double kCapMembershipTol = 1e-9;

struct SubInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> capped;    ///< K2 devices with beta_k = beta_max_k
  std::vector<std::size_t> uncapped;  ///< K2 devices with beta_k < beta_max_k
};

struct SubIntervalOptions {
  std::size_t samples = 256;
  double boundary_tol = 1e-10;
};

/// Cuts a descent part [lo, hi) into pieces with constant capped/uncapped
/// membership. Crossings are located on a uniform grid and refined by
/// bisection. Throws NumericalAnomaly if one device changes membership more
/// than twice.
std::vector<SubInterval> subintervals(const ProblemInstance& inst, double lo, double hi,
                                      const SubIntervalOptions& opts = {});

struct PieceMinimum {
  double a = 0.0;
  double E = 0.0;
  std::size_t evaluations = 0;
};

/// Golden-section search for the minimum of a unimodal fn on [lo, hi] to
/// width rel_tol * (hi - lo). Values are memoised per point. Both endpoints
/// are candidates, except lo when lo == 0. Ties resolve toward the smaller x.
PieceMinimum golden_section(const std::function<double(double)>& fn, double lo, double hi,
                            double rel_tol = 1e-10);

/// Golden-section search for min E(a) on [lo, hi] (lo may be 0, in which case
/// the left endpoint is excluded) to width rel_tol * (hi - lo). Endpoints are
/// kept as candidates. Ties resolve toward the smaller a.
PieceMinimum minimize_interval(const ProblemInstance& inst, double lo, double hi,
                               double rel_tol = 1e-10);
PieceMinimum minimize_interval(LowerLevel& level, double lo, double hi, double rel_tol = 1e-10);

struct UpperOptions {
  SubIntervalOptions sub;
  double golden_rel_tol = 1e-10;
  /// Grid size for the heterogeneous-c cross-check and the anomaly fallback.
  std::size_t check_grid_points = 10000;
};

struct GlobalSolution {
  double a_star = 0.0;
  LowerSolution lower;
  std::vector<double> S;
  double mse = 0.0;
  std::string provenance;  ///< e.g. "B0.1", "C2", "a_max", "grid"
  bool fallback = false;   ///< true when the answer came from grid search
};

GlobalSolution solve_global(const ProblemInstance& inst, const UpperOptions& opts = {});

}  // namespace aircomp
