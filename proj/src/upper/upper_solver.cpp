#include "aircomp/upper_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "aircomp/errors.hpp"
#include "aircomp/verification.hpp"

namespace aircomp {
namespace {

// Membership of each listed device in the capped set at gain a.
void capped_flags(LowerLevel& level, const ProblemInstance& inst,
                  const std::vector<std::size_t>& devices, double a,
                  std::vector<unsigned char>& out) {
  const double lambda = level.lambda_star(a).value_or(0.0);
  out.resize(devices.size());
  for (std::size_t j = 0; j < devices.size(); ++j) {
    const auto& d = inst.devices[devices[j]];
    const double x = -lambda / (2.0 * d.c);
    const double g = x - (d.D / inst.S_T - a * d.h * d.b_max);
    out[j] = g > kCapMembershipTol ? 1 : 0;
  }
}

bool heterogeneous_c(const ProblemInstance& inst) {
  double lo = inst.devices.front().c;
  double hi = lo;
  for (const auto& d : inst.devices) {
    lo = std::min(lo, d.c);
    hi = std::max(hi, d.c);
  }
  return hi / lo > 1.0 + 1e-9;
}

}  // namespace

std::vector<double> F_values(const ProblemInstance& inst, double a) {
  LowerLevel level(inst);
  const double lambda = level.lambda_star(a).value_or(0.0);
  std::vector<double> x(inst.size(), 0.0);
  if (lambda == 0.0) return x;
  for (std::size_t k = 0; k < inst.size(); ++k) x[k] = -lambda / (2.0 * inst.devices[k].c);
  return x;
}

std::vector<SubInterval> subintervals(const ProblemInstance& inst, double lo, double hi,
                                      const SubIntervalOptions& opts) {
  if (!(hi > lo) || lo < 0.0) throw ValidationError("sub-interval search needs 0 <= lo < hi");
  if (opts.samples < 2) throw ValidationError("sub-interval search needs at least 2 samples");
  LowerLevel level(inst);
  const std::vector<std::size_t> k2 = partition(inst, 0.5 * (lo + hi)).k2;
  const std::size_t n = opts.samples;
  const double step = (hi - lo) / static_cast<double>(n);
  auto sample_at = [&](std::size_t i) { return lo + (static_cast<double>(i) + 0.5) * step; };

  std::vector<double> cuts;
  std::vector<std::size_t> flips(k2.size(), 0);
  std::vector<unsigned char> prev, cur, probe;
  capped_flags(level, inst, k2, sample_at(0), prev);
  for (std::size_t i = 1; i < n; ++i) {
    capped_flags(level, inst, k2, sample_at(i), cur);
    for (std::size_t j = 0; j < k2.size(); ++j) {
      if (cur[j] == prev[j]) continue;
      if (++flips[j] > 2) {
        throw NumericalAnomaly("device " + std::to_string(k2[j]) +
                               " changes cap membership more than twice on one interval");
      }
      double l = sample_at(i - 1);
      double r = sample_at(i);
      while (r - l > opts.boundary_tol) {
        const double m = 0.5 * (l + r);
        capped_flags(level, inst, k2, m, probe);
        (probe[j] == prev[j] ? l : r) = m;
      }
      cuts.push_back(r);
    }
    prev.swap(cur);
  }

  std::sort(cuts.begin(), cuts.end());
  std::vector<double> edges{lo};
  for (double c : cuts) {
    if (c > edges.back() + opts.boundary_tol && c < hi - opts.boundary_tol) edges.push_back(c);
  }
  edges.push_back(hi);

  std::vector<SubInterval> out;
  out.reserve(edges.size() - 1);
  std::vector<unsigned char> flags;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    SubInterval s;
    s.lo = edges[e];
    s.hi = edges[e + 1];
    capped_flags(level, inst, k2, 0.5 * (s.lo + s.hi), flags);
    for (std::size_t j = 0; j < k2.size(); ++j) (flags[j] ? s.capped : s.uncapped).push_back(k2[j]);
    out.push_back(std::move(s));
  }
  return out;
}

PieceMinimum minimize_interval(const ProblemInstance& inst, double lo, double hi,
                               double rel_tol) {
  LowerLevel level(inst);
  return minimize_interval(level, lo, hi, rel_tol);
}

PieceMinimum golden_section(const std::function<double(double)>& fn, double lo, double hi,
                            double rel_tol) {
  if (lo < 0.0 || hi < lo || !(hi > 0.0)) {
    throw ValidationError("golden search needs 0 <= lo <= hi with hi > 0");
  }
  PieceMinimum best;
  std::map<double, double> memo;
  auto E = [&](double a) {
    auto [it, fresh] = memo.try_emplace(a, 0.0);
    if (fresh) {
      it->second = fn(a);
      ++best.evaluations;
    }
    return it->second;
  };
  bool have = false;
  auto offer = [&](double a) {
    const double v = E(a);
    if (!have || v < best.E || (v == best.E && a < best.a)) {
      best.a = a;
      best.E = v;
      have = true;
    }
  };

  if (lo > 0.0) offer(lo);
  offer(hi);
  if (hi == lo) return best;

  constexpr double kInvPhi = 0.6180339887498948482;
  // Narrow pieces far from 0 cannot shrink below the spacing of doubles near hi.
  const double tol =
      std::max(rel_tol * (hi - lo), 8.0 * std::numeric_limits<double>::epsilon() * hi);
  double l = lo;
  double r = hi;
  double x1 = r - kInvPhi * (r - l);
  double x2 = l + kInvPhi * (r - l);
  double f1 = E(x1);
  double f2 = E(x2);
  for (int it = 0; it < 200 && r - l > tol; ++it) {
    if (f1 <= f2) {
      r = x2;
      x2 = x1;
      f2 = f1;
      x1 = r - kInvPhi * (r - l);
      f1 = E(x1);
    } else {
      l = x1;
      x1 = x2;
      f1 = f2;
      x2 = l + kInvPhi * (r - l);
      f2 = E(x2);
    }
  }
  offer(x1);
  offer(x2);
  return best;
}

PieceMinimum minimize_interval(LowerLevel& level, double lo, double hi, double rel_tol) {
  return golden_section([&level](double a) { return level.value(a); }, lo, hi, rel_tol);
}

GlobalSolution solve_global(const ProblemInstance& inst, const UpperOptions& opts) {
  require_valid(inst);
  LowerLevel level(inst);

  struct Candidate {
    double a;
    double E;
    std::string tag;
  };
  std::optional<Candidate> best;
  auto offer = [&](double a, double E, std::string tag) {
    if (!best || E < best->E || (E == best->E && a < best->a)) best = Candidate{a, E, std::move(tag)};
  };

  bool fallback = false;
  try {
    const IntervalLayout layout = interval_layout(inst);
    for (std::size_t m = 0; m < layout.intervals.size(); ++m) {
      const GainInterval& iv = layout.intervals[m];
      if (iv.has_descent_part()) {
        const auto pieces = subintervals(inst, iv.lo, iv.split(), opts.sub);
        for (std::size_t j = 0; j < pieces.size(); ++j) {
          const PieceMinimum pm =
              minimize_interval(level, pieces[j].lo, pieces[j].hi, opts.golden_rel_tol);
          offer(pm.a, pm.E, "B" + std::to_string(m) + "." + std::to_string(j));
        }
      }
      if (iv.has_floor_part()) {
        const double a = iv.split();
        offer(a, level.value(a), "C" + std::to_string(m));
      }
    }
    offer(layout.a_max, level.value(layout.a_max), "a_max");
  } catch (const NumericalAnomaly&) {
    const GridBest g = grid_search(inst, opts.check_grid_points);
    best = Candidate{g.a, g.E, "grid"};
    fallback = true;
  }

  if (!fallback && heterogeneous_c(inst)) {
    const GridBest g = grid_search(inst, opts.check_grid_points);
    if (g.E < best->E) {
      best = Candidate{g.a, g.E, "grid"};
      fallback = true;
    }
  }

  GlobalSolution out;
  out.a_star = best->a;
  out.lower = level.solve(best->a);
  out.S = S_from_beta(out.lower.beta, inst, Rounding::Continuous);
  out.mse = out.lower.E;
  out.provenance = best->tag;
  out.fallback = fallback;
  return out;
}

}  // namespace aircomp
