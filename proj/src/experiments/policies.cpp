#include <algorithm>
#include <cctype>
#include <string>

#include "aircomp/errors.hpp"
#include "aircomp/experiments.hpp"
#include "aircomp/upper_solver.hpp"

namespace aircomp {
namespace {

constexpr std::size_t kBaselineGrid = 1000;

WeightVector full_data_weights(const ProblemInstance& inst) {
  const double total = inst.total_data();
  WeightVector w;
  for (const auto& d : inst.devices) w.beta.push_back(d.D / total);
  return w;
}

std::vector<double> full_data(const ProblemInstance& inst) {
  std::vector<double> S;
  for (const auto& d : inst.devices) S.push_back(d.D);
  return S;
}

// Receive gain minimising the MSE of channel inversion capped at b_max with
// beta = D / sum D. The objective sum_k c_k max(beta_k - a h_k b_max_k, 0)^2
// + a^2 sigma^2 is convex in a and equals a^2 sigma^2 past the bound, so the
// search is confined to (0, full_data_gain_bound].
Allocation inversion_policy(const ProblemInstance& inst) {
  const WeightVector w = full_data_weights(inst);
  auto f = [&](double a) { return mse_beta(inst, a, eliminate_b(inst, a, w), w); };
  const double hi = full_data_gain_bound(inst);

  std::size_t best_i = 1;
  double best_f = f(hi / kBaselineGrid);
  for (std::size_t i = 2; i <= kBaselineGrid; ++i) {
    const double v = f(hi * static_cast<double>(i) / kBaselineGrid);
    if (v < best_f) {
      best_f = v;
      best_i = i;
    }
  }
  const double lo_b = hi * static_cast<double>(best_i - 1) / kBaselineGrid;
  const double hi_b = hi * static_cast<double>(std::min(best_i + 1, kBaselineGrid)) / kBaselineGrid;
  const PieceMinimum pm = golden_section(f, lo_b, hi_b);

  Allocation out;
  out.a = pm.a;
  out.b = eliminate_b(inst, pm.a, w);
  out.S = full_data(inst);
  out.mse = mse(inst, out.a, out.b, out.S);
  return out;
}

}  // namespace

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::Proposed: return "PROPOSED";
    case Policy::Cop: return "COP";
    case Policy::Tpc: return "TPC";
    case Policy::AirFedSgd: return "AIRFEDSGD";
  }
  return "UNKNOWN";
}

Policy parse_policy(std::string_view name) {
  std::string up(name);
  for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (Policy p : kAllPolicies) {
    if (to_string(p) == up) return p;
  }
  throw ValidationError("unknown policy '" + std::string(name) +
                        "' (expected PROPOSED, COP, TPC or AIRFEDSGD)");
}

double full_data_gain_bound(const ProblemInstance& inst) {
  const double total = inst.total_data();
  double bound = 0.0;
  for (const auto& d : inst.devices) bound = std::max(bound, (d.D / total) / (d.h * d.b_max));
  return bound;
}

Allocation run_policy(const ProblemInstance& inst, Policy policy) {
  require_valid(inst);
  switch (policy) {
    case Policy::Proposed: {
      const GlobalSolution g = solve_global(inst);
      Allocation out;
      out.a = g.a_star;
      out.b = g.lower.b;
      out.S = g.S;
      out.mse = mse(inst, out.a, out.b, out.S);
      return out;
    }
    case Policy::Cop:
    case Policy::Tpc:
      return inversion_policy(inst);
    case Policy::AirFedSgd: {
      const WeightVector w = full_data_weights(inst);
      const double K = static_cast<double>(inst.size());
      Allocation out;
      out.a = 1.0 / K;
      for (std::size_t k = 0; k < inst.size(); ++k) {
        const auto& d = inst.devices[k];
        out.b.push_back(std::min(d.b_max, K * w.beta[k] / d.h));
      }
      out.S = full_data(inst);
      out.mse = mse(inst, out.a, out.b, out.S);
      return out;
    }
  }
  throw ValidationError("unknown policy");
}

}  // namespace aircomp
