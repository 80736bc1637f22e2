#include <algorithm>
#include <numeric>

#include "aircomp/upper_solver.hpp"

namespace aircomp {

double GainInterval::split() const { return std::clamp(a_th, lo, hi); }

IntervalLayout interval_layout(const ProblemInstance& inst) {
  require_valid(inst);
  const std::size_t K = inst.size();
  std::vector<double> s(K), cap(K), gain(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& d = inst.devices[k];
    cap[k] = d.D / inst.S_T;
    gain[k] = d.h * d.b_max;
    s[k] = cap[k] / gain[k];
  }

  IntervalLayout out;
  out.order.resize(K);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t i, std::size_t j) { return s[i] < s[j]; });
  out.breakpoints.reserve(K);
  for (std::size_t k : out.order) out.breakpoints.push_back(s[k]);

  // a_max: first breakpoint at which the K1 cap sum strictly exceeds 1.
  // Equal breakpoints join K1 together.
  out.a_max = out.breakpoints.back();
  double cum = 0.0;
  for (std::size_t j = 0; j < K;) {
    const double v = out.breakpoints[j];
    while (j < K && out.breakpoints[j] == v) cum += cap[out.order[j++]];
    if (cum > 1.0) {
      out.a_max = v;
      break;
    }
  }

  // One interval per distinct breakpoint value below a_max.
  double total_gain = 0.0;
  for (double g : gain) total_gain += g;
  double lo = 0.0;
  std::size_t n1 = 0;
  double k1_cap = 0.0;
  double k1_gain = 0.0;
  while (lo < out.a_max) {
    while (n1 < K && out.breakpoints[n1] <= lo) {
      k1_cap += cap[out.order[n1]];
      k1_gain += gain[out.order[n1]];
      ++n1;
    }
    const double hi = n1 < K ? std::min(out.breakpoints[n1], out.a_max) : out.a_max;
    GainInterval iv;
    iv.lo = lo;
    iv.hi = hi;
    iv.n_k1 = n1;
    iv.n_k2 = K - n1;
    iv.a_th = iv.n_k2 == 0 ? 0.0 : (1.0 - k1_cap) / (total_gain - k1_gain);
    out.intervals.push_back(iv);
    lo = hi;
  }
  return out;
}

}  // namespace aircomp
