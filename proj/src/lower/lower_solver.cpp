#include "aircomp/lower_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aircomp/errors.hpp"
#include "aircomp/kernels.hpp"

namespace aircomp {
namespace {

// Root of cap_sum + sum_k min(base_k - lambda * slope_k, cap_k) = 1 on
// (lo, 0). The left side is non-increasing in lambda and >= 1 at lo.
double bisect_lambda(double k1_cap_sum, std::span<const double> base,
                     std::span<const double> slope, std::span<const double> cap, double lo) {
  double hi = 0.0;
  for (int iter = 0; iter < 400 && hi - lo > kLambdaTol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double lhs = k1_cap_sum + kernels::clamped_sum(base, slope, cap, -mid);
    if (lhs > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double offset_product(double a, const DeviceParams& d) { return a * d.h * d.b_max; }

}  // namespace

std::string_view to_string(LowerBranch branch) {
  switch (branch) {
    case LowerBranch::Bisection: return "BISECTION";
    case LowerBranch::AboveThreshold: return "A_GE_ATH";
    case LowerBranch::CapSumExceedsOne: return "SUM_BMAX_GT_1";
  }
  return "UNKNOWN";
}

Partition partition(const ProblemInstance& inst, double a) {
  Partition p;
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const auto& d = inst.devices[k];
    if (offset_product(a, d) >= d.D / inst.S_T) {
      p.k1.push_back(k);
    } else {
      p.k2.push_back(k);
    }
  }
  return p;
}

double a_threshold(const ProblemInstance& inst, const Partition& part) {
  double cap_sum = 0.0;
  for (std::size_t k : part.k1) cap_sum += inst.devices[k].D / inst.S_T;
  if (cap_sum > 1.0) {
    throw ValidationError("sum of beta_max over K1 exceeds 1; threshold undefined");
  }
  if (part.k2.empty()) return 0.0;
  double gain_sum = 0.0;
  for (std::size_t k : part.k2) gain_sum += inst.devices[k].h * inst.devices[k].b_max;
  return (1.0 - cap_sum) / gain_sum;
}

double lambda_min(const ProblemInstance& inst, double a, std::span<const std::size_t> k2) {
  if (k2.empty()) throw ValidationError("lambda_min is undefined for an empty K2");
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t k : k2) {
    const auto& d = inst.devices[k];
    out = std::min(out, 2.0 * d.c * (offset_product(a, d) - d.D / inst.S_T));
  }
  return out;
}

std::vector<double> beta_of_lambda(const ProblemInstance& inst, double a, double lambda,
                                   std::span<const std::size_t> k2) {
  std::vector<double> out;
  out.reserve(k2.size());
  for (std::size_t k : k2) {
    const auto& d = inst.devices[k];
    out.push_back(std::min(offset_product(a, d) - lambda / (2.0 * d.c), d.D / inst.S_T));
  }
  return out;
}

std::optional<double> solve_lambda(const ProblemInstance& inst, double a, const Partition& part) {
  const double a_th = a_threshold(inst, part);  // validates sum_{K1} beta_max <= 1
  if (part.k2.empty()) throw ValidationError("solve_lambda requires a non-empty K2");
  if (a >= a_th) return std::nullopt;

  double cap_sum = 0.0;
  for (std::size_t k : part.k1) cap_sum += inst.devices[k].D / inst.S_T;
  std::vector<double> base, slope, cap;
  for (std::size_t k : part.k2) {
    const auto& d = inst.devices[k];
    base.push_back(offset_product(a, d));
    slope.push_back(1.0 / (2.0 * d.c));
    cap.push_back(d.D / inst.S_T);
  }
  return bisect_lambda(cap_sum, base, slope, cap, lambda_min(inst, a, part.k2));
}

LowerSolution solve_lower(const ProblemInstance& inst, double a) {
  LowerLevel level(inst);
  return level.solve(a);
}

LowerLevel::LowerLevel(const ProblemInstance& inst) : inst_(inst) {
  require_valid(inst_);
  const std::size_t K = inst_.size();
  h_.resize(K);
  hb_.resize(K);
  cap_.resize(K);
  c_.resize(K);
  inv2c_.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& d = inst_.devices[k];
    h_[k] = d.h;
    hb_[k] = d.h * d.b_max;
    cap_[k] = d.D / inst_.S_T;
    c_[k] = d.c;
    inv2c_[k] = 1.0 / (2.0 * d.c);
  }
  idx2_.reserve(K);
  base2_.reserve(K);
  slope2_.reserve(K);
  cap2_.reserve(K);
  in_k1_.resize(K);
}

LowerLevel::Classified LowerLevel::classify(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ValidationError("receive gain a must be positive and finite");
  }
  Classified cls;
  idx2_.clear();
  base2_.clear();
  slope2_.clear();
  cap2_.clear();
  for (std::size_t k = 0; k < h_.size(); ++k) {
    const double offset = offset_product(a, inst_.devices[k]);
    if (offset >= cap_[k]) {
      in_k1_[k] = 1;
      cls.k1_cap_sum += cap_[k];
    } else {
      in_k1_[k] = 0;
      idx2_.push_back(k);
      base2_.push_back(offset);
      slope2_.push_back(inv2c_[k]);
      cap2_.push_back(cap_[k]);
      cls.k2_gain_sum += hb_[k];
    }
  }
  cls.n2 = idx2_.size();
  return cls;
}

double LowerLevel::bisect(double /*a*/, const Classified& cls) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cls.n2; ++j) {
    lo = std::min(lo, (base2_[j] - cap2_[j]) / slope2_[j]);
  }
  return bisect_lambda(cls.k1_cap_sum, base2_, slope2_, cap2_, lo);
}

std::optional<double> LowerLevel::lambda_star(double a) {
  const Classified cls = classify(a);
  if (cls.k1_cap_sum > 1.0 || cls.n2 == 0) return std::nullopt;
  const double a_th = (1.0 - cls.k1_cap_sum) / cls.k2_gain_sum;
  if (a >= a_th) return std::nullopt;
  return bisect(a, cls);
}

void LowerLevel::fill(double a, LowerSolution& out) {
  const std::size_t K = h_.size();
  const Classified cls = classify(a);
  out.b.assign(K, 0.0);
  out.beta.beta.assign(K, 0.0);
  out.lambda_star.reset();
  auto& b = out.b;
  auto& beta = out.beta.beta;

  if (cls.k1_cap_sum > 1.0) {
    out.branch = LowerBranch::CapSumExceedsOne;
    double delta = 0.0;
    double weight_sum = 0.0;
    if (cls.n2 > 0) {
      delta = kCapOverflowShare;
      for (std::size_t j = 0; j < cls.n2; ++j) {
        delta = std::min(delta, base2_[j]);
        weight_sum += base2_[j];
      }
    }
    double remaining = 1.0 - delta;
    for (std::size_t k = 0; k < K; ++k) {
      if (!in_k1_[k]) continue;
      beta[k] = std::min(cap_[k], remaining);
      remaining -= beta[k];
      b[k] = std::min(beta[k] / (a * h_[k]), inst_.devices[k].b_max);
    }
    for (std::size_t j = 0; j < cls.n2; ++j) {
      const std::size_t k = idx2_[j];
      beta[k] = delta * base2_[j] / weight_sum;
      b[k] = std::min(beta[k] / (a * h_[k]), inst_.devices[k].b_max);
    }
  } else {
    for (std::size_t k = 0; k < K; ++k) {
      if (!in_k1_[k]) continue;
      beta[k] = cap_[k];
      b[k] = std::min(cap_[k] / (a * h_[k]), inst_.devices[k].b_max);
    }
    const double a_th = cls.n2 == 0 ? 0.0 : (1.0 - cls.k1_cap_sum) / cls.k2_gain_sum;
    if (a < a_th) {
      out.branch = LowerBranch::Bisection;
      const double lambda = bisect(a, cls);
      out.lambda_star = lambda;
      std::size_t widest = idx2_.front();
      double widest_slack = -1.0;
      for (std::size_t j = 0; j < cls.n2; ++j) {
        const std::size_t k = idx2_[j];
        b[k] = inst_.devices[k].b_max;
        beta[k] = std::min(base2_[j] - lambda * slope2_[j], cap2_[j]);
        if (cap2_[j] - beta[k] > widest_slack) {
          widest_slack = cap2_[j] - beta[k];
          widest = k;
        }
      }
      // Bisection leaves sum(beta) within ~tol of 1; put the residue on the
      // K2 device with the most room below its cap.
      double total = 0.0;
      for (double v : beta) total += v;
      beta[widest] = std::clamp(beta[widest] + (1.0 - total), 0.0, cap_[widest]);
    } else {
      out.branch = LowerBranch::AboveThreshold;
      for (std::size_t j = 0; j < cls.n2; ++j) {
        const std::size_t k = idx2_[j];
        const auto& d = inst_.devices[k];
        b[k] = std::min(a_th * d.b_max / a, d.b_max);
        beta[k] = a_th * d.h * d.b_max;
      }
    }
  }
  out.E = kernels::weighted_distortion(a, b, h_, beta, c_) + a * a * inst_.sigma2;
}

LowerSolution LowerLevel::solve(double a) {
  LowerSolution out;
  fill(a, out);
  return out;
}

double LowerLevel::value(double a) {
  fill(a, scratch_);
  return scratch_.E;
}

}  // namespace aircomp
