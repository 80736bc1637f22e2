#include "aircomp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aircomp/errors.hpp"
#include "aircomp/kernels.hpp"

namespace aircomp {
namespace {

ValidationReport violation(std::string constraint, std::string message) {
  return ValidationReport{false, std::move(constraint), std::move(message)};
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require_size(std::span<const double> v, std::size_t K, const char* what) {
  if (v.size() != K) {
    std::ostringstream os;
    os << what << " has length " << v.size() << ", expected " << K;
    throw ValidationError(os.str());
  }
}

void require_receive_gain(double a) {
  if (!positive_finite(a)) throw ValidationError("receive gain a must be positive and finite");
}

}  // namespace

double ProblemInstance::total_data() const {
  double total = 0.0;
  for (const auto& d : devices) total += d.D;
  return total;
}

double WeightVector::sum() const { return std::accumulate(beta.begin(), beta.end(), 0.0); }

ValidationReport validate_instance(const ProblemInstance& inst) {
  if (inst.devices.empty()) return violation("K", "instance has no devices (K >= 1 required)");
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const auto& d = inst.devices[k];
    const auto at = [k](const char* field) {
      std::ostringstream os;
      os << field << " of device " << k << " must be positive and finite";
      return os.str();
    };
    if (!positive_finite(d.h)) return violation("h", at("h"));
    if (!positive_finite(d.b_max)) return violation("b_max", at("b_max"));
    if (!positive_finite(d.c)) return violation("c", at("c"));
    if (!positive_finite(d.D)) return violation("D", at("D"));
  }
  if (!positive_finite(inst.sigma2)) return violation("sigma2", "sigma2 must be positive and finite");
  if (!positive_finite(inst.S_T)) return violation("S_T", "S_T must be positive and finite");
  if (inst.S_T > inst.total_data() + kFeasTol) {
    return violation("S_T exceeds sum D", "S_T exceeds ΣD");
  }
  return {};
}

void require_valid(const ProblemInstance& inst) {
  if (auto report = validate_instance(inst); !report) throw ValidationError(report.message);
}

double mse(const ProblemInstance& inst, double a, std::span<const double> b,
           std::span<const double> S) {
  const std::size_t K = inst.size();
  require_size(b, K, "b");
  require_size(S, K, "S");
  require_receive_gain(a);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& d = inst.devices[k];
    if (b[k] < -kFeasTol || b[k] > d.b_max + kFeasTol) throw ValidationError("b outside [0, b_max]");
    if (S[k] < -kFeasTol || S[k] > d.D + kFeasTol) throw ValidationError("S outside [0, D]");
    total += S[k];
  }
  if (total == 0.0) throw DegenerateWeightsError("sum of S is zero; aggregation weights undefined");

  double distortion = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (!(S[k] > 0.0)) continue;
    const auto& d = inst.devices[k];
    const double r = a * b[k] * d.h - S[k] / total;
    distortion += r * r * d.c;
  }
  return distortion + a * a * inst.sigma2;
}

double mse_beta(const ProblemInstance& inst, double a, std::span<const double> b,
                const WeightVector& beta) {
  const std::size_t K = inst.size();
  require_size(b, K, "b");
  require_size(beta.beta, K, "beta");
  require_receive_gain(a);
  std::vector<double> h(K), c(K);
  for (std::size_t k = 0; k < K; ++k) {
    h[k] = inst.devices[k].h;
    c[k] = inst.devices[k].c;
  }
  return kernels::weighted_distortion(a, b, h, beta.beta, c) + a * a * inst.sigma2;
}

std::vector<double> beta_max(const ProblemInstance& inst) {
  std::vector<double> out(inst.size());
  for (std::size_t k = 0; k < inst.size(); ++k) out[k] = inst.devices[k].D / inst.S_T;
  return out;
}

bool weights_feasible(const ProblemInstance& inst, const WeightVector& beta) {
  if (beta.size() != inst.size()) return false;
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const double cap = inst.devices[k].D / inst.S_T;
    if (!(beta.beta[k] >= -kFeasTol && beta.beta[k] <= cap + kFeasTol)) return false;
  }
  return std::abs(beta.sum() - 1.0) <= kFeasTol;
}

WeightVector beta_from_S(std::span<const double> S) {
  double total = 0.0;
  for (double s : S) {
    if (s < 0.0) throw ValidationError("negative data size");
    total += s;
  }
  if (!(total > 0.0)) throw DegenerateWeightsError("sum of S is zero; aggregation weights undefined");
  WeightVector w;
  w.beta.reserve(S.size());
  for (double s : S) w.beta.push_back(s / total);
  return w;
}

std::vector<double> S_from_beta(const WeightVector& beta, const ProblemInstance& inst,
                                Rounding mode) {
  const std::size_t K = inst.size();
  require_size(beta.beta, K, "beta");
  if (std::all_of(beta.beta.begin(), beta.beta.end(), [](double v) { return v == 0.0; })) {
    throw DegenerateWeightsError("all-zero weights have no data-size preimage");
  }
  if (!weights_feasible(inst, beta)) throw ValidationError("weights outside the capped simplex");

  double xi = 0.0;
  for (std::size_t k = 0; k < K; ++k) xi = std::max(xi, beta.beta[k] / inst.devices[k].D);

  std::vector<double> S(K);
  for (std::size_t k = 0; k < K; ++k) {
    S[k] = std::clamp(beta.beta[k] / xi, 0.0, inst.devices[k].D);
  }
  if (mode == Rounding::Continuous) return S;

  // Floor with repair. The small offset keeps S_k = D_k (up to rounding) from
  // flooring to D_k - 1.
  std::vector<double> frac(K), cap(K);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    cap[k] = std::floor(inst.devices[k].D + kFeasTol);
    const double fl = std::min(std::floor(S[k] + kFeasTol), cap[k]);
    frac[k] = S[k] - fl;
    S[k] = fl;
    total += fl;
  }
  const double need = std::ceil(inst.S_T - kFeasTol);
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return frac[i] > frac[j]; });
  while (total < need) {
    bool progressed = false;
    for (std::size_t k : order) {
      if (total >= need) break;
      if (S[k] + 1.0 <= cap[k]) {
        S[k] += 1.0;
        total += 1.0;
        progressed = true;
      }
    }
    if (!progressed) throw ValidationError("integer data sizes cannot reach S_T");
  }
  return S;
}

std::vector<double> eliminate_b(const ProblemInstance& inst, double a,
                                const WeightVector& beta) {
  require_size(beta.beta, inst.size(), "beta");
  require_receive_gain(a);
  std::vector<double> b(inst.size());
  for (std::size_t k = 0; k < inst.size(); ++k) {
    const auto& d = inst.devices[k];
    b[k] = std::clamp(beta.beta[k] / (a * d.h), 0.0, d.b_max);
  }
  return b;
}

}  // namespace aircomp
