#include <algorithm>
#include <cmath>

#include "aircomp/errors.hpp"
#include "aircomp/lower_solver.hpp"

namespace aircomp {
namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double KktResiduals::max_stationarity() const {
  return std::max(max_abs(stationarity_beta), max_abs(stationarity_b));
}

double KktResiduals::max_complementarity() const {
  return std::max({max_abs(slack_z), max_abs(slack_y), max_abs(slack_gamma), max_abs(slack_mu)});
}

double KktResiduals::max_primal() const {
  return std::max({max_abs(primal_beta), max_abs(primal_b), primal_sum});
}

double KktResiduals::max_residual() const {
  return std::max({max_stationarity(), max_complementarity(), max_primal()});
}

KktResiduals kkt_certify(const ProblemInstance& inst, double a, const LowerSolution& sol) {
  const std::size_t K = inst.size();
  if (sol.b.size() != K || sol.beta.size() != K) {
    throw ValidationError("solution length does not match the instance");
  }
  const auto& beta = sol.beta.beta;
  const auto& b = sol.b;

  std::vector<double> r(K), cap(K);
  for (std::size_t k = 0; k < K; ++k) {
    r[k] = a * b[k] * inst.devices[k].h - beta[k];
    cap[k] = inst.devices[k].D / inst.S_T;
  }

  // With beta_k strictly inside its box, z_k = y_k = 0 and the beta
  // stationarity row pins lambda = 2 c_k r_k.
  double lambda_acc = 0.0;
  std::size_t interior = 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (beta[k] > kFeasTol && beta[k] < cap[k] - kFeasTol) {
      lambda_acc += 2.0 * inst.devices[k].c * r[k];
      ++interior;
    }
  }

  KktResiduals out;
  out.lambda = interior > 0 ? lambda_acc / static_cast<double>(interior)
                            : sol.lambda_star.value_or(0.0);
  for (auto* v : {&out.z, &out.y, &out.gamma, &out.mu, &out.stationarity_beta,
                  &out.stationarity_b, &out.slack_z, &out.slack_y, &out.slack_gamma,
                  &out.slack_mu, &out.primal_beta, &out.primal_b}) {
    v->assign(K, 0.0);
  }

  double beta_sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& d = inst.devices[k];
    const bool beta_at_zero = beta[k] <= kFeasTol;
    const bool beta_at_cap = beta[k] >= cap[k] - kFeasTol;
    const bool b_at_zero = b[k] <= kFeasTol;
    const bool b_at_cap = b[k] >= d.b_max - kFeasTol;

    // y_k - z_k = 2 c_k r_k - lambda
    const double p = 2.0 * d.c * r[k] - out.lambda;
    if (p > 0.0) {
      if (beta_at_cap) out.y[k] = p; else out.stationarity_beta[k] = p;
    } else if (p < 0.0) {
      if (beta_at_zero) out.z[k] = -p; else out.stationarity_beta[k] = -p;
    }
    // gamma_k - mu_k = 2 c_k r_k a h_k
    const double q = 2.0 * d.c * r[k] * a * d.h;
    if (q > 0.0) {
      if (b_at_zero) out.gamma[k] = q; else out.stationarity_b[k] = q;
    } else if (q < 0.0) {
      if (b_at_cap) out.mu[k] = -q; else out.stationarity_b[k] = -q;
    }

    out.slack_z[k] = out.z[k] * std::abs(beta[k]);
    out.slack_y[k] = out.y[k] * std::abs(beta[k] - cap[k]);
    out.slack_gamma[k] = out.gamma[k] * std::abs(b[k]);
    out.slack_mu[k] = out.mu[k] * std::abs(b[k] - d.b_max);

    out.primal_beta[k] = std::max({0.0, -beta[k], beta[k] - cap[k]});
    out.primal_b[k] = std::max({0.0, -b[k], b[k] - d.b_max});
    beta_sum += beta[k];
  }
  out.primal_sum = std::abs(beta_sum - 1.0);
  return out;
}

}  // namespace aircomp
