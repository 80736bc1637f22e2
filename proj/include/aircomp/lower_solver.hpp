#pragma once
// Inner problem for a fixed receive gain a:
//
//   E(a) = min_{b, beta}  sum_k (a b_k h_k - beta_k)^2 c_k + a^2 sigma^2
//          s.t. 0 <= b_k <= b_max_k, 0 <= beta_k <= beta_max_k, sum beta = 1.
//
// Devices split into K1 (a h_k b_max_k >= beta_max_k: the cap can be offset
// exactly) and K2 (the rest). With sum_{K1} beta_max <= 1 and a below the
// threshold a_th the optimum is a water-filling in the multiplier lambda of
// the sum constraint, found by bisection; otherwise the noise floor a^2 sigma^2
// is attained.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aircomp/model.hpp"

namespace aircomp {

/// Bisection tolerance on lambda.
inline constexpr double kLambdaTol = 1e-12;

/// Slack handed to K2 when sum_{K1} beta_max > 1 (any value in (0, 1) works).
inline constexpr double kCapOverflowShare = 0.5;

struct Partition {
  std::vector<std::size_t> k1;  ///< a h b_max >= beta_max (ties included)
  std::vector<std::size_t> k2;
};

Partition partition(const ProblemInstance& inst, double a);

/// a_th = (1 - sum_{K1} beta_max) / sum_{K2} h b_max; 0 when K2 is empty.
/// Throws ValidationError when sum_{K1} beta_max > 1.
double a_threshold(const ProblemInstance& inst, const Partition& part);

/// lambda_min = min_{k in K2} 2 c_k (a h_k b_max_k - beta_max_k). Throws on empty K2.
double lambda_min(const ProblemInstance& inst, double a, std::span<const std::size_t> k2);

/// beta_k(lambda) = min(a h_k b_max_k - lambda / (2 c_k), beta_max_k), one
/// entry per element of k2 (same order).
std::vector<double> beta_of_lambda(const ProblemInstance& inst, double a, double lambda,
                                   std::span<const std::size_t> k2);

/// Root of sum_{K1} beta_max + sum_{K2} beta_k(lambda) = 1 on (lambda_min, 0),
/// or nullopt when a >= a_th (the left side is already >= 1 at lambda = 0).
/// Requires sum_{K1} beta_max <= 1 and non-empty K2.
std::optional<double> solve_lambda(const ProblemInstance& inst, double a, const Partition& part);

enum class LowerBranch {
  Bisection,         ///< a < a_th: lambda* < 0, K2 transmits at full gain
  AboveThreshold,    ///< a >= a_th: exact offset for every device, E = a^2 sigma^2
  CapSumExceedsOne,  ///< sum_{K1} beta_max > 1: exact offset, E = a^2 sigma^2
};

std::string_view to_string(LowerBranch branch);

struct LowerSolution {
  std::vector<double> b;
  WeightVector beta;
  LowerBranch branch = LowerBranch::Bisection;
  std::optional<double> lambda_star;  ///< set for Bisection only
  double E = 0.0;
};

/// Exact minimiser of the inner problem at receive gain a > 0.
LowerSolution solve_lower(const ProblemInstance& inst, double a);

/// Reusable evaluator for one instance. Caches the structure-of-arrays view
/// and scratch buffers, so repeated evaluation does not allocate. Not
/// thread-safe; use one per thread.
class LowerLevel {
 public:
  explicit LowerLevel(const ProblemInstance& inst);

  const ProblemInstance& instance() const { return inst_; }
  std::size_t size() const { return h_.size(); }

  LowerSolution solve(double a);

  /// E(a) only.
  double value(double a);

  /// lambda*(a) if the bisection branch applies at a, else nullopt.
  std::optional<double> lambda_star(double a);

 private:
  struct Classified {
    double k1_cap_sum = 0.0;   // sum_{K1} beta_max
    double k2_gain_sum = 0.0;  // sum_{K2} h b_max
    std::size_t n2 = 0;
  };

  Classified classify(double a);
  double bisect(double a, const Classified& cls);
  void fill(double a, LowerSolution& out);

  ProblemInstance inst_;
  std::vector<double> h_, hb_, cap_, c_, inv2c_;
  // Scratch, compacted over K2.
  std::vector<std::size_t> idx2_;
  std::vector<double> base2_, slope2_, cap2_;
  std::vector<unsigned char> in_k1_;
  LowerSolution scratch_;
};

/// Residuals of the KKT system of the inner problem:
///   -2 c_k r_k + lambda - z_k + y_k = 0        (stationarity in beta_k)
///    2 c_k r_k a h_k + mu_k - gamma_k = 0      (stationarity in b_k)
///   z_k beta_k = 0, y_k (beta_k - beta_max_k) = 0, gamma_k b_k = 0,
///   mu_k (b_k - b_max_k) = 0, z, y, gamma, mu >= 0, primal feasibility,
/// with r_k = a b_k h_k - beta_k.
struct KktResiduals {
  double lambda = 0.0;
  std::vector<double> z, y, gamma, mu;
  std::vector<double> stationarity_beta;  ///< per device
  std::vector<double> stationarity_b;     ///< per device
  std::vector<double> slack_z, slack_y, slack_gamma, slack_mu;  ///< complementary slackness
  std::vector<double> primal_beta;  ///< box violation of beta_k (0 if inside)
  std::vector<double> primal_b;     ///< box violation of b_k
  double primal_sum = 0.0;          ///< |sum beta - 1|

  double max_stationarity() const;
  double max_complementarity() const;
  double max_primal() const;
  double max_residual() const;
};

/// Reconstructs multipliers for a candidate (b, beta) and reports every KKT
/// residual. A multiplier may be non-zero only when its constraint is active
/// (within kFeasTol); lambda is read off the devices with interior beta, or
/// taken from the solution when there are none. Used to certify solutions,
/// never on the solve path.
KktResiduals kkt_certify(const ProblemInstance& inst, double a, const LowerSolution& sol);

}  // namespace aircomp
