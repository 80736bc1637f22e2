#pragma once
// Domain types for joint receive-gain / transmit-gain / data-size selection in
// over-the-air gradient aggregation, plus the aggregation MSE and the map
// between data sizes S and aggregation weights beta = S / sum(S).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aircomp {

/// Absolute tolerance for every feasibility comparison.
inline constexpr double kFeasTol = 1e-9;

struct DeviceParams {
  double h = 1.0;      ///< real channel coefficient after phase compensation
  double b_max = 1.0;  ///< transmit gain cap
  double c = 1.0;      ///< E||grad_k||^2
  double D = 1.0;      ///< local dataset size
};

struct ProblemInstance {
  std::vector<DeviceParams> devices;
  double S_T = 1.0;     ///< minimal total number of samples per round
  double sigma2 = 1.0;  ///< receiver noise variance

  std::size_t size() const { return devices.size(); }
  double total_data() const;
};

/// Result of validate_instance. `constraint` names the first violated
/// constraint ("K", "h", "b_max", "c", "D", "S_T", "sigma2", "S_T exceeds sum D").
struct ValidationReport {
  bool ok = true;
  std::string constraint;
  std::string message;

  explicit operator bool() const { return ok; }
};

ValidationReport validate_instance(const ProblemInstance& inst);

/// Throws ValidationError carrying the report message if the instance is invalid.
void require_valid(const ProblemInstance& inst);

/// Aggregation weights; feasible when 0 <= beta_k <= beta_max_k and sum = 1.
struct WeightVector {
  std::vector<double> beta;

  std::size_t size() const { return beta.size(); }
  double sum() const;
};

/// Joint configuration for the raw problem. S is real-valued.
struct Allocation {
  double a = 1.0;
  std::vector<double> b;
  std::vector<double> S;
  double mse = 0.0;
};

/// Aggregation MSE with the S_k > 0 indicator:
///   sum_k (a b_k h_k - S_k / sum S)^2 c_k 1(S_k > 0) + a^2 sigma^2.
/// Throws DegenerateWeightsError when sum S == 0.
double mse(const ProblemInstance& inst, double a, std::span<const double> b,
           std::span<const double> S);

/// Indicator-free objective in weight space: sum_k (a b_k h_k - beta_k)^2 c_k + a^2 sigma^2.
double mse_beta(const ProblemInstance& inst, double a, std::span<const double> b,
                const WeightVector& beta);

/// beta_max_k = D_k / S_T.
std::vector<double> beta_max(const ProblemInstance& inst);

/// True when beta is inside the capped simplex of `inst` (tolerance kFeasTol).
bool weights_feasible(const ProblemInstance& inst, const WeightVector& beta);

WeightVector beta_from_S(std::span<const double> S);

enum class Rounding {
  Continuous,       ///< S_k = beta_k / Xi with Xi = max_k beta_k / D_k
  FloorWithRepair,  ///< floor, then add single samples until sum S >= S_T
};

/// Canonical preimage of feasible weights: Xi = max_k beta_k / D_k,
/// S_k = beta_k / Xi. The result satisfies S_k <= D_k and sum S >= S_T.
/// FloorWithRepair floors each S_k and then restores sum S >= S_T by adding
/// one sample at a time to devices with spare data, largest fractional part
/// first (ties by index), cycling as needed.
std::vector<double> S_from_beta(const WeightVector& beta, const ProblemInstance& inst,
                                Rounding mode = Rounding::Continuous);

/// Per-device minimiser of (a b h - beta)^2 c over 0 <= b <= b_max:
/// b_k = min(b_max_k, beta_k / (a h_k)).
std::vector<double> eliminate_b(const ProblemInstance& inst, double a,
                                const WeightVector& beta);

}  // namespace aircomp
