#pragma once
// Federated gradient descent over a simulated analog multiple-access channel.
//
// Each round device k averages per-sample gradients over a random subset of
// S_k of its D_k samples, all devices transmit b_k * grad_k simultaneously,
// and the server receives z_hat = a * (sum_k b_k h_k grad_k + n) with
// n ~ N(0, sigma2 I). The model then steps w <- w - eta * z_hat.
//
// Error convention: the aggregation MSE is per coordinate, so realized
// ||z_hat - z||^2 / N_in is what compares to mse(), and empirical gradient
// powers are c_k = ||grad_k||^2 / N_in.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aircomp/experiments.hpp"
#include "aircomp/model.hpp"
#include "aircomp/rng.hpp"

namespace aircomp {

enum class LossFamily { LeastSquares, Logistic };

struct TaskOptions {
  std::size_t dim = 10;
  LossFamily loss = LossFamily::LeastSquares;
  double label_noise = 0.1;  ///< std of additive label noise (least squares)
};

/// Synthetic convex task; every device samples the same distribution.
struct SyntheticTask {
  std::size_t dim = 0;
  LossFamily loss = LossFamily::LeastSquares;
  std::vector<std::vector<double>> x;  ///< per device, row-major samples x dim
  std::vector<std::vector<double>> y;  ///< per device labels
  std::vector<double> w_true;

  std::size_t devices() const { return x.size(); }
  std::size_t samples(std::size_t k) const { return y[k].size(); }

  /// Mean loss over all samples of all devices.
  double global_loss(std::span<const double> w) const;
  /// Gradient of global_loss.
  std::vector<double> global_gradient(std::span<const double> w) const;
  /// Full-batch gradient of device k's mean loss.
  std::vector<double> device_gradient(std::size_t k, std::span<const double> w) const;
};

/// Features are i.i.d. N(0, 1); least squares uses y = x.w_true + noise,
/// logistic draws y ~ Bernoulli(sigmoid(x.w_true)).
SyntheticTask make_task(const std::vector<std::size_t>& dataset_sizes, const TaskOptions& opts,
                        std::uint64_t seed);

/// Mean per-sample gradient over S_k samples of device k chosen without
/// replacement (partial Fisher-Yates on rng). S_k >= D_k uses the full batch
/// and draws nothing; S_k == 0 returns zeros.
std::vector<double> local_gradient(const SyntheticTask& task, std::size_t k,
                                   std::span<const double> w, std::size_t S_k, CounterRng& rng);

/// z = sum_k (S_k / sum S) grad_k.
std::vector<double> ideal_aggregate(const std::vector<std::vector<double>>& grads,
                                    std::span<const double> S);

/// z_hat = a * sum_k b_k h_k grad_k + a * n, n_i ~ N(0, sigma2).
std::vector<double> ota_aggregate(const std::vector<std::vector<double>>& grads,
                                  std::span<const double> h, double a, std::span<const double> b,
                                  double sigma2, CounterRng& rng);

enum class GradientPower { Unit, Empirical };

struct TrainOptions {
  std::size_t rounds = 200;
  double eta = 0.05;
  std::uint64_t seed = 1;
  GradientPower c_mode = GradientPower::Unit;
  /// Channel noise used in simulation; defaults to the instance's sigma2.
  std::optional<double> channel_sigma2;
  bool keep_vectors = true;  ///< store w_t and z_hat_t per round
};

struct RoundRecord {
  std::size_t round = 0;
  double loss = 0.0;       ///< global loss at w_t
  double grad_norm = 0.0;  ///< ||global gradient at w_t||
  double realized_sq_err = 0.0;  ///< ||z_hat_t - z_t||^2
  std::vector<double> w;      ///< w_t
  std::vector<double> z_hat;  ///< received aggregate
};

struct TrainingRun {
  Allocation alloc;                    ///< as optimised (continuous S)
  std::vector<double> S_used;          ///< integer sizes used for sampling
  std::vector<RoundRecord> rounds;
  std::vector<double> w_final;
  double final_loss = 0.0;
  double mean_sq_err = 0.0;  ///< mean of realized_sq_err / N_in over rounds
};

/// Instance handed to the optimiser: c set per c_mode, where Empirical uses
/// one full-batch warm-up gradient per device at w = 0.
ProblemInstance instance_for_task(const ProblemInstance& inst, const SyntheticTask& task,
                                  GradientPower mode);

/// Allocation computed once up front, channels static across rounds; the
/// zeta subsets are redrawn every round.
TrainingRun train(const ProblemInstance& inst, Policy policy, const SyntheticTask& task,
                  const TrainOptions& opts);
TrainingRun train_with_allocation(const ProblemInstance& inst, const Allocation& alloc,
                                  const SyntheticTask& task, const TrainOptions& opts);

/// `round,loss,grad_norm,realized_sq_err` per round, then a `summary` row
/// carrying the final loss, final gradient norm and mean per-coordinate error.
void write_training_csv(std::ostream& out, const TrainingRun& run, const SyntheticTask& task);

}  // namespace aircomp
