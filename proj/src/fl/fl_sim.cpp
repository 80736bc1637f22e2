#include "aircomp/fl_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "aircomp/errors.hpp"
#include "aircomp/io.hpp"
#include "aircomp/kernels.hpp"

namespace aircomp {
namespace {

constexpr std::uint64_t kTaskStream = 0x7461736bULL;
constexpr std::uint64_t kNoiseStreamBase = 0x6e6f697365000000ULL;

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Loss and d(loss)/d(margin) of one sample at margin m = x.w.
double sample_loss(LossFamily f, double m, double y) {
  if (f == LossFamily::LeastSquares) return (m - y) * (m - y);
  // log(1 + e^m) - y m, evaluated stably
  return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m))) - y * m;
}

double sample_slope(LossFamily f, double m, double y) {
  if (f == LossFamily::LeastSquares) return 2.0 * (m - y);
  return sigmoid(m) - y;
}

void add_sample_gradient(const SyntheticTask& t, std::size_t k, std::size_t l,
                         std::span<const double> w, std::span<double> g) {
  const std::span<const double> row(t.x[k].data() + l * t.dim, t.dim);
  const double slope = sample_slope(t.loss, kernels::dot(row, w), t.y[k][l]);
  kernels::axpy(slope, row, g);
}

double norm2(std::span<const double> v) { return kernels::dot(v, v); }

}  // namespace

double SyntheticTask::global_loss(std::span<const double> w) const {
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < devices(); ++k) {
    for (std::size_t l = 0; l < samples(k); ++l) {
      const std::span<const double> row(x[k].data() + l * dim, dim);
      total += sample_loss(loss, kernels::dot(row, w), y[k][l]);
    }
    n += samples(k);
  }
  return total / static_cast<double>(n);
}

std::vector<double> SyntheticTask::global_gradient(std::span<const double> w) const {
  std::vector<double> g(dim, 0.0);
  std::size_t n = 0;
  for (std::size_t k = 0; k < devices(); ++k) {
    for (std::size_t l = 0; l < samples(k); ++l) add_sample_gradient(*this, k, l, w, g);
    n += samples(k);
  }
  for (auto& v : g) v /= static_cast<double>(n);
  return g;
}

std::vector<double> SyntheticTask::device_gradient(std::size_t k, std::span<const double> w) const {
  std::vector<double> g(dim, 0.0);
  for (std::size_t l = 0; l < samples(k); ++l) add_sample_gradient(*this, k, l, w, g);
  for (auto& v : g) v /= static_cast<double>(samples(k));
  return g;
}

SyntheticTask make_task(const std::vector<std::size_t>& dataset_sizes, const TaskOptions& opts,
                        std::uint64_t seed) {
  if (opts.dim == 0) throw ValidationError("task dimension must be positive");
  if (dataset_sizes.empty()) throw ValidationError("task needs at least one device");
  CounterRng rng(seed, kTaskStream);
  SyntheticTask t;
  t.dim = opts.dim;
  t.loss = opts.loss;
  t.w_true.resize(opts.dim);
  for (auto& v : t.w_true) v = rng.normal();
  for (std::size_t D : dataset_sizes) {
    if (D == 0) throw ValidationError("every device needs at least one sample");
    std::vector<double> xs(D * opts.dim);
    std::vector<double> ys(D);
    for (std::size_t l = 0; l < D; ++l) {
      for (std::size_t i = 0; i < opts.dim; ++i) xs[l * opts.dim + i] = rng.normal();
      const double m = kernels::dot(std::span<const double>(xs.data() + l * opts.dim, opts.dim),
                                    t.w_true);
      if (opts.loss == LossFamily::LeastSquares) {
        ys[l] = m + opts.label_noise * rng.normal();
      } else {
        ys[l] = rng.uniform() < sigmoid(m) ? 1.0 : 0.0;
      }
    }
    t.x.push_back(std::move(xs));
    t.y.push_back(std::move(ys));
  }
  return t;
}

std::vector<double> local_gradient(const SyntheticTask& task, std::size_t k,
                                   std::span<const double> w, std::size_t S_k, CounterRng& rng) {
  if (k >= task.devices()) throw ValidationError("device index out of range");
  if (w.size() != task.dim) throw ValidationError("model dimension mismatch");
  const std::size_t D = task.samples(k);
  if (S_k == 0) return std::vector<double>(task.dim, 0.0);
  if (S_k >= D) return task.device_gradient(k, w);

  std::vector<std::size_t> idx(D);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < S_k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(D - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<double> g(task.dim, 0.0);
  for (std::size_t i = 0; i < S_k; ++i) add_sample_gradient(task, k, idx[i], w, g);
  for (auto& v : g) v /= static_cast<double>(S_k);
  return g;
}

std::vector<double> ideal_aggregate(const std::vector<std::vector<double>>& grads,
                                    std::span<const double> S) {
  if (grads.size() != S.size() || grads.empty()) {
    throw ValidationError("one gradient per data size required");
  }
  const double total = std::accumulate(S.begin(), S.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateWeightsError("sum of data sizes is zero");
  std::vector<double> z(grads.front().size(), 0.0);
  for (std::size_t k = 0; k < grads.size(); ++k) kernels::axpy(S[k] / total, grads[k], z);
  return z;
}

std::vector<double> ota_aggregate(const std::vector<std::vector<double>>& grads,
                                  std::span<const double> h, double a, std::span<const double> b,
                                  double sigma2, CounterRng& rng) {
  if (grads.size() != h.size() || grads.size() != b.size() || grads.empty()) {
    throw ValidationError("one gradient, channel and transmit gain per device required");
  }
  if (sigma2 < 0.0) throw ValidationError("noise variance must be non-negative");
  std::vector<double> z(grads.front().size(), 0.0);
  for (std::size_t k = 0; k < grads.size(); ++k) kernels::axpy(a * b[k] * h[k], grads[k], z);
  const double sd = std::sqrt(sigma2);
  if (sd > 0.0) {
    for (auto& v : z) v += a * sd * rng.normal();
  }
  return z;
}

ProblemInstance instance_for_task(const ProblemInstance& inst, const SyntheticTask& task,
                                  GradientPower mode) {
  if (inst.size() != task.devices()) throw ValidationError("instance and task device counts differ");
  ProblemInstance out = inst;
  if (mode == GradientPower::Unit) {
    for (auto& d : out.devices) d.c = 1.0;
    return out;
  }
  const std::vector<double> w0(task.dim, 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double c = norm2(task.device_gradient(k, w0)) / static_cast<double>(task.dim);
    out.devices[k].c = std::max(c, 1e-12);
  }
  return out;
}

TrainingRun train(const ProblemInstance& inst, Policy policy, const SyntheticTask& task,
                  const TrainOptions& opts) {
  const ProblemInstance tuned = instance_for_task(inst, task, opts.c_mode);
  return train_with_allocation(tuned, run_policy(tuned, policy), task, opts);
}

TrainingRun train_with_allocation(const ProblemInstance& inst, const Allocation& alloc,
                                  const SyntheticTask& task, const TrainOptions& opts) {
  require_valid(inst);
  const std::size_t K = inst.size();
  if (task.devices() != K) throw ValidationError("instance and task device counts differ");
  for (std::size_t k = 0; k < K; ++k) {
    if (static_cast<double>(task.samples(k)) != inst.devices[k].D) {
      throw ValidationError("task dataset sizes must equal the instance's D");
    }
  }
  if (alloc.b.size() != K || alloc.S.size() != K) throw ValidationError("allocation length mismatch");

  TrainingRun run;
  run.alloc = alloc;
  run.S_used = S_from_beta(beta_from_S(alloc.S), inst, Rounding::FloorWithRepair);
  const double sigma2 = opts.channel_sigma2.value_or(inst.sigma2);
  std::vector<double> h(K);
  for (std::size_t k = 0; k < K; ++k) h[k] = inst.devices[k].h;

  std::vector<double> w(task.dim, 0.0);
  std::vector<std::vector<double>> grads(K);
  double err_acc = 0.0;
  for (std::size_t t = 0; t < opts.rounds; ++t) {
    RoundRecord rec;
    rec.round = t;
    rec.loss = task.global_loss(w);
    rec.grad_norm = std::sqrt(norm2(task.global_gradient(w)));
    for (std::size_t k = 0; k < K; ++k) {
      CounterRng subset_rng(opts.seed, (static_cast<std::uint64_t>(t) << 20) | k);
      grads[k] = local_gradient(task, k, w, static_cast<std::size_t>(run.S_used[k]), subset_rng);
    }
    const std::vector<double> z = ideal_aggregate(grads, run.S_used);
    CounterRng noise_rng(opts.seed, kNoiseStreamBase + t);
    std::vector<double> z_hat = ota_aggregate(grads, h, alloc.a, alloc.b, sigma2, noise_rng);

    double err = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) err += (z_hat[i] - z[i]) * (z_hat[i] - z[i]);
    rec.realized_sq_err = err;
    err_acc += err / static_cast<double>(task.dim);

    if (opts.keep_vectors) rec.w = w;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = w[i] - opts.eta * z_hat[i];
    if (opts.keep_vectors) rec.z_hat = std::move(z_hat);
    run.rounds.push_back(std::move(rec));
  }
  run.w_final = w;
  run.final_loss = task.global_loss(w);
  run.mean_sq_err = opts.rounds > 0 ? err_acc / static_cast<double>(opts.rounds) : 0.0;
  return run;
}

void write_training_csv(std::ostream& out, const TrainingRun& run, const SyntheticTask& task) {
  out << "round,loss,grad_norm,realized_sq_err\n";
  for (const auto& r : run.rounds) {
    out << r.round << ',' << format_double(r.loss) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.realized_sq_err) << '\n';
  }
  const double final_norm = std::sqrt(norm2(task.global_gradient(run.w_final)));
  out << "summary," << format_double(run.final_loss) << ',' << format_double(final_norm) << ','
      << format_double(run.mean_sq_err) << '\n';
}

}  // namespace aircomp
