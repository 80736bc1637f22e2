#include "aircomp/kernels.hpp"

#include <algorithm>

namespace aircomp::kernels::scalar {

double clamped_sum(std::span<const double> base, std::span<const double> slope,
                   std::span<const double> cap, double x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    acc += std::min(base[k] + x * slope[k], cap[k]);
  }
  return acc;
}

double weighted_distortion(double a, std::span<const double> gain,
                           std::span<const double> channel,
                           std::span<const double> target,
                           std::span<const double> weight) {
  double acc = 0.0;
  for (std::size_t k = 0; k < gain.size(); ++k) {
    const double r = a * gain[k] * channel[k] - target[k];
    acc += weight[k] * r * r;
  }
  return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace aircomp::kernels::scalar
