#include <arm_neon.h>

#include <algorithm>

#include "aircomp/kernels.hpp"

namespace aircomp::kernels::neon {

double clamped_sum(std::span<const double> base, std::span<const double> slope,
                   std::span<const double> cap, double x) {
  const std::size_t n = base.size();
  const float64x2_t vx = vdupq_n_f64(x);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t v =
        vfmaq_f64(vld1q_f64(base.data() + k), vld1q_f64(slope.data() + k), vx);
    acc = vaddq_f64(acc, vminq_f64(v, vld1q_f64(cap.data() + k)));
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += std::min(base[k] + x * slope[k], cap[k]);
  return vaddvq_f64(acc) + tail;
}

double weighted_distortion(double a, std::span<const double> gain,
                           std::span<const double> channel,
                           std::span<const double> target,
                           std::span<const double> weight) {
  const std::size_t n = gain.size();
  const float64x2_t va = vdupq_n_f64(a);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t ab = vmulq_f64(va, vld1q_f64(gain.data() + k));
    const float64x2_t r = vsubq_f64(vmulq_f64(ab, vld1q_f64(channel.data() + k)),
                                    vld1q_f64(target.data() + k));
    acc = vfmaq_f64(acc, vmulq_f64(r, r), vld1q_f64(weight.data() + k));
  }
  double tail = 0.0;
  for (; k < n; ++k) {
    const double r = a * gain[k] * channel[k] - target[k];
    tail += weight[k] * r * r;
  }
  return vaddvq_f64(acc) + tail;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x.data() + i), vld1q_f64(y.data() + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x.data() + i + 2), vld1q_f64(y.data() + i + 2));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return vaddvq_f64(vaddq_f64(acc0, acc1)) + tail;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y.data() + i,
              vfmaq_f64(vld1q_f64(y.data() + i), vld1q_f64(x.data() + i), va));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace aircomp::kernels::neon
