// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include <algorithm>

#include "aircomp/kernels.hpp"

namespace aircomp::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double clamped_sum(std::span<const double> base, std::span<const double> slope,
                   std::span<const double> cap, double x) {
  const std::size_t n = base.size();
  const __m256d vx = _mm256_set1_pd(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v = _mm256_fmadd_pd(vx, _mm256_loadu_pd(slope.data() + k),
                                      _mm256_loadu_pd(base.data() + k));
    acc = _mm256_add_pd(acc, _mm256_min_pd(v, _mm256_loadu_pd(cap.data() + k)));
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += std::min(base[k] + x * slope[k], cap[k]);
  return hsum(acc) + tail;
}

double weighted_distortion(double a, std::span<const double> gain,
                           std::span<const double> channel,
                           std::span<const double> target,
                           std::span<const double> weight) {
  const std::size_t n = gain.size();
  const __m256d va = _mm256_set1_pd(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d ab = _mm256_mul_pd(va, _mm256_loadu_pd(gain.data() + k));
    const __m256d r = _mm256_fmsub_pd(ab, _mm256_loadu_pd(channel.data() + k),
                                      _mm256_loadu_pd(target.data() + k));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(r, r), _mm256_loadu_pd(weight.data() + k),
                          acc);
  }
  double tail = 0.0;
  for (; k < n; ++k) {
    const double r = a * gain[k] * channel[k] - target[k];
    tail += weight[k] * r * r;
  }
  return hsum(acc) + tail;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i),
                           _mm256_loadu_pd(y.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i + 4),
                           _mm256_loadu_pd(y.data() + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i),
                           _mm256_loadu_pd(y.data() + i), acc0);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i),
                                      _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace aircomp::kernels::avx2
