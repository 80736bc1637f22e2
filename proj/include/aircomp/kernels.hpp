#pragma once
// Data-parallel inner loops shared by the solvers and the FL simulator.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at startup from CPUID; set AIRCOMP_ISA=scalar in the
// environment to pin the reference path. SIMD variants reorder the
// floating-point reductions, so results agree with the scalar path to a few
// ulps of the summed magnitudes, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace aircomp::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

/// ISA whose kernels are currently dispatched.
Isa active_isa();

/// True if `isa` can run on this machine and was compiled in.
bool isa_available(Isa isa);

/// Pin dispatch to `isa` (tests and benchmarks). Returns false, leaving the
/// active ISA unchanged, if it is unavailable.
bool force_isa(Isa isa);

/// sum_k min(base[k] + x * slope[k], cap[k])
double clamped_sum(std::span<const double> base, std::span<const double> slope,
                   std::span<const double> cap, double x);

/// sum_k weight[k] * (a * gain[k] * channel[k] - target[k])^2
double weighted_distortion(double a, std::span<const double> gain,
                           std::span<const double> channel,
                           std::span<const double> target,
                           std::span<const double> weight);

double dot(std::span<const double> x, std::span<const double> y);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// Per-ISA entry points. The dispatching functions above forward to one of
// these; tests call them directly to check equivalence.
#define AIRCOMP_KERNEL_DECLS                                                   \
  double clamped_sum(std::span<const double> base,                            \
                     std::span<const double> slope,                           \
                     std::span<const double> cap, double x);                  \
  double weighted_distortion(double a, std::span<const double> gain,          \
                             std::span<const double> channel,                 \
                             std::span<const double> target,                  \
                             std::span<const double> weight);                 \
  double dot(std::span<const double> x, std::span<const double> y);           \
  void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
AIRCOMP_KERNEL_DECLS
}
#if defined(AIRCOMP_HAVE_AVX2)
namespace avx2 {
AIRCOMP_KERNEL_DECLS
}
#endif
#if defined(AIRCOMP_HAVE_NEON)
namespace neon {
AIRCOMP_KERNEL_DECLS
}
#endif

#undef AIRCOMP_KERNEL_DECLS

}  // namespace aircomp::kernels
