#include <atomic>
#include <cstdlib>
#include <string>

#include "aircomp/kernels.hpp"

namespace aircomp::kernels {
namespace {

struct Table {
  Isa isa;
  double (*clamped_sum)(std::span<const double>, std::span<const double>,
                        std::span<const double>, double);
  double (*weighted_distortion)(double, std::span<const double>,
                                std::span<const double>, std::span<const double>,
                                std::span<const double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
};

constexpr Table kScalar{Isa::Scalar, &scalar::clamped_sum,
                        &scalar::weighted_distortion, &scalar::dot, &scalar::axpy};
#if defined(AIRCOMP_HAVE_AVX2)
constexpr Table kAvx2{Isa::Avx2, &avx2::clamped_sum, &avx2::weighted_distortion,
                      &avx2::dot, &avx2::axpy};
#endif
#if defined(AIRCOMP_HAVE_NEON)
constexpr Table kNeon{Isa::Neon, &neon::clamped_sum, &neon::weighted_distortion,
                      &neon::dot, &neon::axpy};
#endif

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &kScalar;
    case Isa::Avx2:
#if defined(AIRCOMP_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
#endif
      return nullptr;
    case Isa::Neon:
#if defined(AIRCOMP_HAVE_NEON)
      return &kNeon;  // Advanced SIMD is mandatory on aarch64.
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Table* pick_default() {
  if (const char* env = std::getenv("AIRCOMP_ISA")) {
    if (std::string(env) == "scalar") return &kScalar;
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const Table* t = table_for(isa)) return t;
  }
  return &kScalar;
}

std::atomic<const Table*>& active() {
  static std::atomic<const Table*> table{pick_default()};
  return table;
}

inline const Table& current() { return *active().load(std::memory_order_relaxed); }

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

Isa active_isa() { return current().isa; }

bool isa_available(Isa isa) { return table_for(isa) != nullptr; }

bool force_isa(Isa isa) {
  const Table* t = table_for(isa);
  if (t == nullptr) return false;
  active().store(t, std::memory_order_relaxed);
  return true;
}

double clamped_sum(std::span<const double> base, std::span<const double> slope,
                   std::span<const double> cap, double x) {
  return current().clamped_sum(base, slope, cap, x);
}

double weighted_distortion(double a, std::span<const double> gain,
                           std::span<const double> channel,
                           std::span<const double> target,
                           std::span<const double> weight) {
  return current().weighted_distortion(a, gain, channel, target, weight);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return current().dot(x, y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  current().axpy(alpha, x, y);
}

}  // namespace aircomp::kernels
