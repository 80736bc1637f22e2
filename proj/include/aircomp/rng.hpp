#pragma once
// Counter-based random streams.
//
// A stream is identified by (seed, stream id). Draw i of the stream is
//
//   key  = mix64(seed ^ mix64(stream + GAMMA))
//   u64  = mix64(key + (i + 1) * GAMMA)
//
// where GAMMA = 0x9e3779b97f4a7c15 and mix64 is the SplitMix64 finalizer
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   z =  z ^ (z >> 31)
// (all arithmetic mod 2^64). Uniforms take the top 53 bits: (u64 >> 11) * 2^-53.
// The construction is plain integer arithmetic so other implementations can
// reproduce the exact streams.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace aircomp {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream + kGoldenGamma))) {}

  /// Raw 64-bit draw at absolute position `index` (does not advance).
  constexpr std::uint64_t at(std::uint64_t index) const {
    return mix64(key_ + (index + 1) * kGoldenGamma);
  }

  constexpr std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n), n > 0, by modulo reduction (bias < n / 2^64).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller; consumes two draws, keeps the cosine branch.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Rayleigh with scale `sigma` by inversion: sigma * sqrt(-2 ln(1 - u)).
  double rayleigh(double sigma) { return sigma * std::sqrt(-2.0 * std::log1p(-uniform())); }

  constexpr std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aircomp
