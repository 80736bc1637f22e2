#pragma once
// Small instances with hand-derived optima shared across test files.

#include <cstdint>
#include <vector>

#include "aircomp/experiments.hpp"
#include "aircomp/model.hpp"
#include "aircomp/rng.hpp"

namespace fixtures {

// Two identical devices, h = b_max = c = sigma2 = 1, beta_max = 0.8.
// a_th = 0.5; optimum a* = 1/3, MSE = 1/6.
inline aircomp::ProblemInstance symmetric() {
  return {{{1, 1, 1, 100}, {1, 1, 1, 100}}, 125.0, 1.0};
}

// One device, beta_max = 1. E(a) = (a - 1)^2 + a^2 on (0, 1); a* = 0.5, MSE = 0.5.
inline aircomp::ProblemInstance single() { return {{{1, 1, 1, 100}}, 100.0, 1.0}; }

// h = (2, 1), beta_max = (0.6, 0.9). Device 0 leaves its cap at a = 0.2
// inside B_0 = (0, 0.3); optimum a* = 4/15, MSE = 7/75.
inline aircomp::ProblemInstance crossing() {
  return {{{2, 1, 1, 60}, {1, 1, 1, 90}}, 100.0, 1.0};
}

// Rayleigh channels at the reference mean, b_max = sqrt(10), c = sigma2 = 1,
// D from the reference list, S_T = fraction * sum D.
inline aircomp::ProblemInstance random_instance(std::size_t K, std::uint64_t seed,
                                                double st_fraction = 0.8) {
  const auto h = aircomp::sample_channels(K, aircomp::kDefaultHMean, seed);
  aircomp::ProblemInstance inst;
  inst.sigma2 = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    inst.devices.push_back({h[k], aircomp::kDefaultBMax, 1.0,
                            aircomp::default_dataset_sizes()[k % 20]});
  }
  inst.S_T = st_fraction * inst.total_data();
  return inst;
}

}  // namespace fixtures
