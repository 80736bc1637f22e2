#include <cmath>
#include <numbers>

#include "aircomp/errors.hpp"
#include "aircomp/experiments.hpp"
#include "aircomp/rng.hpp"

namespace aircomp {

const std::vector<double>& default_dataset_sizes() {
  static const std::vector<double> sizes{3979, 3974, 3985, 3933, 4026, 3984, 3972,
                                         3961, 3991, 3986, 4051, 3972, 3921, 3991,
                                         3983, 3937, 3958, 4058, 4033, 4051};
  return sizes;
}

std::vector<double> sample_channels(std::size_t K, double h_mean, std::uint64_t seed,
                                    std::uint64_t stream) {
  if (!(h_mean > 0.0) || !std::isfinite(h_mean)) {
    throw ValidationError("h_mean must be positive and finite");
  }
  // Rayleigh(s) has mean s * sqrt(pi / 2).
  const double scale = h_mean * std::sqrt(2.0 / std::numbers::pi);
  CounterRng rng(seed, stream);
  std::vector<double> h(K);
  for (auto& v : h) v = rng.rayleigh(scale);
  return h;
}

}  // namespace aircomp
