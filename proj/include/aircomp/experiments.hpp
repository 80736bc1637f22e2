#pragma once
// Baseline policies, Rayleigh channel sampling and parameter sweeps.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aircomp/io.hpp"
#include "aircomp/model.hpp"

namespace aircomp {

/// Mean of a unit-variance Rayleigh variable: sqrt(pi / (4 - pi)).
inline const double kDefaultHMean = std::sqrt(std::numbers::pi / (4.0 - std::numbers::pi));
inline const double kDefaultBMax = std::sqrt(10.0);
inline constexpr double kDefaultST = 40000.0;

/// Dataset sizes of the 20-device reference setup.
const std::vector<double>& default_dataset_sizes();

/// K i.i.d. Rayleigh gains with mean h_mean (scale h_mean * sqrt(2 / pi)),
/// drawn from CounterRng(seed, stream). Draw k of the stream is device k, so
/// a shorter request is a prefix of a longer one.
std::vector<double> sample_channels(std::size_t K, double h_mean, std::uint64_t seed,
                                    std::uint64_t stream = 0);

enum class Policy { Proposed, Cop, Tpc, AirFedSgd };

inline constexpr std::array<Policy, 4> kAllPolicies{Policy::Proposed, Policy::Cop, Policy::Tpc,
                                                    Policy::AirFedSgd};

std::string_view to_string(Policy p);
/// Case-insensitive; throws ValidationError on unknown names.
Policy parse_policy(std::string_view name);

/// Smallest a at which every device can offset beta_k = D_k / sum D exactly.
double full_data_gain_bound(const ProblemInstance& inst);

/// Allocation produced by a policy. Baselines use S = D; mse is evaluated by mse().
Allocation run_policy(const ProblemInstance& inst, Policy policy);

enum class SweepAxis { ST, K, HMean, Sigma2 };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

/// Base instance for a sweep; the swept field is overwritten per value.
struct InstanceTemplate {
  std::size_t K = 20;
  std::vector<double> D;  ///< empty: reference sizes, repeated when K > 20
  std::optional<double> S_T = kDefaultST;
  std::optional<double> S_T_fraction;  ///< S_T = fraction * sum D; overrides S_T
  double sigma2 = 1.0;
  double h_mean = kDefaultHMean;
  double b_max = kDefaultBMax;
  double c = 1.0;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::ST;
  std::vector<double> values;
  std::size_t trials = 1;
  std::uint64_t seed = 42;
  InstanceTemplate base;
};

SweepSpec sweep_spec_from_json(const json& doc);
json to_json(const SweepSpec& spec);
/// values strictly increasing, trials >= 1, K values positive integers.
void validate_sweep(const SweepSpec& spec);

/// Instance for one (value, trial) cell. Channels come from stream
/// (axis ordinal << 32) | trial of the spec seed and do not depend on the
/// value, so every value of one trial sees the same channel draws.
ProblemInstance sweep_instance(const SweepSpec& spec, double value, std::size_t trial);

struct SweepRow {
  double value = 0.0;
  std::size_t trial = 0;
  Policy policy = Policy::Proposed;
  double mse = 0.0;
  double a_star = 0.0;
  double runtime_ms = 0.0;
};

struct SweepOptions {
  std::size_t threads = 1;
};

/// Rows ordered by value, trial, policy regardless of thread count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& opts = {});

/// CSV `axis,value,trial,policy,mse,a_star,runtime_ms`. For each value: the
/// per-trial rows, then one row per policy with trial = "mean". runtime_ms is
/// left empty unless with_timing, so untimed output is byte-reproducible.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows,
                     bool with_timing);

}  // namespace aircomp
