#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aircomp/errors.hpp"
#include "aircomp/experiments.hpp"
#include "aircomp/model.hpp"
#include "aircomp/rng.hpp"
#include "fixtures.hpp"

using namespace aircomp;

namespace {

ProblemInstance unit_pair(double S_T) { return {{{1, 1, 1, 100}, {1, 1, 1, 100}}, S_T, 1.0}; }

ProblemInstance reference_instance() {
  ProblemInstance inst;
  for (double D : default_dataset_sizes()) inst.devices.push_back({1.0, kDefaultBMax, 1.0, D});
  inst.S_T = kDefaultST;
  return inst;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("validate_instance") {
  CHECK(validate_instance(unit_pair(150)).ok);
  const auto bad = validate_instance(unit_pair(250));
  CHECK_FALSE(bad.ok);
  CHECK(bad.constraint == "S_T exceeds sum D");
  CHECK(bad.message == "S_T exceeds ΣD");
  CHECK(validate_instance(reference_instance()).ok);

  ProblemInstance empty{{}, 1.0, 1.0};
  CHECK(validate_instance(empty).constraint == "K");
  auto inst = unit_pair(150);
  inst.devices[1].h = 0.0;
  CHECK(validate_instance(inst).constraint == "h");
  inst = unit_pair(150);
  inst.devices[0].c = -1.0;
  CHECK(validate_instance(inst).constraint == "c");
  inst = unit_pair(150);
  inst.sigma2 = 0.0;
  CHECK(validate_instance(inst).constraint == "sigma2");
  inst = unit_pair(150);
  inst.devices[0].b_max = NAN;
  CHECK(validate_instance(inst).constraint == "b_max");
  CHECK_THROWS_AS(require_valid(unit_pair(250)), ValidationError);
}

TEST_CASE("mse with the data indicator") {
  const auto inst = unit_pair(100);
  const std::vector<double> ones{1, 1};
  CHECK(mse(inst, 0.5, ones, std::vector<double>{50, 50}) == doctest::Approx(0.25));
  CHECK(mse(inst, 1.0, std::vector<double>{0, 1}, std::vector<double>{0, 100}) ==
        doctest::Approx(1.0));
  CHECK(mse(inst, 0.4, ones, std::vector<double>{50, 50}) == doctest::Approx(0.18));
  CHECK_THROWS_AS(mse(inst, 1.0, ones, std::vector<double>{0, 0}), DegenerateWeightsError);
  CHECK_THROWS_AS(mse(inst, 0.0, ones, std::vector<double>{1, 1}), ValidationError);
  CHECK_THROWS_AS(mse(inst, 1.0, std::vector<double>{2, 1}, std::vector<double>{1, 1}),
                  ValidationError);
}

TEST_CASE("mse_beta matches mse on the same weights") {
  const auto inst = unit_pair(100);
  const std::vector<double> ones{1, 1};
  for (double a : {0.5, 0.4}) {
    const std::vector<double> S{50, 50};
    CHECK(mse_beta(inst, a, ones, beta_from_S(S)) == doctest::Approx(mse(inst, a, ones, S)));
  }
  // Single active device offset exactly: only the noise floor remains.
  ProblemInstance wide{{{1, 2, 1, 100}, {1, 2, 1, 100}}, 100.0, 1.0};
  const double a = 0.7;
  CHECK(mse_beta(wide, a, std::vector<double>{1.0 / a, 0.0}, WeightVector{{1.0, 0.0}}) ==
        doctest::Approx(a * a));
}

TEST_CASE("beta_max") {
  CHECK(beta_max(reference_instance())[0] == doctest::Approx(0.099475).epsilon(1e-12));
  CHECK(beta_max(unit_pair(200)) == std::vector<double>{0.5, 0.5});
  CHECK(beta_max(unit_pair(100)) == std::vector<double>{1.0, 1.0});
}

TEST_CASE("beta_from_S and S_from_beta") {
  const auto w = beta_from_S(std::vector<double>{50, 50});
  CHECK(w.beta == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(beta_from_S(std::vector<double>{0, 0}), DegenerateWeightsError);

  const auto S = S_from_beta(WeightVector{{0.6, 0.4}}, unit_pair(50));
  CHECK(S[0] == doctest::Approx(100.0));
  CHECK(S[1] == doctest::Approx(200.0 / 3.0));
  const auto S2 = S_from_beta(WeightVector{{0.5, 0.5}}, unit_pair(100));
  CHECK(S2[0] == doctest::Approx(100.0));
  CHECK(S2[1] == doctest::Approx(100.0));

  CHECK_THROWS_AS(S_from_beta(WeightVector{{0.0, 0.0}}, unit_pair(50)), DegenerateWeightsError);
  CHECK_THROWS_AS(S_from_beta(WeightVector{{0.9, 0.1}}, unit_pair(200)), ValidationError);
}

TEST_CASE("floor with repair keeps the data threshold") {
  ProblemInstance inst{{{1, 1, 1, 10}, {1, 1, 1, 10}, {1, 1, 1, 10}}, 25.0, 1.0};
  // Continuous: Xi = 0.4 / 10, S = (10, 8.75, 6.25); floors sum to 24 < 25.
  const WeightVector w{{0.4, 0.35, 0.25}};
  const auto cont = S_from_beta(w, inst);
  CHECK(cont[1] == doctest::Approx(8.75));
  const auto S = S_from_beta(w, inst, Rounding::FloorWithRepair);
  CHECK(S == std::vector<double>{10, 9, 6});  // 0.75 > 0.25: device 1 repaired first
  for (std::size_t k = 0; k < 3; ++k) CHECK(S[k] <= inst.devices[k].D);
  CHECK(std::accumulate(S.begin(), S.end(), 0.0) >= inst.S_T);
}

TEST_CASE("beta -> S -> beta round trip on random feasible weights") {
  CounterRng rng(5, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t K = 1 + static_cast<std::size_t>(rng.below(6));
    ProblemInstance inst;
    for (std::size_t k = 0; k < K; ++k) inst.devices.push_back({1, 1, 1, 50 + 100 * rng.uniform()});
    inst.S_T = (0.3 + 0.7 * rng.uniform()) * inst.total_data();
    // Random feasible weights: project positive noise onto the capped simplex
    // by repeated proportional scaling and clipping.
    const auto cap = beta_max(inst);
    std::vector<double> beta(K);
    for (auto& b : beta) b = rng.uniform() + 1e-3;
    for (int it = 0; it < 200; ++it) {
      double s = std::accumulate(beta.begin(), beta.end(), 0.0);
      for (std::size_t k = 0; k < K; ++k) beta[k] = std::min(beta[k] / s, cap[k]);
    }
    const double s = std::accumulate(beta.begin(), beta.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-12) continue;
    const WeightVector w{beta};
    const auto S = S_from_beta(w, inst);
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      CHECK(S[k] <= inst.devices[k].D + 1e-9);
      total += S[k];
    }
    CHECK(total >= inst.S_T - 1e-6);
    const auto back = beta_from_S(S);
    for (std::size_t k = 0; k < K; ++k) CHECK(back.beta[k] == doctest::Approx(beta[k]).epsilon(1e-12));
  }
}

TEST_CASE("eliminate_b") {
  ProblemInstance one{{{1, 1, 1, 100}}, 50.0, 1.0};
  CHECK(eliminate_b(one, 1.0, WeightVector{{0.5}})[0] == doctest::Approx(0.5));
  CHECK(eliminate_b(one, 0.4, WeightVector{{0.8}})[0] == 1.0);
  CHECK(eliminate_b(one, 0.4, WeightVector{{0.0}})[0] == 0.0);
}

TEST_CASE("objective bounds: noise floor and b elimination") {
  CounterRng rng(17, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = fixtures::random_instance(1 + rng.below(5), 100 + trial);
    const std::size_t K = inst.size();
    const double a = 0.01 + 0.3 * rng.uniform();
    std::vector<double> b(K), S(K);
    for (std::size_t k = 0; k < K; ++k) {
      b[k] = inst.devices[k].b_max * rng.uniform();
      S[k] = inst.devices[k].D * (0.5 + 0.5 * rng.uniform());
    }
    const double raw = mse(inst, a, b, S);
    CHECK(raw >= a * a * inst.sigma2);
    const WeightVector w = beta_from_S(S);
    CHECK(raw >= mse_beta(inst, a, eliminate_b(inst, a, w), w) - 1e-15);
  }
}

}  // TEST_SUITE
