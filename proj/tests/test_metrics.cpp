#include "doctest.h"

#include <cmath>

#include "entlink/errors.hpp"
#include "entlink/feasibility.hpp"
#include "entlink/mcsim.hpp"
#include "entlink/metrics.hpp"

using namespace entlink;

namespace {

StateSpace toy_space(int k) {
  StateSpace s;
  s.distances = {1.0};
  s.max_ages = {k};
  s.offsets = {0, static_cast<std::size_t>(k) + 1};
  return s;
}

TransitionMatrix toy_chain(int k, double lambda, double p_prime) {
  const StateSpace s = toy_space(k);
  return combine(build_request_matrix(s, 1.0, p_prime),
                 build_no_request_matrix(s), lambda);
}

// Scenario whose slot length stretches the 40 km storage budget (~0.223 s)
// into exactly K slots.
ScenarioParams small_k_scenario(double slot_dt, double lambda) {
  ScenarioParams p = default_scenario();
  p.timing.slot_dt = slot_dt;
  p.request_rate = lambda;
  return p;
}

}  // namespace

TEST_CASE("per-slot establishment probability") {
  ScenarioParams p = default_scenario();
  p.optics.pointing_sigma = 0.0;
  CHECK(std::abs(link_p_prime(40e3, p) - 0.6527) < 0.002);

  ScenarioParams half = p;
  half.noise.gen_success = 0.5;
  CHECK(link_p_prime(40e3, half) ==
        doctest::Approx(0.5 * link_p_prime(40e3, p)).epsilon(1e-15));

  // Qualification failure zeroes everything.
  ScenarioParams strict = p;
  strict.noise.fidelity_threshold = 0.99;
  CHECK(link_p_prime(40e3, strict) == 0.0);
}

TEST_CASE("satisfaction rate") {
  const int k = 3;
  const StateSpace s = toy_space(k);
  SUBCASE("certain generation serves every request") {
    const TransitionMatrix t = toy_chain(k, 0.5, 1.0);
    const DistributionVector p0 = point_mass(s, 0, 0);
    for (long tt : {1L, 3L, 10L}) {
      CHECK(satisfaction_rate(tt, 1.0, s, t, p0) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("all mass on empty state gives R = p'") {
    // With lambda = 0 the chain never leaves the empty start.
    const double p_prime = 0.6;
    const TransitionMatrix t = toy_chain(k, 0.0, p_prime);
    const DistributionVector p0 = point_mass(s, 0, 0);
    CHECK(satisfaction_rate(5, p_prime, s, t, p0) ==
          doctest::Approx(p_prime).epsilon(1e-12));
  }
  SUBCASE("window average equals the per-slot average") {
    const double p_prime = 0.6;
    const TransitionMatrix t = toy_chain(k, 0.4, p_prime);
    const DistributionVector p0 = point_mass(s, 0, 0);
    CHECK(avg_satisfaction_rate(1, p_prime, s, t, p0) ==
          doctest::Approx(satisfaction_rate(1, p_prime, s, t, p0))
              .epsilon(1e-15));
    double acc = 0.0;
    const long window = 17;
    for (long tt = 1; tt <= window; ++tt) {
      acc += satisfaction_rate(tt, p_prime, s, t, p0);
    }
    CHECK(avg_satisfaction_rate(window, p_prime, s, t, p0) ==
          doctest::Approx(acc / window).epsilon(1e-12));
  }
  SUBCASE("bounded between p' and 1 from a cold start") {
    const double p_prime = 0.6;
    const TransitionMatrix t = toy_chain(k, 0.4, p_prime);
    const DistributionVector p0 = point_mass(s, 0, 0);
    for (long tt = 1; tt <= 40; ++tt) {
      const double r = satisfaction_rate(tt, p_prime, s, t, p0);
      CHECK(r >= p_prime - 1e-12);
      CHECK(r <= 1.0 + 1e-12);
    }
  }
  SUBCASE("transient rate matches replicated simulation") {
    // Many independent 10-slot replications estimate the window-averaged
    // satisfaction rate from the cold start.
    const double lambda = 0.4;
    const ScenarioParams scen = small_k_scenario(0.07, lambda);  // K = 3
    const StateSpace space = build_state_space(scen);
    REQUIRE(space.max_ages[0] == 3);
    const double p_prime = link_p_prime(40e3, scen);
    const TransitionMatrix t =
        combine(build_request_matrix(space, 40e3, p_prime),
                build_no_request_matrix(space), lambda);
    const double analytic = avg_satisfaction_rate(
        10, p_prime, space, t, point_mass(space, 0, 0));

    SimConfig cfg;
    cfg.scenario = scen;
    cfg.n_slots = 10;
    cfg.n_replications = 200000;
    cfg.seed = 99;
    cfg.burn_in = 0;
    const SimStats stats = run_simulation(cfg);
    REQUIRE(stats.satisfaction_frequency.stderr_ > 0.0);
    CHECK(std::abs(stats.satisfaction_frequency.value - analytic) <
          3.0 * stats.satisfaction_frequency.stderr_);
  }
}

TEST_CASE("expected waiting time") {
  SUBCASE("every-slot requests") {
    const double p_prime = 0.5;
    const double dt = 1e-3;
    const StateSpace s = toy_space(3);
    const TransitionMatrix t = toy_chain(3, 1.0, p_prime);
    CHECK(expected_waiting_time(p_prime, dt, s, t) ==
          doctest::Approx(dt * (1.0 / p_prime - 1.0)).epsilon(1e-10));
    const TransitionMatrix sure = toy_chain(3, 1.0, 1.0);
    CHECK(expected_waiting_time(1.0, dt, s, sure) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("degenerate generation") {
    const StateSpace s = toy_space(2);
    const TransitionMatrix t = toy_chain(2, 0.5, 0.0);
    CHECK_THROWS_AS(expected_waiting_time(0.0, 1e-3, s, t),
                    DegenerateGenerationError);
  }
  SUBCASE("general lambda uses the stationary no-link mass") {
    const double lambda = 0.5, p_prime = 0.6, dt = 1e-3;
    const StateSpace s = toy_space(3);
    const TransitionMatrix t = toy_chain(3, lambda, p_prime);
    const DistributionVector pi = steady_state(t);
    CHECK(expected_waiting_time(p_prime, dt, s, t) ==
          doctest::Approx(no_link_probability(pi, s) * dt / p_prime)
              .epsilon(1e-12));
  }
}

TEST_CASE("utilization") {
  CHECK(utilization(1.0, 224) == 1.0);
  CHECK(utilization(0.0, 224) == 0.0);
  const double direct = [] {
    double s = 0.0;
    for (int k = 1; k <= 224; ++k) {
      s += 0.1 * std::pow(0.9, k - 1);
    }
    return s;
  }();
  CHECK(utilization(0.1, 224) == doctest::Approx(direct).epsilon(1e-12));

  double prev = utilization(0.05, 10);
  for (double l = 0.1; l <= 1.0; l += 0.05) {
    const double cur = utilization(l, 10);
    CHECK(cur > prev);
    prev = cur;
  }
  prev = utilization(0.3, 1);
  for (int k = 2; k <= 30; ++k) {
    const double cur = utilization(0.3, k);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("expected consumption age") {
  const double dt = 1e-3;
  CHECK(expected_consumption_age(1.0, 224, dt) ==
        doctest::Approx(dt).epsilon(1e-12));
  // Uniform-age limit as requests become rare.
  CHECK(expected_consumption_age(1e-9, 224, dt) ==
        doctest::Approx(225.0 * dt / 2.0).epsilon(1e-6));

  // Direct pmf expectation.
  const int k = 5;
  const double lambda = 0.3;
  double norm = 0.0, mean = 0.0;
  for (int age = 1; age <= k; ++age) {
    const double w = lambda * std::pow(1.0 - lambda, age - 1);
    norm += w;
    mean += age * dt * w;
  }
  CHECK(expected_consumption_age(lambda, k, dt) ==
        doctest::Approx(mean / norm).epsilon(1e-12));

  double prev = expected_consumption_age(0.05, 20, dt);
  for (double l = 0.1; l <= 1.0; l += 0.05) {
    const double cur = expected_consumption_age(l, 20, dt);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("expected consumed fidelity") {
  const double gamma = 0.5;
  SUBCASE("every-slot consumption leaves one slot of decay") {
    CHECK(expected_consumed_fidelity(1.0, 224, 1e-3, gamma, 0.65) ==
          doctest::Approx(0.65 * std::exp(-2.0 * gamma * 1e-3))
              .epsilon(1e-15));
  }
  SUBCASE("rare-request limit averages the decay over all ages") {
    const int k = 20;
    double acc = 0.0;
    for (int age = 1; age <= k; ++age) {
      acc += std::exp(-2.0 * gamma * age * 1e-3);
    }
    CHECK(expected_consumed_fidelity(1e-9, k, 1e-3, gamma, 0.65) ==
          doctest::Approx(0.65 * acc / k).epsilon(1e-6));
  }
  SUBCASE("direct pmf expectation") {
    const int k = 5;
    const double lambda = 0.3, dt = 0.01, f0p = 0.65;
    double norm = 0.0, mean = 0.0;
    for (int age = 1; age <= k; ++age) {
      const double w = lambda * std::pow(1.0 - lambda, age - 1);
      norm += w;
      mean += f0p * std::exp(-2.0 * gamma * age * dt) * w;
    }
    CHECK(expected_consumed_fidelity(lambda, k, dt, gamma, f0p) ==
          doctest::Approx(mean / norm).epsilon(1e-12));
  }
  SUBCASE("faster consumption means less decay") {
    double prev = expected_consumed_fidelity(0.05, 20, 1e-2, gamma, 0.65);
    for (double l = 0.1; l <= 1.0; l += 0.05) {
      const double cur = expected_consumed_fidelity(l, 20, 1e-2, gamma, 0.65);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("scenario-level report") {
  ScenarioParams p = small_k_scenario(0.04, 0.3);  // K = 5
  const MetricsReport rep = analyze_scenario(p, 200);
  CHECK(rep.max_age == 5);
  CHECK(rep.p_prime > 0.0);
  CHECK(rep.utilization == doctest::Approx(utilization(0.3, 5)).epsilon(1e-15));
  CHECK(rep.satisfaction_rate_final >= rep.p_prime - 1e-12);
  CHECK(rep.satisfaction_rate_final <= 1.0);
  CHECK(rep.avg_satisfaction >= rep.p_prime - 1e-12);
  CHECK(rep.expected_wait >= 0.0);

  // Consumed fidelity stays within the usable band under the storage-budget
  // convention, and the consumption age within one slot and the maximum.
  const LinkBudget lb = link_budget(40e3, p);
  CHECK(rep.expected_consumed_fidelity >=
        p.noise.fidelity_threshold * (1.0 - 1e-12));
  CHECK(rep.expected_consumed_fidelity <=
        lb.f0_prime * std::exp(-2.0 * p.noise.damping_rate * p.timing.slot_dt) +
            1e-15);
  CHECK(rep.expected_age >= p.timing.slot_dt - 1e-15);
  CHECK(rep.expected_age <= rep.max_age * p.timing.slot_dt + 1e-15);
}
