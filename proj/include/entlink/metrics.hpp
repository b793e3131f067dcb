#pragma once

#include "entlink/markov.hpp"
#include "entlink/params.hpp"

namespace entlink {

struct MetricsReport {
  double p_prime = 0.0;
  double satisfaction_rate_final = 0.0;  // R(t) at the window end
  double avg_satisfaction = 0.0;         // mean of R(t) over the window
  double expected_wait = 0.0;            // s
  double utilization = 0.0;
  double expected_age = 0.0;             // s
  double expected_consumed_fidelity = 0.0;
  double iota = 0.0;                     // (1-lambda)*exp(-2*gamma*dt)
  int max_age = 0;
  AgeConvention convention = AgeConvention::storage_budget;
};

// Per-slot probability that a request is answerable by a fresh link:
// p * q(d) * [fidelity qualifies].
double link_p_prime(double d_new, const ScenarioParams& params,
                    SpotModel model = SpotModel::exact);

// R(t) = 1 - P0(t) * (1 - p'), with P0(t) evolved from p0. t >= 1.
double satisfaction_rate(long t, double p_prime, const StateSpace& space,
                         const TransitionMatrix& transition,
                         const DistributionVector& p0);

// Mean of R(t) over t = 1..window.
double avg_satisfaction_rate(long window, double p_prime,
                             const StateSpace& space,
                             const TransitionMatrix& transition,
                             const DistributionVector& p0);

// P0(inf) * dt / p', with P0(inf) from the stationary distribution.
// Throws DegenerateGenerationError when p' = 0.
double expected_waiting_time(double p_prime, double slot_dt,
                             const StateSpace& space,
                             const TransitionMatrix& transition);

// Fraction of generated links consumed before expiry: 1 - (1-lambda)^K.
double utilization(double lambda, int max_age);

// Expected storage age at consumption, in seconds:
// (lambda*dt / (1-(1-lambda)^K)) * sum_{k=1..K} k*(1-lambda)^(k-1).
double expected_consumption_age(double lambda, int max_age, double slot_dt);

// Expected fidelity of a consumed link. Geometric closed form with the
// iota -> 1 limit handled analytically.
double expected_consumed_fidelity(double lambda, int max_age, double slot_dt,
                                  double gamma, double f0_prime);

// (1-lambda)^k computed stably through exp(k*log1p(-lambda)).
double no_request_run_probability(double lambda, int k);

// Full analytic report for the scenario's request distance.
MetricsReport analyze_scenario(const ScenarioParams& params, long window_slots,
                               SpotModel model = SpotModel::exact,
                               AgeConvention convention = AgeConvention::storage_budget);

}  // namespace entlink
