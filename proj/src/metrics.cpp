#include "entlink/metrics.hpp"

#include <cmath>
#include <limits>

#include "entlink/errors.hpp"
#include "entlink/feasibility.hpp"
#include "entlink/optics.hpp"

namespace entlink {

double no_request_run_probability(double lambda, int k) {
  if (lambda >= 1.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log1p(-lambda));
}

double link_p_prime(double d_new, const ScenarioParams& params,
                    SpotModel model) {
  const double qualifies =
      fidelity_qualifies(d_new, params, model) ? 1.0 : 0.0;
  return params.noise.gen_success *
         capture_probability(d_new, params.optics, model) * qualifies;
}

double satisfaction_rate(long t, double p_prime, const StateSpace& space,
                         const TransitionMatrix& transition,
                         const DistributionVector& p0) {
  // The request arriving in slot t sees the state the chain is in at the
  // start of that slot, i.e. after t-1 transitions from p0.
  DistributionVector cur = p0;
  for (long s = 1; s < t; ++s) cur = step(cur, transition);
  return 1.0 - no_link_probability(cur, space) * (1.0 - p_prime);
}

double avg_satisfaction_rate(long window, double p_prime,
                             const StateSpace& space,
                             const TransitionMatrix& transition,
                             const DistributionVector& p0) {
  DistributionVector cur = p0;
  double acc = 0.0;
  for (long s = 1; s <= window; ++s) {
    acc += no_link_probability(cur, space);
    if (s < window) cur = step(cur, transition);
  }
  return 1.0 - (1.0 - p_prime) * acc / static_cast<double>(window);
}

double expected_waiting_time(double p_prime, double slot_dt,
                             const StateSpace& space,
                             const TransitionMatrix& transition) {
  if (p_prime <= 0.0) {
    throw DegenerateGenerationError();
  }
  const DistributionVector pi = steady_state(transition);
  return no_link_probability(pi, space) * slot_dt / p_prime;
}

double utilization(double lambda, int max_age) {
  return 1.0 - no_request_run_probability(lambda, max_age);
}

double expected_consumption_age(double lambda, int max_age, double slot_dt) {
  const double consumed = 1.0 - no_request_run_probability(lambda, max_age);
  double weighted = 0.0;
  for (int k = 1; k <= max_age; ++k) {
    weighted += static_cast<double>(k) * no_request_run_probability(lambda, k - 1);
  }
  return lambda * slot_dt * weighted / consumed;
}

double expected_consumed_fidelity(double lambda, int max_age, double slot_dt,
                                  double gamma, double f0_prime) {
  const double decay = std::exp(-2.0 * gamma * slot_dt);
  const double iota = (1.0 - lambda) * decay;
  const double consumed = 1.0 - no_request_run_probability(lambda, max_age);
  // Geometric sum over consumption ages; take the analytic limit when the
  // ratio degenerates to 1 instead of dividing by 1 - iota.
  double geom;
  if (1.0 - iota < 1e-12) {
    geom = static_cast<double>(max_age);
  } else {
    geom = (1.0 - std::pow(iota, max_age)) / (1.0 - iota);
  }
  return f0_prime * decay * lambda * geom / consumed;
}

MetricsReport analyze_scenario(const ScenarioParams& params, long window_slots,
                               SpotModel model, AgeConvention convention) {
  const double lambda = params.request_rate;
  const double d_new = params.request_distance;

  MetricsReport rep;
  rep.convention = convention;
  rep.p_prime = link_p_prime(d_new, params, model);

  const StateSpace space = build_state_space(params, model, convention);
  const std::size_t j_new = space.distance_index(d_new);
  rep.max_age = space.max_ages[j_new];

  const TransitionMatrix t_req =
      build_request_matrix(space, d_new, rep.p_prime);
  const TransitionMatrix t_norq = build_no_request_matrix(space);
  const TransitionMatrix t = combine(t_req, t_norq, lambda);
  const DistributionVector p0 = point_mass(space, 0, j_new);

  DistributionVector cur = p0;
  double p0_acc = 0.0;
  for (long s = 1; s <= window_slots; ++s) {
    p0_acc += no_link_probability(cur, space);
    if (s < window_slots) cur = step(cur, t);
  }
  const double p0_final = no_link_probability(cur, space);
  rep.satisfaction_rate_final = 1.0 - p0_final * (1.0 - rep.p_prime);
  rep.avg_satisfaction =
      1.0 - (1.0 - rep.p_prime) * p0_acc / static_cast<double>(window_slots);

  rep.expected_wait =
      rep.p_prime > 0.0
          ? expected_waiting_time(rep.p_prime, params.timing.slot_dt, space, t)
          : std::numeric_limits<double>::infinity();

  const double gamma = params.noise.damping_rate;
  const double dt = params.timing.slot_dt;
  rep.iota = (1.0 - lambda) * std::exp(-2.0 * gamma * dt);
  if (rep.max_age >= 1 && lambda > 0.0) {
    const LinkBudget lb = link_budget(d_new, params, model, convention);
    rep.utilization = utilization(lambda, rep.max_age);
    rep.expected_age = expected_consumption_age(lambda, rep.max_age, dt);
    rep.expected_consumed_fidelity = expected_consumed_fidelity(
        lambda, rep.max_age, dt, gamma, lb.f0_prime);
  }
  return rep;
}

}  // namespace entlink
