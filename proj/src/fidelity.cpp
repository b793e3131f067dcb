#include "entlink/fidelity.hpp"

#include <cmath>
#include <limits>

#include "entlink/errors.hpp"
#include "entlink/polarization.hpp"

namespace entlink {

double loss_fidelity(double eta, double qber) {
  return (eta + (1.0 - eta) * qber) / (1.0 + 3.0 * (1.0 - eta) * qber);
}

double initial_fidelity(double distance, const ScenarioParams& params,
                        SpotModel model) {
  const double eta_eff = transmittance_avg(distance, params.optics, model);
  const double t_trans = distance / params.timing.light_speed;
  const double rot = expected_rotation_fidelity(
      systematic_rotation(t_trans, params.orbit), params.orbit.rotation_sigma);
  return rot * loss_fidelity(eta_eff, params.noise.qber);
}

double damping_probability(double t, double gamma) {
  return -std::expm1(-gamma * t);
}

double survival_probability(double t, double gamma) {
  return std::exp(-2.0 * gamma * t);
}

double stored_fidelity(double f0_prime, double t_store, double gamma) {
  return f0_prime * survival_probability(t_store, gamma);
}

double stored_fidelity_depolarizing(double f0_prime, double t_store,
                                    double gamma) {
  return 0.5 * (1.0 + (2.0 * f0_prime - 1.0) * std::exp(-4.0 * gamma * t_store));
}

double cutoff_time(double distance, double f0_prime, double gamma, double f_th,
                   double light_speed) {
  if (f0_prime < f_th) {
    throw InfeasibleLinkError(f0_prime, f_th);
  }
  return distance / light_speed - std::log(f_th / f0_prime) / (2.0 * gamma);
}

int max_age(double distance, double f0_prime, double gamma, double f_th,
            double slot_dt, AgeConvention convention, double light_speed) {
  const double t_cut = cutoff_time(distance, f0_prime, gamma, f_th, light_speed);
  const double budget = convention == AgeConvention::storage_budget
                            ? t_cut - distance / light_speed
                            : t_cut;
  return static_cast<int>(std::floor(budget / slot_dt));
}

LinkBudget link_budget(double distance, const ScenarioParams& params,
                       SpotModel model, AgeConvention convention) {
  LinkBudget lb;
  lb.distance = distance;
  lb.eta_eff = transmittance_avg(distance, params.optics, model);
  lb.q = capture_probability(distance, params.optics, model);
  lb.t_trans = distance / params.timing.light_speed;
  lb.f_rot = expected_rotation_fidelity(
      systematic_rotation(lb.t_trans, params.orbit),
      params.orbit.rotation_sigma);
  lb.f0_loss = loss_fidelity(lb.eta_eff, params.noise.qber);
  lb.f0_prime = lb.f_rot * lb.f0_loss;
  lb.feasible = lb.f0_prime >= params.noise.fidelity_threshold;
  if (lb.feasible) {
    lb.t_cutoff = cutoff_time(distance, lb.f0_prime, params.noise.damping_rate,
                              params.noise.fidelity_threshold,
                              params.timing.light_speed);
    lb.max_age = max_age(distance, lb.f0_prime, params.noise.damping_rate,
                         params.noise.fidelity_threshold, params.timing.slot_dt,
                         convention, params.timing.light_speed);
    lb.max_age_total = max_age(distance, lb.f0_prime, params.noise.damping_rate,
                               params.noise.fidelity_threshold,
                               params.timing.slot_dt,
                               AgeConvention::total_lifetime,
                               params.timing.light_speed);
  } else {
    lb.t_cutoff = std::numeric_limits<double>::quiet_NaN();
    lb.max_age = 0;
    lb.max_age_total = 0;
  }
  return lb;
}

}  // namespace entlink
