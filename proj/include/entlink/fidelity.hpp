#pragma once

#include "entlink/optics.hpp"
#include "entlink/params.hpp"

namespace entlink {

// How the discrete maximum age K is taken from the cutoff time.
//  storage_budget: K = floor((T_cutoff - t_trans) / dt) -- counts storage
//                  slots only, matching the state definition. Default.
//  total_lifetime: K = floor(T_cutoff / dt) -- divides the whole lifetime,
//                  transmission included.
enum class AgeConvention { storage_budget, total_lifetime };

// Everything derived for one link distance.
struct LinkBudget {
  double distance = 0.0;   // m
  double eta_eff = 0.0;    // pointing-averaged transmittance
  double q = 0.0;          // capture probability
  double f_rot = 1.0;      // expected rotation fidelity factor
  double f0_loss = 0.0;    // loss-limited fidelity before rotation
  double f0_prime = 0.0;   // delivered fidelity f_rot * f0_loss
  double t_trans = 0.0;    // one-way transmission time, s
  bool feasible = false;   // f0_prime >= threshold
  double t_cutoff = 0.0;   // maximum lifetime, s; meaningful iff feasible
  int max_age = 0;         // K under the requested convention; 0 if infeasible
  int max_age_total = 0;   // K under total_lifetime, for reference
};

// Bell-state fidelity under photon loss with background error rate `qber`:
// (eta + (1-eta)*qber) / (1 + 3*(1-eta)*qber).
double loss_fidelity(double eta, double qber);

// Delivered fidelity at distance d: rotation expectation times loss fidelity,
// with the pointing-averaged transmittance feeding the loss term.
double initial_fidelity(double distance, const ScenarioParams& params,
                        SpotModel model = SpotModel::exact);

// Amplitude-damping probability 1 - exp(-gamma*t).
double damping_probability(double t, double gamma);

// Probability both qubits of a stored pair survive: exp(-2*gamma*t).
double survival_probability(double t, double gamma);

// Stored-pair fidelity after t_store seconds: f0_prime * exp(-2*gamma*t).
double stored_fidelity(double f0_prime, double t_store, double gamma);

// Alternative storage decay that saturates at 1/2 instead of 0:
// (1 + (2*f0_prime - 1) * exp(-4*gamma*t)) / 2. Not used by the metrics.
double stored_fidelity_depolarizing(double f0_prime, double t_store,
                                    double gamma);

// Maximum pair lifetime before the stored fidelity crosses f_th:
// d/c - ln(f_th/f0_prime) / (2*gamma).
// Throws InfeasibleLinkError when f0_prime < f_th.
double cutoff_time(double distance, double f0_prime, double gamma, double f_th,
                   double light_speed = kLightSpeed);

// Discrete maximum storage age K. Throws InfeasibleLinkError as above.
int max_age(double distance, double f0_prime, double gamma, double f_th,
            double slot_dt, AgeConvention convention = AgeConvention::storage_budget,
            double light_speed = kLightSpeed);

// Assembles the full per-distance budget. Never throws on infeasible links;
// they come back with feasible=false and max_age=0.
LinkBudget link_budget(double distance, const ScenarioParams& params,
                       SpotModel model = SpotModel::exact,
                       AgeConvention convention = AgeConvention::storage_budget);

}  // namespace entlink
