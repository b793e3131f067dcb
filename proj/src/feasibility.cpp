#include "entlink/feasibility.hpp"

#include <cmath>
#include <functional>

#include "entlink/errors.hpp"
#include "entlink/polarization.hpp"

namespace entlink {

namespace {

// Bisection on a monotone-decreasing residual with a verified sign change.
// Runs until the residual at the midpoint is below res_tol and the interval
// is below x_tol, or the iteration cap is reached.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double x_tol, double res_tol, int max_iters) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw NoRootInBracketError(lo, hi);
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < max_iters; ++i) {
    mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((hi - lo) <= x_tol && std::abs(f_mid) <= res_tol) break;
    if (mid == lo || mid == hi) break;  // interval at machine resolution
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace

bool fidelity_qualifies(double distance, const ScenarioParams& params,
                        SpotModel model) {
  return initial_fidelity(distance, params, model) >=
         params.noise.fidelity_threshold;
}

FeasibilityCheck dmax_feasible(double f_th, double qber) {
  if (!(f_th > 0.0 && f_th < 1.0)) {
    return {false, "threshold outside (0,1)"};
  }
  if (qber < 0.0) {
    return {false, "negative qber"};
  }
  // The closed form needs 0 < (1-f_th)/(1+qber*(3*f_th-1)) < 1, checked on
  // the same expression the formula evaluates. For f_th >= 1/3 both hold
  // automatically; below that the upper bound is qber < f_th/(1-3*f_th),
  // strictly, and the lower one qber < 1/(1-3*f_th).
  const double denom = 1.0 + qber * (3.0 * f_th - 1.0);
  if (denom <= 0.0) {
    return {false, "logarithm argument non-positive: qber too large"};
  }
  if ((1.0 - f_th) / denom >= 1.0) {
    return {false, "qber >= f_th/(1-3*f_th): radical would be non-positive"};
  }
  return {true, ""};
}

DmaxResult dmax_closed_form(double f_th, double qber,
                            const OpticsParams& optics) {
  const FeasibilityCheck fc = dmax_feasible(f_th, qber);
  if (!fc.feasible) {
    throw InfeasibleError(fc.reason);
  }
  const double theta = optics.divergence_half_angle;
  const double r = optics.aperture_radius;
  const double log_arg = (1.0 - f_th) / (1.0 + qber * (3.0 * f_th - 1.0));
  const double d = std::sqrt(-2.0 * r * r / (theta * theta * std::log(log_arg)));

  DmaxResult res;
  res.d_max = d;
  res.method = DmaxMethod::closed_form;
  const double eta = transmittance_ideal(d, optics, SpotModel::far_field);
  res.residual = std::abs(loss_fidelity(eta, qber) - f_th);
  res.feasible = true;
  return res;
}

DmaxResult dmax_with_rotation(double f_th, double qber,
                              const OpticsParams& optics,
                              const OrbitParams& orbit, SpotModel model,
                              double light_speed) {
  const FeasibilityCheck fc = dmax_feasible(f_th, qber);
  if (!fc.feasible) {
    throw InfeasibleError(fc.reason);
  }
  const auto fidelity_at = [&](double d) {
    const double eta = transmittance_ideal(d, optics, model);
    const double rot = expected_rotation_fidelity(
        systematic_rotation(d / light_speed, orbit), orbit.rotation_sigma);
    return rot * loss_fidelity(eta, qber);
  };
  const auto residual = [&](double d) { return fidelity_at(d) - f_th; };

  const double hi = 4.0 * dmax_closed_form(f_th, qber, optics).d_max;
  const double root = bisect_root(residual, 1.0, hi, 1e-6, 1e-12, 200);

  DmaxResult res;
  res.d_max = root;
  res.method = DmaxMethod::transcendental;
  res.residual = std::abs(residual(root));
  res.feasible = true;
  return res;
}

double scenario_dmax(const ScenarioParams& params, SpotModel model) {
  const double f_th = params.noise.fidelity_threshold;
  const auto residual = [&](double d) {
    return initial_fidelity(d, params, model) - f_th;
  };
  // The fidelity approaches its loss-free limit as d -> 0 and decays towards
  // qber/(1+3*qber) at long range; bracket by expanding until the sign flips.
  double lo = 1.0;
  if (residual(lo) <= 0.0) {
    throw InfeasibleError("fidelity below threshold even at 1 m");
  }
  double hi = 100e3;
  while (residual(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e9) {
      throw NoRootInBracketError(lo, hi);
    }
  }
  return bisect_root(residual, lo, hi, 1e-6, 1e-12, 200);
}

double min_aperture_for_range(double target_distance, double f_th, double qber,
                              const OpticsParams& base,
                              std::span<const double> grid) {
  OpticsParams optics = base;
  for (double aperture : grid) {
    optics.aperture_radius = aperture;
    if (dmax_closed_form(f_th, qber, optics).d_max >= target_distance) {
      return aperture;
    }
  }
  throw NotAchievableError("no grid aperture reaches " +
                           std::to_string(target_distance / 1e3) + " km");
}

}  // namespace entlink
