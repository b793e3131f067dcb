#pragma once

#include <span>

#include "entlink/fidelity.hpp"
#include "entlink/optics.hpp"
#include "entlink/params.hpp"

namespace entlink {

struct FeasibilityCheck {
  bool feasible = false;
  std::string reason;  // names the violated condition when infeasible
};

enum class DmaxMethod { closed_form, transcendental };

struct DmaxResult {
  double d_max = 0.0;   // m
  DmaxMethod method = DmaxMethod::closed_form;
  double residual = 0.0;  // |fidelity(d_max) - f_th|
  bool feasible = true;
};

// 1 iff the delivered fidelity at d meets the threshold (equivalently,
// d <= d_max, since the fidelity is monotone decreasing in d).
bool fidelity_qualifies(double distance, const ScenarioParams& params,
                        SpotModel model = SpotModel::exact);

// Existence conditions for a positive closed-form d_max:
// always satisfied for f_th >= 1/3; for f_th < 1/3 requires
// qber < f_th / (1 - 3*f_th), strictly.
FeasibilityCheck dmax_feasible(double f_th, double qber);

// Closed form from the loss-only fidelity with far-field transmittance:
// sqrt(-2*R_ap^2 / (theta^2 * ln[(1-f_th) / (1 + qber*(3*f_th - 1))])).
// Throws InfeasibleError when dmax_feasible fails.
DmaxResult dmax_closed_form(double f_th, double qber,
                            const OpticsParams& optics);

// Rotation-inclusive maximum distance: solves
//   expected_rotation_fidelity(theta_sys(d/c), sigma_rot) * F0(eta(d)) = f_th
// for d by bracketed bisection. The transmittance model defaults to far_field
// so the result is directly comparable with the closed form.
// Throws InfeasibleError / NoRootInBracketError.
DmaxResult dmax_with_rotation(double f_th, double qber,
                              const OpticsParams& optics,
                              const OrbitParams& orbit,
                              SpotModel model = SpotModel::far_field,
                              double light_speed = kLightSpeed);

// Maximum distance under the full scenario fidelity (pointing-averaged,
// rotation included, chosen spot model). Root of initial_fidelity(d) = f_th.
double scenario_dmax(const ScenarioParams& params,
                     SpotModel model = SpotModel::exact);

// Smallest aperture radius from `grid` (ascending, metres) whose closed-form
// d_max reaches target_distance. Throws NotAchievableError.
double min_aperture_for_range(double target_distance, double f_th, double qber,
                              const OpticsParams& base,
                              std::span<const double> grid);

}  // namespace entlink
