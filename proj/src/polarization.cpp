#include "entlink/polarization.hpp"

#include <cmath>

namespace entlink {

double systematic_rotation(double elapsed, const OrbitParams& orbit) {
  return orbit.sat_speed * elapsed / (orbit.earth_radius + orbit.altitude);
}

PolarizationAmplitudes apply_propagation_rotation(
    const PolarizationAmplitudes& state, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return PolarizationAmplitudes{c * state.amp_h - s * state.amp_v,
                                s * state.amp_h + c * state.amp_v};
}

double rotated_bell_fidelity(double angle) {
  const double c = std::cos(angle);
  return c * c;
}

double expected_rotation_fidelity(double systematic_angle,
                                  double jitter_sigma) {
  return 0.5 * (1.0 + std::cos(2.0 * systematic_angle) *
                          std::exp(-2.0 * jitter_sigma * jitter_sigma));
}

}  // namespace entlink
