#pragma once

#include <complex>

#include "entlink/params.hpp"

namespace entlink {

struct RotationModel {
  double systematic_angle = 0.0;  // rad
  double jitter_sigma = 0.0;      // rad
};

// Single-photon polarization state in the {H, V} basis.
struct PolarizationAmplitudes {
  std::complex<double> amp_h;
  std::complex<double> amp_v;

  double norm_sq() const {
    return std::norm(amp_h) + std::norm(amp_v);
  }
};

// Deterministic rotation accumulated over time t from orbital motion:
// v_sat * t / (RE + h_sat).
double systematic_rotation(double elapsed, const OrbitParams& orbit);

// Rotation about the propagation axis by `angle`:
// (cos, -sin; sin, cos) applied to (amp_h, amp_v). Norm preserving.
PolarizationAmplitudes apply_propagation_rotation(
    const PolarizationAmplitudes& state, double angle);

// Fidelity of a Bell pair after one photon is rotated by `angle`: cos^2.
double rotated_bell_fidelity(double angle);

// Expectation of the rotated-pair fidelity over Gaussian jitter:
// (1 + cos(2*systematic) * exp(-2*sigma^2)) / 2.
double expected_rotation_fidelity(double systematic_angle,
                                  double jitter_sigma);

inline double expected_rotation_fidelity(const RotationModel& model) {
  return expected_rotation_fidelity(model.systematic_angle,
                                    model.jitter_sigma);
}

}  // namespace entlink
