#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace entlink {

// Physical constants (SI).
inline constexpr double kLightSpeed = 2.99792458e8;  // m/s
inline constexpr double kEarthRadius = 6.371e6;      // m

// Transmitter/receiver optics. All lengths in metres, angles in radians.
struct OpticsParams {
  double wavelength = 810e-9;          // single-photon wavelength
  double divergence_half_angle = 5e-6; // beam divergence half angle
  double aperture_radius = 0.15;       // receiving telescope radius
  double pointing_sigma = 0.5e-6;      // per-axis pointing jitter std dev
};

// Beam waist radius at the transmitter, W0 = wavelength / (pi * theta).
double beam_waist(const OpticsParams& optics);

struct OrbitParams {
  double sat_speed = 7589.0;       // orbital speed, m/s
  double altitude = 5.5e5;         // orbit altitude above ground, m
  double earth_radius = kEarthRadius;
  double rotation_sigma = 0.7e-6;  // polarization-rotation jitter std dev, rad
};

struct NoiseParams {
  double qber = 0.01;              // quantum bit error rate, in [0,1)
  double damping_rate = 0.5;       // memory amplitude-damping rate, 1/s
  double fidelity_threshold = 0.5; // minimum usable fidelity, in (0,1)
  double gen_success = 1.0;        // EPR-source success probability, in (0,1]
};

struct TimingParams {
  double slot_dt = 1e-3;           // slot duration, s
  double light_speed = kLightSpeed;
};

// A fully validated scenario. Immutable by convention after validation;
// all quantities are SI (m, s, rad).
struct ScenarioParams {
  OpticsParams optics;
  OrbitParams orbit;
  NoiseParams noise;
  TimingParams timing;
  std::vector<double> distances;   // candidate link distances, strictly increasing, m
  double request_distance = 40e3;  // distance requests ask for, must be in distances
  double request_rate = 0.5;       // per-slot request probability lambda
};

// Builds a ScenarioParams from a scenario document, applying defaults for
// omitted fields and range-checking everything. Document units are the
// conventional ones (nm, urad, mm, km, km/s, ms); values are converted to SI
// here and nowhere else.
//
// Throws RangeError / MissingFieldError. `lambda` is the only field without
// a default.
ScenarioParams validate_scenario(const nlohmann::json& doc);

ScenarioParams load_scenario_file(const std::string& path);

// Inverse of validate_scenario's unit mapping. validate_scenario applied to
// the result reproduces the input field-for-field.
nlohmann::json scenario_to_document(const ScenarioParams& params);

// Table-of-evaluation defaults with lambda = 0.5 and a single 40 km link.
ScenarioParams default_scenario();

}  // namespace entlink
