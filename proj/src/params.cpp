#include "entlink/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "entlink/errors.hpp"

namespace entlink {

namespace {

double get_or(const nlohmann::json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw RangeError(key, "not a number");
  }
  return obj[key].get<double>();
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw RangeError(field, "must be > 0");
  }
}

void require_nonnegative(double v, const char* field) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw RangeError(field, "must be >= 0");
  }
}

const nlohmann::json kEmpty = nlohmann::json::object();

}  // namespace

double beam_waist(const OpticsParams& optics) {
  return optics.wavelength / (M_PI * optics.divergence_half_angle);
}

ScenarioParams validate_scenario(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw RangeError("document", "scenario must be a JSON object");
  }
  const nlohmann::json& optics = doc.contains("optics") ? doc["optics"] : kEmpty;
  const nlohmann::json& orbit = doc.contains("orbit") ? doc["orbit"] : kEmpty;
  const nlohmann::json& noise = doc.contains("noise") ? doc["noise"] : kEmpty;
  const nlohmann::json& timing = doc.contains("timing") ? doc["timing"] : kEmpty;

  ScenarioParams p;
  p.optics.wavelength = get_or(optics, "wavelength_nm", 810.0) * 1e-9;
  p.optics.divergence_half_angle = get_or(optics, "divergence_urad", 5.0) * 1e-6;
  p.optics.aperture_radius = get_or(optics, "aperture_mm", 150.0) * 1e-3;
  p.optics.pointing_sigma = get_or(optics, "pointing_sigma_urad", 0.5) * 1e-6;

  p.orbit.sat_speed = get_or(orbit, "v_sat_km_s", 7.589) * 1e3;
  p.orbit.altitude = get_or(orbit, "h_sat_km", 550.0) * 1e3;
  p.orbit.rotation_sigma = get_or(orbit, "rotation_sigma_urad", 0.7) * 1e-6;

  p.noise.qber = get_or(noise, "qber", 0.01);
  p.noise.damping_rate = get_or(noise, "gamma_per_s", 0.5);
  p.noise.fidelity_threshold = get_or(noise, "f_th", 0.5);
  p.noise.gen_success = get_or(noise, "p_gen", 1.0);

  p.timing.slot_dt = get_or(doc.contains("timing") ? timing : kEmpty,
                            "slot_dt_ms", 1.0) * 1e-3;

  if (doc.contains("distances_km")) {
    if (!doc["distances_km"].is_array() || doc["distances_km"].empty()) {
      throw RangeError("distances_km", "must be a non-empty array");
    }
    p.distances.clear();
    for (const auto& v : doc["distances_km"]) {
      if (!v.is_number()) throw RangeError("distances_km", "not a number");
      p.distances.push_back(v.get<double>() * 1e3);
    }
  } else {
    p.distances = {40e3};
  }

  p.request_distance = doc.contains("request_distance_km")
                           ? get_or(doc, "request_distance_km", 0.0) * 1e3
                           : p.distances.front();

  if (!doc.contains("lambda")) {
    throw MissingFieldError("lambda");
  }
  p.request_rate = get_or(doc, "lambda", 0.0);

  // Range checks.
  require_positive(p.optics.wavelength, "wavelength");
  require_positive(p.optics.divergence_half_angle, "divergence");
  require_positive(p.optics.aperture_radius, "aperture");
  require_nonnegative(p.optics.pointing_sigma, "pointing_sigma");
  require_positive(p.orbit.sat_speed, "v_sat");
  require_positive(p.orbit.altitude, "h_sat");
  require_nonnegative(p.orbit.rotation_sigma, "rotation_sigma");
  if (!(p.noise.qber >= 0.0 && p.noise.qber < 1.0)) {
    throw RangeError("qber", "must be in [0, 1)");
  }
  // Gamma = 0 would make the storage budget unbounded; scenario documents
  // must give a positive rate even though the pure decay functions accept 0.
  require_positive(p.noise.damping_rate, "gamma_per_s");
  if (!(p.noise.fidelity_threshold > 0.0 && p.noise.fidelity_threshold < 1.0)) {
    throw RangeError("f_th", "must be in (0, 1)");
  }
  if (!(p.noise.gen_success > 0.0 && p.noise.gen_success <= 1.0)) {
    throw RangeError("p_gen", "must be in (0, 1]");
  }
  require_positive(p.timing.slot_dt, "slot_dt_ms");
  for (double d : p.distances) {
    require_positive(d, "distances_km");
  }
  if (!std::is_sorted(p.distances.begin(), p.distances.end()) ||
      std::adjacent_find(p.distances.begin(), p.distances.end()) !=
          p.distances.end()) {
    throw RangeError("distances_km", "must be strictly increasing");
  }
  if (std::find(p.distances.begin(), p.distances.end(), p.request_distance) ==
      p.distances.end()) {
    throw RangeError("request_distance_km", "must be one of distances_km");
  }
  if (!(p.request_rate >= 0.0 && p.request_rate <= 1.0)) {
    throw RangeError("lambda", "must be in [0, 1]");
  }
  return p;
}

ScenarioParams load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MissingFieldError("config file: " + path);
  }
  nlohmann::json doc;
  in >> doc;
  return validate_scenario(doc);
}

nlohmann::json scenario_to_document(const ScenarioParams& p) {
  nlohmann::json doc;
  doc["optics"] = {{"wavelength_nm", p.optics.wavelength / 1e-9},
                   {"divergence_urad", p.optics.divergence_half_angle / 1e-6},
                   {"aperture_mm", p.optics.aperture_radius / 1e-3},
                   {"pointing_sigma_urad", p.optics.pointing_sigma / 1e-6}};
  doc["orbit"] = {{"v_sat_km_s", p.orbit.sat_speed / 1e3},
                  {"h_sat_km", p.orbit.altitude / 1e3},
                  {"rotation_sigma_urad", p.orbit.rotation_sigma / 1e-6}};
  doc["noise"] = {{"qber", p.noise.qber},
                  {"gamma_per_s", p.noise.damping_rate},
                  {"f_th", p.noise.fidelity_threshold},
                  {"p_gen", p.noise.gen_success}};
  doc["timing"] = {{"slot_dt_ms", p.timing.slot_dt / 1e-3}};
  nlohmann::json dists = nlohmann::json::array();
  for (double d : p.distances) dists.push_back(d / 1e3);
  doc["distances_km"] = dists;
  doc["request_distance_km"] = p.request_distance / 1e3;
  doc["lambda"] = p.request_rate;
  return doc;
}

ScenarioParams default_scenario() {
  ScenarioParams p;
  p.distances = {40e3};
  p.request_distance = 40e3;
  p.request_rate = 0.5;
  return p;
}

}  // namespace entlink
