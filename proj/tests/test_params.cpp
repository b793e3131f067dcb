#include "doctest.h"

#include <cmath>

#include "entlink/errors.hpp"
#include "entlink/optics.hpp"
#include "entlink/params.hpp"

using namespace entlink;

namespace {

nlohmann::json full_document() {
  return nlohmann::json{
      {"optics",
       {{"wavelength_nm", 810.0},
        {"divergence_urad", 5.0},
        {"aperture_mm", 150.0},
        {"pointing_sigma_urad", 0.5}}},
      {"orbit",
       {{"v_sat_km_s", 7.589}, {"h_sat_km", 550.0}, {"rotation_sigma_urad", 0.7}}},
      {"noise",
       {{"qber", 0.01}, {"gamma_per_s", 0.5}, {"f_th", 0.5}, {"p_gen", 1.0}}},
      {"timing", {{"slot_dt_ms", 1.0}}},
      {"distances_km", {40.0}},
      {"request_distance_km", 40.0},
      {"lambda", 0.5}};
}

}  // namespace

TEST_CASE("validate_scenario echoes a fully specified document") {
  const ScenarioParams p = validate_scenario(full_document());
  CHECK(p.optics.wavelength == doctest::Approx(810e-9).epsilon(1e-12));
  CHECK(p.optics.divergence_half_angle == doctest::Approx(5e-6).epsilon(1e-12));
  CHECK(p.optics.aperture_radius == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(p.optics.pointing_sigma == doctest::Approx(0.5e-6).epsilon(1e-12));
  CHECK(p.orbit.sat_speed == doctest::Approx(7589.0).epsilon(1e-12));
  CHECK(p.orbit.altitude == doctest::Approx(5.5e5).epsilon(1e-12));
  CHECK(p.noise.qber == 0.01);
  CHECK(p.noise.damping_rate == 0.5);
  CHECK(p.noise.fidelity_threshold == 0.5);
  CHECK(p.noise.gen_success == 1.0);
  CHECK(p.timing.slot_dt == doctest::Approx(1e-3).epsilon(1e-12));
  REQUIRE(p.distances.size() == 1);
  CHECK(p.distances[0] == doctest::Approx(40e3).epsilon(1e-12));
  CHECK(p.request_distance == p.distances[0]);
  CHECK(p.request_rate == 0.5);
}

TEST_CASE("validate_scenario rejects out-of-range fields") {
  auto doc = full_document();
  doc["noise"]["qber"] = 1.2;
  CHECK_THROWS_WITH_AS(validate_scenario(doc),
                       doctest::Contains("qber"), RangeError);

  doc = full_document();
  doc["lambda"] = 1.2;
  CHECK_THROWS_AS(validate_scenario(doc), RangeError);

  doc = full_document();
  doc["noise"]["f_th"] = 0.0;
  CHECK_THROWS_AS(validate_scenario(doc), RangeError);

  doc = full_document();
  doc["distances_km"] = {40.0, 40.0};
  CHECK_THROWS_AS(validate_scenario(doc), RangeError);

  doc = full_document();
  doc["request_distance_km"] = 42.0;
  CHECK_THROWS_AS(validate_scenario(doc), RangeError);
}

TEST_CASE("lambda is required") {
  auto doc = full_document();
  doc.erase("lambda");
  CHECK_THROWS_AS(validate_scenario(doc), MissingFieldError);
}

TEST_CASE("omitted wavelength falls back to the 810 nm default") {
  auto doc = full_document();
  doc["optics"].erase("wavelength_nm");
  const ScenarioParams p = validate_scenario(doc);
  CHECK(p.optics.wavelength == doctest::Approx(810e-9).epsilon(1e-12));
  // The default is pinned by the reported 65.27% capture at 40 km.
  OpticsParams ideal = p.optics;
  ideal.pointing_sigma = 0.0;
  CHECK(std::abs(capture_probability(40e3, ideal) - 0.6527) < 0.002);
}

TEST_CASE("validation is idempotent through the document round trip") {
  const ScenarioParams p1 = validate_scenario(full_document());
  const ScenarioParams p2 = validate_scenario(scenario_to_document(p1));
  CHECK(p2.optics.wavelength == p1.optics.wavelength);
  CHECK(p2.optics.divergence_half_angle == p1.optics.divergence_half_angle);
  CHECK(p2.optics.aperture_radius == p1.optics.aperture_radius);
  CHECK(p2.optics.pointing_sigma == p1.optics.pointing_sigma);
  CHECK(p2.orbit.sat_speed == p1.orbit.sat_speed);
  CHECK(p2.orbit.altitude == p1.orbit.altitude);
  CHECK(p2.orbit.rotation_sigma == p1.orbit.rotation_sigma);
  CHECK(p2.noise.qber == p1.noise.qber);
  CHECK(p2.noise.damping_rate == p1.noise.damping_rate);
  CHECK(p2.noise.fidelity_threshold == p1.noise.fidelity_threshold);
  CHECK(p2.noise.gen_success == p1.noise.gen_success);
  CHECK(p2.timing.slot_dt == p1.timing.slot_dt);
  CHECK(p2.distances == p1.distances);
  CHECK(p2.request_distance == p1.request_distance);
  CHECK(p2.request_rate == p1.request_rate);

  const ScenarioParams d1 = default_scenario();
  const ScenarioParams d2 = validate_scenario(scenario_to_document(d1));
  CHECK(d2.optics.wavelength == d1.optics.wavelength);
  CHECK(d2.timing.slot_dt == d1.timing.slot_dt);
  CHECK(d2.distances == d1.distances);
}

TEST_CASE("beam_waist") {
  OpticsParams o;
  o.wavelength = 810e-9;
  o.divergence_half_angle = 5e-6;
  CHECK(beam_waist(o) == doctest::Approx(5.1566e-2).epsilon(1e-4));

  // Unit identity: wavelength equal to pi*theta gives a 1 m waist.
  o.wavelength = M_PI * 5e-6;
  CHECK(beam_waist(o) == doctest::Approx(1.0).epsilon(1e-15));

  o.wavelength = 810e-9;
  const double w1 = beam_waist(o);
  o.divergence_half_angle *= 2.0;
  CHECK(beam_waist(o) == doctest::Approx(0.5 * w1).epsilon(1e-15));

  // Reconstruction: W0 * pi * theta returns the wavelength.
  for (double wl : {405e-9, 810e-9, 1550e-9}) {
    for (double th : {1e-6, 5e-6, 2e-5}) {
      OpticsParams q;
      q.wavelength = wl;
      q.divergence_half_angle = th;
      CHECK(beam_waist(q) * M_PI * th == doctest::Approx(wl).epsilon(1e-15));
    }
  }
}
