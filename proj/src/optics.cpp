#include "entlink/optics.hpp"

#include <cmath>

namespace entlink {

double spot_radius(double distance, const OpticsParams& optics,
                   SpotModel model) {
  const double w0 = beam_waist(optics);
  if (model == SpotModel::far_field) {
    return optics.wavelength * distance / (M_PI * w0);
  }
  const double z = optics.wavelength * distance / (M_PI * w0 * w0);
  return w0 * std::sqrt(1.0 + z * z);
}

double rayleigh_length(const OpticsParams& optics) {
  const double w0 = beam_waist(optics);
  return M_PI * w0 * w0 / optics.wavelength;
}

BeamGeometry beam_geometry(double distance, const OpticsParams& optics,
                           SpotModel model) {
  return BeamGeometry{spot_radius(distance, optics, model),
                      rayleigh_length(optics),
                      optics.divergence_half_angle};
}

double transmittance_ideal(double distance, const OpticsParams& optics,
                           SpotModel model) {
  const double w = spot_radius(distance, optics, model);
  const double r = optics.aperture_radius;
  return -std::expm1(-2.0 * r * r / (w * w));
}

double offset_attenuation(double distance, double offset,
                          const OpticsParams& optics, SpotModel model) {
  const double w = spot_radius(distance, optics, model);
  const double shift = distance * offset;
  return std::exp(-2.0 * shift * shift / (w * w));
}

double pointing_pdf(double offset, double pointing_sigma) {
  const double s2 = pointing_sigma * pointing_sigma;
  return offset / s2 * std::exp(-offset * offset / (2.0 * s2));
}

double pointing_beta(double distance, const OpticsParams& optics,
                     SpotModel model) {
  const double sigma = optics.pointing_sigma;
  if (model == SpotModel::far_field) {
    // 4 d^2 sigma^2 / W^2(d) with W linear in d collapses to a constant.
    const double theta = optics.divergence_half_angle;
    return 4.0 * sigma * sigma / (theta * theta);
  }
  const double w = spot_radius(distance, optics, SpotModel::exact);
  return 4.0 * distance * distance * sigma * sigma / (w * w);
}

double transmittance_avg(double distance, const OpticsParams& optics,
                         SpotModel model) {
  return transmittance_ideal(distance, optics, model) /
         (1.0 + pointing_beta(distance, optics, model));
}

double capture_probability(double distance, const OpticsParams& optics,
                           SpotModel model) {
  // beta = 0 at zero jitter, so this covers the ideal case too.
  return transmittance_avg(distance, optics, model);
}

ChannelTransmittance channel_transmittance(double distance,
                                           const OpticsParams& optics,
                                           SpotModel model) {
  ChannelTransmittance ct;
  ct.eta_ideal = transmittance_ideal(distance, optics, model);
  ct.beta = pointing_beta(distance, optics, model);
  ct.eta_avg = ct.eta_ideal / (1.0 + ct.beta);
  ct.q_ideal = ct.eta_ideal;
  ct.q_error = ct.eta_avg;
  return ct;
}

}  // namespace entlink
