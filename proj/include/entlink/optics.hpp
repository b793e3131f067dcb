#pragma once

#include "entlink/params.hpp"

namespace entlink {

// Spot-radius model. `exact` keeps the full Gaussian-beam propagation law;
// `far_field` is the linear-in-distance asymptote, which is what the
// closed-form maximum-distance expression is derived from.
enum class SpotModel { exact, far_field };

struct BeamGeometry {
  double spot_radius;      // W(d), m
  double rayleigh_length;  // pi*W0^2/wavelength, m
  double divergence;       // half angle, rad
};

// W(d): beam radius at distance d. Exact: W0*sqrt(1+(wl*d/(pi*W0^2))^2).
double spot_radius(double distance, const OpticsParams& optics,
                   SpotModel model = SpotModel::exact);

// Distance at which the spot area doubles.
double rayleigh_length(const OpticsParams& optics);

BeamGeometry beam_geometry(double distance, const OpticsParams& optics,
                           SpotModel model = SpotModel::exact);

// Fraction of beam power collected by a centred aperture:
// 1 - exp(-2*R_ap^2 / W^2(d)).
double transmittance_ideal(double distance, const OpticsParams& optics,
                           SpotModel model = SpotModel::exact);

// Intensity attenuation for a beam centre offset by angle `offset` (rad):
// exp(-2*(d*offset)^2 / W^2(d)). Valid for apertures small versus the spot.
double offset_attenuation(double distance, double offset,
                          const OpticsParams& optics,
                          SpotModel model = SpotModel::exact);

// Rayleigh density of the pointing-error magnitude for per-axis sigma.
double pointing_pdf(double offset, double pointing_sigma);

// beta = 4 d^2 sigma^2 / W^2(d); far-field model reduces to 4 sigma^2/theta^2.
double pointing_beta(double distance, const OpticsParams& optics,
                     SpotModel model = SpotModel::exact);

// Transmittance averaged over Rayleigh-distributed pointing error:
// eta / (1 + beta).
double transmittance_avg(double distance, const OpticsParams& optics,
                         SpotModel model = SpotModel::exact);

// Single-photon capture probability q. With zero pointing jitter this is the
// ideal transmittance; otherwise the pointing-averaged one.
double capture_probability(double distance, const OpticsParams& optics,
                           SpotModel model = SpotModel::exact);

struct ChannelTransmittance {
  double eta_ideal;  // centred-beam transmittance
  double beta;       // pointing attenuation factor
  double eta_avg;    // pointing-averaged transmittance
  double q_ideal;    // capture probability, no pointing error
  double q_error;    // capture probability with pointing error
};

ChannelTransmittance channel_transmittance(double distance,
                                           const OpticsParams& optics,
                                           SpotModel model = SpotModel::exact);

}  // namespace entlink
