#include "qiopa/temporal.hpp"

#include <cmath>
#include <numbers>

#include "qiopa/errors.hpp"

namespace qiopa {

double TemporalParams::coherence_time() const { return coherence_time_from_filter(*this); }

void TemporalParams::validate() const {
  if (!(lambda > 0.0) || !(lambda_p > 0.0)) throw ContractError("wavelengths must be positive");
  if (!(delta_lambda > 0.0)) throw ContractError("filter passband must be positive");
  if (!(pump_coherence > 0.0)) throw ContractError("pump coherence time must be positive");
  if (!(filter_constant > 0.0)) throw ContractError("filter constant must be positive");
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw ContractError("visibility must lie in [0, 1]");
  if (!(fringe_visibility >= 0.0 && fringe_visibility <= 1.0))
    throw ContractError("fringe visibility must lie in [0, 1]");
}

double coherence_time_from_filter(const TemporalParams& p) {
  if (!(p.delta_lambda > 0.0)) throw ContractError("filter passband must be positive");
  // nm^2 / (nm * um/fs) -> 1e-3 um / (um/fs)
  return p.filter_constant * p.lambda * p.lambda / p.delta_lambda * 1e-3 / kLightSpeedUmPerFs;
}

double gaussian_profile(double x, double fwhm) {
  const double u = x / fwhm;
  return std::exp(-4.0 * std::numbers::ln2 * u * u);
}

double x_scan_envelope(double x, double rate_at_zero, double baseline, const TemporalParams& p) {
  const double width = kLightSpeedUmPerFs * p.coherence_time();
  return baseline + (rate_at_zero - baseline) * p.visibility * gaussian_profile(x, width);
}

double z_overlap_width(const TemporalParams& p) { return kLightSpeedUmPerFs * p.pump_coherence; }

double z_fringe(double z, const TemporalParams& p) {
  const double period = p.lambda * 1e-3;
  return 1.0 + p.fringe_visibility * gaussian_profile(z, z_overlap_width(p)) *
                   std::cos(2.0 * std::numbers::pi * z / period);
}

double z_amplification(double z, double peak, double floor, const TemporalParams& p) {
  return floor + (peak - floor) * gaussian_profile(z, z_overlap_width(p));
}

}  // namespace qiopa
