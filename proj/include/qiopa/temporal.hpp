#ifndef QIOPA_TEMPORAL_HPP
#define QIOPA_TEMPORAL_HPP

namespace qiopa {

/// Speed of light in micrometres per femtosecond.
inline constexpr double kLightSpeedUmPerFs = 0.299792458;

/// Dimensionless filter constant k in tau_c = k lambda^2 / (c dlambda), fixed so
/// that 795 nm light behind 2 nm filters has a 225 fs coherence time.
inline constexpr double kFilterConstant = 0.21345137629049485;

/// Scan-envelope parameters. Wavelengths in nm, times in fs. Positions passed to
/// the envelope functions are optical path differences in micrometres.
struct TemporalParams {
  double lambda = 795.0;
  double lambda_p = 397.5;
  double delta_lambda = 2.0;
  double pump_coherence = 180.0;
  /// Contrast of the two-photon dip/peak in the X scan (1 = ideal analyzer).
  double visibility = 1.0;
  /// Contrast of the first-order fringe in the Z scan.
  double fringe_visibility = 0.4;
  double filter_constant = kFilterConstant;

  /// tau_c from the filter passband.
  double coherence_time() const;
  /// Throws ContractError unless lengths and times are positive and both
  /// visibilities lie in [0, 1].
  void validate() const;
};

/// k lambda^2 / (c dlambda) in fs. ContractError when dlambda <= 0.
double coherence_time_from_filter(const TemporalParams& p);

/// exp(-4 ln2 (x / fwhm)^2): unit peak, full width at half maximum `fwhm`.
double gaussian_profile(double x, double fwhm);

/// Coincidence rate against the path delay x (um) between the two analyzer
/// arms. Interpolates between `baseline` (distinguishable paths, |x| large) and
/// `rate_at_zero` (the ideal analyzer rate) with contrast p.visibility; the
/// envelope FWHM in delay units is tau_c.
double x_scan_envelope(double x, double rate_at_zero, double baseline, const TemporalParams& p);

/// Width (um of optical path) of the pump/photon wavepacket overlap, c * delta_t.
double z_overlap_width(const TemporalParams& p);

/// First-order fringe 1 + V env(z) cos(2 pi z / lambda) against the optical
/// path change z (um); a mirror displacement d corresponds to z = 2 d.
double z_fringe(double z, const TemporalParams& p);

/// Amplified-signal rate against z: `floor` away from overlap, `peak` at z = 0,
/// Gaussian in between with FWHM z_overlap_width.
double z_amplification(double z, double peak, double floor, const TemporalParams& p);

}  // namespace qiopa

#endif  // QIOPA_TEMPORAL_HPP
