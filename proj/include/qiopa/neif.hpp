#ifndef QIOPA_NEIF_HPP
#define QIOPA_NEIF_HPP

#include <array>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qiopa/fock.hpp"

namespace qiopa {

/// Analyzer settings. delta_j = psi_jh - psi_jv is the birefringent phase of
/// beam k_j; theta_j is the Fresnel-rhomb rotation measured from the 45 degree
/// direction. Angles are stored as given.
struct NeifConfig {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double theta1 = kPi / 4;
  double theta2 = kPi / 4;
  double bs_transmittance = 0.5;

  double delta() const { return delta1 - delta2; }
  void validate() const;
};

/// Output single modes behind the polarizing beam splitters. Detector d_jp is
/// stored in the occupancy slot of input mode k_jp, so an output state uses the
/// same (1h, 2v, 1v, 2h) layout as the input.
enum class Detector : std::uint8_t { D1h, D1v, D2h, D2v };

inline constexpr std::array<Detector, 4> kAllDetectors = {Detector::D1h, Detector::D1v,
                                                          Detector::D2h, Detector::D2v};

Mode detector_mode(Detector d);
const char* detector_name(Detector d);

/// Phase e^{i angle} on one mode: a^+ -> e^{i angle} a^+.
struct PhaseElement {
  Mode mode;
  double angle;
};

/// Linear mixing of two modes (p, q). Column j of `u` is the image of the j-th
/// creation operator: a_p^+ -> u00 a_p^+ + u10 a_q^+, a_q^+ -> u01 a_p^+ + u11 a_q^+.
struct MixElement {
  Mode p;
  Mode q;
  Eigen::Matrix2cd u;
};

using OpticalElement = std::variant<PhaseElement, MixElement>;

/// The analyzer as an ordered element list:
///   1. plates: phase delta_j on mode jh
///   2. rotators: rotation by pi/4 + theta_j in the (jh, jv) plane
///   3. fold mirror on beam k2: phase pi on 2v
///   4. beam splitter mixing k1 with k2 for each polarization, amplitude
///      sqrt(t) in transmission and i sqrt(1-t) in reflection
std::vector<OpticalElement> neif_elements(const NeifConfig& cfg);

/// 4x4 mode matrix M with a_i^+ -> sum_k M(k, i) d_k^+ (equivalently d = M a),
/// indexed by occupancy slot on both sides.
Eigen::Matrix4cd mode_unitary(const NeifConfig& cfg);

/// Fock-space image of `s` under the analyzer. The output basis cutoff is
/// `out_cutoff`, or the largest photon number carried by `s` (capped at
/// kDefaultMaxCutoff) when negative. Input kets with more photons than the
/// output cutoff are dropped; TruncationError when their weight exceeds max_loss.
StateVector transform_state(const StateVector& s, const NeifConfig& cfg, int out_cutoff = -1,
                            double max_loss = 1e-4);

/// Applies a mode-mixing element list to a state. Photon number is conserved,
/// so the output must fit in the state's own basis; exposed for tests and for
/// the internal splitter of the XOR detector.
StateVector apply_elements(const StateVector& s, const std::vector<OpticalElement>& elements);

/// Normally ordered fourth moments <a_i^+ a_m^+ a_j a_n> of a state, indexed
/// [i][m][j][n] by occupancy slot.
class MomentTensor {
 public:
  explicit MomentTensor(const StateVector& s);
  cplx operator()(int i, int m, int j, int n) const { return g_[idx(i, m, j, n)]; }

  /// <N_k N_l> for output rows `rk`, `rl` of a mode matrix (k != l).
  double cross_number_correlation(const Eigen::RowVector4cd& rk, const Eigen::RowVector4cd& rl) const;

 private:
  static std::size_t idx(int i, int m, int j, int n) {
    return static_cast<std::size_t>(((i * 4 + m) * 4 + j) * 4 + n);
  }
  std::array<cplx, 256> g_{};
};

/// <N_a N_b> of two distinct detector modes on the analyzed state. ContractError
/// for a same-mode pair or a non-normalized state.
double double_coincidence(const StateVector& s, const NeifConfig& cfg,
                          std::pair<Detector, Detector> pair);

/// Same observable with photons from beam k1 and beam k2 made distinguishable
/// (large beam-splitter displacement): no two-photon interference at the BS.
double double_coincidence_distinguishable(const StateVector& s, const NeifConfig& cfg,
                                          std::pair<Detector, Detector> pair);

/// (D1h D1v), the complementary coincidence.
double complementary_coincidence(const StateVector& s, const NeifConfig& cfg);

/// How the sinh^2 g bracket of the closed-form (D1h D2v) rate is written.
///   AsPrinted: contains 1/4 [cos 2theta1 + cos 2theta2]^2
///   Corrected: contains 1/4 [cos^2 2theta1 + cos^2 2theta2]
/// The two differ by 1/2 cos 2theta1 cos 2theta2; the corrected bracket is the
/// exact sinh^2 g coefficient of the simulated rate.
enum class RateForm { AsPrinted, Corrected };

/// Closed-form (D1h D2v) through the sinh^2 g term.
double rate_closed_form(double phi, const NeifConfig& cfg, double S,
                        RateForm form = RateForm::AsPrinted);

/// Closed-form noise coincidence of the squeezed vacuum:
/// 1/2 S^2 (1 - cos Delta) cos^2(theta1 - theta2) + S^4.
double noise_rate_closed_form(const NeifConfig& cfg, double S);

/// Probability that every detector in `fire` clicks and none in `veto` does,
/// for threshold detectors on an analyzed (output) state.
double click_probability(const StateVector& out, std::span<const Detector> fire,
                         std::span<const Detector> veto);

/// Port-1 detectors whose click rejects a triple coincidence.
enum class XorVeto { D1v, D1h, Both };

const char* to_string(XorVeto v);

/// Triple coincidence D'2v D''2v D2h (d2v split on an internal 50/50 splitter)
/// in anti-coincidence with the veto detector(s). Threshold detectors, unit
/// efficiency. At delta = 0 every squeezed-vacuum event with two photons in d2v
/// and one in d2h also fires both port-1 detectors, so any veto choice removes
/// the noise. The amplified singlet keeps a nonzero rate only with the D1v veto:
/// its extra d2v photon comes with a d1h partner.
double xor_suppressed_rate(const StateVector& s, const NeifConfig& cfg,
                           XorVeto veto = XorVeto::D1v);

}  // namespace qiopa

#endif  // QIOPA_NEIF_HPP
