#ifndef QIOPA_WIGNER_HPP
#define QIOPA_WIGNER_HPP

#include <array>
#include <random>

#include "qiopa/fock.hpp"
#include "qiopa/opa.hpp"

namespace qiopa {

/// Phase-space coordinates. alpha1, alpha2 belong to amplifier A (modes 1h, 2v);
/// beta1, beta2 to amplifier B (modes 1v, 2h). Coordinate order matches the
/// occupancy slot order, so coords()[slot(m)] is the coordinate of mode m.
struct PhasePoint {
  cplx alpha1{};
  cplx alpha2{};
  cplx beta1{};
  cplx beta2{};

  std::array<cplx, 4> coords() const { return {alpha1, alpha2, beta1, beta2}; }
  static PhasePoint from_coords(const std::array<cplx, 4>& c) { return {c[0], c[1], c[2], c[3]}; }
  double max_modulus() const;
};

/// Uniform point with every real and imaginary part in [-radius, radius].
PhasePoint random_point(std::mt19937_64& rng, double radius);

/// gamma_{A+} = (alpha1 + alpha2*) e^{-g}, gamma_{A-} = i (alpha1 - alpha2*) e^{+g};
/// the B variables follow with alpha -> beta.
struct SqueezedVars {
  cplx a_plus;
  cplx a_minus;
  cplx b_plus;
  cplx b_minus;

  double sum_sq() const;
};

SqueezedVars squeezed_vars(const PhasePoint& p, double g);

/// <m|D(alpha)|n> for m < rows, n < cols (exact Laguerre matrix elements).
Eigen::MatrixXcd displacement_matrix(cplx alpha, int rows, int cols);

/// Symmetric-ordered characteristic function of the amplified state, evaluated
/// on the injected state `s` with Bogoliubov-evolved arguments:
/// chi = <s| D[eta(t)] D[xi(t)] |s>, eta_i(t) = eta_i C - eta_j* S.
cplx characteristic_fn(const StateVector& s, const OpaParams& params, const PhasePoint& point);

/// <s| D(point) |s> on the given (already evolved) state.
cplx expectation_displacement(const StateVector& s, const PhasePoint& point);

/// How the interference term Delta{alpha} of the closed-form Wigner function is
/// written.
///   AsPrinted: 1/2 [ |g+|^2 - |g-|^2 - i Re(g+ g-*) ]
///   Corrected: 2^{-1/2} [ |g+|^2 - |g-|^2 - 2 i Re(g+ g-*) ]
/// The corrected coefficients are the ones that reproduce the displaced-parity
/// evaluation of the amplified pair state.
enum class DeltaForm { AsPrinted, Corrected };

/// Delta{alpha} (from the A variables) or Delta{beta} (from the B variables).
cplx delta_term(cplx plus, cplx minus, DeltaForm form);

/// The bracket 1 + |e^{i phi} Delta{alpha} + Delta{beta}|^2 - sum |gamma|^2.
double wigner_bracket(const SqueezedVars& v, double phi, DeltaForm form);

/// W = Wbar{alpha} Wbar{beta} * bracket with Wbar = pi^{-2} exp(-|g+|^2 - |g-|^2).
double wigner_closed_form(const PhasePoint& point, double g, double phi,
                          DeltaForm form = DeltaForm::AsPrinted);

/// Wbar{alpha} Wbar{beta}: the Wigner function of the amplified vacuum.
double wigner_squeezed_vacuum(const PhasePoint& point, double g);

/// Maps the displaced-parity normalization (vacuum at origin = (2/pi)^4) onto
/// the closed-form one (vacuum at origin = pi^{-4}). Fixed on the vacuum.
inline constexpr double kNumericToClosedForm = 1.0 / 16.0;

struct NumericWigner {
  double value = 0.0;         ///< (2/pi)^4 <s|D Pi D^+|s>
  double norm_loss = 0.0;     ///< 1 - ||D^+ s||^2 inside the working space
  int working_cutoff = 0;
  bool truncated() const { return norm_loss > 1e-4; }
};

NumericWigner wigner_numeric_detailed(const StateVector& s, const PhasePoint& point);

/// Displaced-parity Wigner function (2/pi)^4 <s| D(p) Pi D^+(p) |s>.
double wigner_numeric(const StateVector& s, const PhasePoint& point);

}  // namespace qiopa

#endif  // QIOPA_WIGNER_HPP
