#ifndef QIOPA_OPA_HPP
#define QIOPA_OPA_HPP

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qiopa/fock.hpp"

namespace qiopa {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Amplifier configuration. The gain g = chi * t is dimensionless; psi is the
/// intrinsic phase of amplifier B; eta = f_p / r_p relates the injection (R)
/// gain to the spontaneous (L) gain, g = eta * g'.
struct OpaParams {
  double g = 0.22;
  double psi = 0.0;
  double eta = 3.0;
  int cutoff = 8;

  double C() const { return std::cosh(g); }
  double S() const { return std::sinh(g); }
  double Gamma() const { return std::tanh(g); }
  /// e^{i psi} sinh g, the B-pair Bogoliubov coefficient.
  cplx S_tilde() const { return std::polar(S(), psi); }
  /// Gain of the spontaneous (L) pass, g / eta.
  double g_prime() const { return g / eta; }

  /// Throws ContractError when g < 0, eta <= 0 or cutoff < 0.
  void validate() const;
};

/// Ladder operator of one mode as a sparse matrix over the basis.
SparseMatrix ladder_matrix(Ladder op, Mode mode, const FockBasis& basis);

/// Anti-Hermitian generator K = (A^+ + e^{i psi} B^+) - (A + e^{-i psi} B) with
/// A^+ = a_1h^+ a_2v^+ and B^+ = a_1v^+ a_2h^+, so that U = exp(g K).
SparseMatrix hamiltonian_generator(const OpaParams& params, const FockBasis& basis);

/// exp(g K) on a truncated basis. K only connects kets with equal
/// (n_1h - n_2v, n_1v - n_2h), so the exponential is taken densely on each
/// connected block of the generator and stored block-sparse.
class Propagator {
 public:
  Propagator(const OpaParams& params, BasisPtr basis);

  const FockBasis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  double g() const noexcept { return g_; }
  double psi() const noexcept { return psi_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::size_t largest_block() const noexcept;

  StateVector apply(const StateVector& s) const;
  StateVector apply_adjoint(const StateVector& s) const;
  /// The full unitary as a sparse matrix.
  SparseMatrix matrix() const;

 private:
  struct Block {
    std::vector<Eigen::Index> index;
    Eigen::MatrixXcd unitary;
  };
  StateVector apply_impl(const StateVector& s, bool adjoint) const;

  BasisPtr basis_;
  double g_;
  double psi_;
  std::vector<Block> blocks_;
};

/// Shared, read-only propagator for (g, psi, cutoff); built once per key.
std::shared_ptr<const Propagator> cached_propagator(const OpaParams& params, const BasisPtr& basis);

/// Probability held by kets with some occupancy at the cutoff; the measured
/// truncation loss of an evolved state.
double boundary_weight(const StateVector& s);

inline constexpr double kDefaultMaxTruncationLoss = 1e-4;

/// exp(g K) |s>. The evolution runs over the basis of `s` (params.cutoff is not
/// consulted). Throws TruncationError when g > 0 and the output boundary weight
/// exceeds `max_loss`.
StateVector evolve(const StateVector& s, const OpaParams& params,
                   double max_loss = kDefaultMaxTruncationLoss);

/// Normalized C^{-2} sum_{n,m} Gamma^{n+m} e^{i psi m} |nn.mm> over the basis.
StateVector squeezed_vacuum_closed_form(const OpaParams& params, const BasisPtr& basis);

/// Closed-form multiphoton superposition 2^{-1/2}[|Psi_A> + e^{i phi}|Psi_B>]
/// with |Psi_A> ~ sum n Gamma^{n+m}|nn.mm> and |Psi_B> ~ sum m Gamma^{n+m}|nn.mm>.
struct CatOutput {
  StateVector state;     ///< normalized
  double printed_norm;   ///< norm of the expansion with the sqrt(2) eta C^{-5} prefactor
};

CatOutput cat_output_closed_form(double phi, const OpaParams& params, const BasisPtr& basis);

/// Largest entry-wise deviation between U^+ a_i U and C a_i + S a_j^+ (S~ for the
/// B pair) over kets whose occupancies are all <= cutoff - margin. Throws
/// BasisError when cutoff < margin. The truncated generator feeds boundary
/// effects into low occupancies within a few photons, so at g ~ 0.2 the
/// identity holds to 1e-6 only for margin >= cutoff - 2 or so.
double bogoliubov_check(const OpaParams& params, const BasisPtr& basis, int margin = 2);

/// Mean number of extra couples emitted on top of an injected pair_state(phi):
/// (<N_total> - 2) / 2 after evolution at params.cutoff.
double stimulated_pairs(double phi, const OpaParams& params);

/// P(two pairs) / P(one pair) in the squeezed vacuum at gain g'.
double double_pair_ratio(double g_prime, int cutoff = 6);

}  // namespace qiopa

#endif  // QIOPA_OPA_HPP
