#ifndef QIOPA_FOCK_HPP
#define QIOPA_FOCK_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qiopa {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Per-amplitude absolute tolerance used when comparing states.
inline constexpr double kStateTolerance = 1e-10;

/// Largest cutoff make_basis accepts unless the caller raises the bound.
inline constexpr int kDefaultMaxCutoff = 12;

/// The four polarization modes of the two beams k1, k2. The enumerator value is
/// the slot of the mode inside an occupancy tuple |n_1h n_2v . n_1v n_2h>.
enum class Mode : std::uint8_t { H1 = 0, V2 = 1, V1 = 2, H2 = 3 };

inline constexpr std::array<Mode, 4> kAllModes = {Mode::H1, Mode::V2, Mode::V1,
                                                  Mode::H2};

/// Amplifier A couples {1h, 2v}; amplifier B couples {1v, 2h}.
enum class ModePair : std::uint8_t { A, B };

constexpr std::size_t slot(Mode m) { return static_cast<std::size_t>(m); }

constexpr ModePair pair_of(Mode m) {
  return (m == Mode::H1 || m == Mode::V2) ? ModePair::A : ModePair::B;
}

/// The other member of the amplifier pair that `m` belongs to.
constexpr Mode partner(Mode m) {
  switch (m) {
    case Mode::H1: return Mode::V2;
    case Mode::V2: return Mode::H1;
    case Mode::V1: return Mode::H2;
    case Mode::H2: return Mode::V1;
  }
  return m;
}

const char* mode_name(Mode m);

/// One basis ket: occupancies ordered (n_1h, n_2v, n_1v, n_2h).
struct FockState {
  std::array<int, 4> n{};

  int operator[](Mode m) const { return n[slot(m)]; }
  int& operator[](Mode m) { return n[slot(m)]; }
  int total() const { return n[0] + n[1] + n[2] + n[3]; }

  /// Exchange of the A-pair occupancies with the B-pair occupancies.
  FockState swapped() const { return FockState{{n[2], n[3], n[0], n[1]}}; }

  friend bool operator==(const FockState&, const FockState&) = default;
  friend auto operator<=>(const FockState&, const FockState&) = default;
};

/// All occupancy tuples with every entry <= cutoff, in lexicographic order of
/// (n_1h, n_2v, n_1v, n_2h). The position of a ket is its base-(cutoff+1)
/// numeral, so the index map is computed rather than stored.
class FockBasis {
 public:
  explicit FockBasis(int cutoff);

  int cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return states_.size(); }
  std::span<const FockState> states() const noexcept { return states_; }
  const FockState& operator[](std::size_t i) const { return states_[i]; }

  bool contains(const FockState& s) const;
  std::optional<std::size_t> find(const FockState& s) const;
  /// Index of a ket known to be inside the basis.
  std::size_t index(const FockState& s) const;

 private:
  int cutoff_;
  std::vector<FockState> states_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

/// Builds the truncated basis. Throws ResourceError when cutoff > max_cutoff
/// and ContractError for a negative cutoff.
BasisPtr make_basis(int cutoff, int max_cutoff = kDefaultMaxCutoff);

/// A pure state of the four-mode field over a truncated basis.
class StateVector {
 public:
  explicit StateVector(BasisPtr basis);
  StateVector(BasisPtr basis, Eigen::VectorXcd amps);

  static StateVector vacuum(BasisPtr basis);
  static StateVector basis_state(BasisPtr basis, const FockState& ket);

  const FockBasis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  const Eigen::VectorXcd& amps() const noexcept { return amps_; }
  Eigen::VectorXcd& amps() noexcept { return amps_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(amps_.size()); }

  /// Amplitude of a ket; zero for kets outside the basis.
  cplx amplitude(const FockState& ket) const;
  void set_amplitude(const FockState& ket, cplx value);

  double norm_squared() const { return amps_.squaredNorm(); }
  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = 1e-8) const;
  StateVector normalized() const;

  /// <this|other>; both states must share the same cutoff.
  cplx inner(const StateVector& other) const;

  /// Mean photon number of one mode and of the whole field.
  double mean_occupancy(Mode m) const;
  double mean_total() const;

  /// Copy of the state over a basis with a different cutoff. Amplitudes of
  /// kets that do not fit are dropped.
  StateVector rebased(BasisPtr target) const;

  StateVector& operator+=(const StateVector& o);
  StateVector& operator-=(const StateVector& o);
  StateVector& operator*=(cplx c);
  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(cplx c, StateVector a) { return a *= c; }

 private:
  BasisPtr basis_;
  Eigen::VectorXcd amps_;
};

/// |<a|b>| for normalized states (phase-insensitive fidelity amplitude).
double fidelity(const StateVector& a, const StateVector& b);

/// Largest per-amplitude difference after aligning cutoffs.
double max_abs_difference(const StateVector& a, const StateVector& b);

enum class Ladder { Create, Annihilate };

/// Ladder action on one mode. Creation out of the top occupancy drops that
/// component (truncated-space convention).
StateVector apply_ladder(Ladder op, Mode mode, const StateVector& s);

/// 2^{-1/2} [ |11.00> + e^{i phi} |00.11> ]. Throws BasisError at cutoff 0.
StateVector pair_state(double phi, BasisPtr basis);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

/// Phase change of the quarter-wave plate at zero orientation: phi' -> phi' + pi.
double quarter_wave_flip(double phi_prime);

enum class SwapParity { Even, Odd, Mixed };

const char* to_string(SwapParity p);

/// Image of `s` under the pair-swap map (n_1h,n_2v,n_1v,n_2h) -> (n_1v,n_2h,n_1h,n_2v).
StateVector pair_swapped(const StateVector& s);

/// Classifies `s` as an even or odd eigenvector of the pair swap, within `tol`
/// per amplitude. Throws ContractError for a non-normalized input.
SwapParity swap_parity(const StateVector& s, double tol = kStateTolerance);

}  // namespace qiopa

#endif  // QIOPA_FOCK_HPP
