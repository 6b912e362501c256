#include "qiopa/fock.hpp"

#include <cmath>
#include <string>

#include "qiopa/errors.hpp"

namespace qiopa {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::H1: return "1h";
    case Mode::V2: return "2v";
    case Mode::V1: return "1v";
    case Mode::H2: return "2h";
  }
  return "?";
}

FockBasis::FockBasis(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 0) throw ContractError("cutoff must be non-negative");
  const int d = cutoff + 1;
  states_.reserve(static_cast<std::size_t>(d) * d * d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) states_.push_back(FockState{{a, b, c, e}});
}

bool FockBasis::contains(const FockState& s) const {
  for (int v : s.n)
    if (v < 0 || v > cutoff_) return false;
  return true;
}

std::optional<std::size_t> FockBasis::find(const FockState& s) const {
  if (!contains(s)) return std::nullopt;
  return index(s);
}

std::size_t FockBasis::index(const FockState& s) const {
  const std::size_t d = static_cast<std::size_t>(cutoff_) + 1;
  return ((static_cast<std::size_t>(s.n[0]) * d + s.n[1]) * d + s.n[2]) * d + s.n[3];
}

BasisPtr make_basis(int cutoff, int max_cutoff) {
  if (cutoff < 0) throw ContractError("cutoff must be non-negative");
  if (cutoff > max_cutoff)
    throw ResourceError("cutoff " + std::to_string(cutoff) + " exceeds the safety bound " +
                        std::to_string(max_cutoff) + " ((cutoff+1)^4 basis states)");
  return std::make_shared<const FockBasis>(cutoff);
}

StateVector::StateVector(BasisPtr basis)
    : basis_(std::move(basis)),
      amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_->size()))) {}

StateVector::StateVector(BasisPtr basis, Eigen::VectorXcd amps)
    : basis_(std::move(basis)), amps_(std::move(amps)) {
  if (static_cast<std::size_t>(amps_.size()) != basis_->size())
    throw ContractError("amplitude vector does not match basis size");
  if (!amps_.allFinite()) throw ContractError("state has non-finite amplitudes");
}

StateVector StateVector::vacuum(BasisPtr basis) {
  StateVector s(std::move(basis));
  s.amps_[0] = 1.0;
  return s;
}

StateVector StateVector::basis_state(BasisPtr basis, const FockState& ket) {
  StateVector s(std::move(basis));
  auto i = s.basis_->find(ket);
  if (!i) throw BasisError("ket does not fit in the basis cutoff");
  s.amps_[static_cast<Eigen::Index>(*i)] = 1.0;
  return s;
}

cplx StateVector::amplitude(const FockState& ket) const {
  auto i = basis_->find(ket);
  return i ? amps_[static_cast<Eigen::Index>(*i)] : cplx{};
}

void StateVector::set_amplitude(const FockState& ket, cplx value) {
  auto i = basis_->find(ket);
  if (!i) throw BasisError("ket does not fit in the basis cutoff");
  amps_[static_cast<Eigen::Index>(*i)] = value;
}

bool StateVector::is_normalized(double tol) const {
  return std::abs(norm_squared() - 1.0) < tol;
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ContractError("cannot normalize the zero vector");
  return StateVector(basis_, amps_ / n);
}

cplx StateVector::inner(const StateVector& other) const {
  if (basis_->cutoff() != other.basis_->cutoff())
    throw ContractError("inner product of states over different cutoffs");
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left operand
}

double StateVector::mean_occupancy(Mode m) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    acc += (*basis_)[i][m] * std::norm(amps_[static_cast<Eigen::Index>(i)]);
  return acc;
}

double StateVector::mean_total() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    acc += (*basis_)[i].total() * std::norm(amps_[static_cast<Eigen::Index>(i)]);
  return acc;
}

StateVector StateVector::rebased(BasisPtr target) const {
  StateVector out(std::move(target));
  for (std::size_t i = 0; i < size(); ++i) {
    const cplx a = amps_[static_cast<Eigen::Index>(i)];
    if (a == cplx{}) continue;
    if (auto j = out.basis_->find((*basis_)[i])) out.amps_[static_cast<Eigen::Index>(*j)] = a;
  }
  return out;
}

StateVector& StateVector::operator+=(const StateVector& o) {
  if (basis_->cutoff() != o.basis_->cutoff()) throw ContractError("cutoff mismatch in sum");
  amps_ += o.amps_;
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
  if (basis_->cutoff() != o.basis_->cutoff()) throw ContractError("cutoff mismatch in difference");
  amps_ -= o.amps_;
  return *this;
}

StateVector& StateVector::operator*=(cplx c) {
  amps_ *= c;
  return *this;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.basis().cutoff() == b.basis().cutoff()) return std::abs(a.inner(b));
  const auto& big = a.basis().cutoff() > b.basis().cutoff() ? a : b;
  const auto& small = a.basis().cutoff() > b.basis().cutoff() ? b : a;
  return std::abs(big.inner(small.rebased(big.basis_ptr())));
}

double max_abs_difference(const StateVector& a, const StateVector& b) {
  if (a.basis().cutoff() == b.basis().cutoff()) return (a.amps() - b.amps()).cwiseAbs().maxCoeff();
  const auto& big = a.basis().cutoff() > b.basis().cutoff() ? a : b;
  const auto& small = a.basis().cutoff() > b.basis().cutoff() ? b : a;
  return (big.amps() - small.rebased(big.basis_ptr()).amps()).cwiseAbs().maxCoeff();
}

StateVector apply_ladder(Ladder op, Mode mode, const StateVector& s) {
  const FockBasis& basis = s.basis();
  StateVector out(s.basis_ptr());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const cplx a = s.amps()[static_cast<Eigen::Index>(i)];
    if (a == cplx{}) continue;
    FockState ket = basis[i];
    const int n = ket[mode];
    double factor = 0.0;
    if (op == Ladder::Annihilate) {
      if (n == 0) continue;
      factor = std::sqrt(static_cast<double>(n));
      ket[mode] = n - 1;
    } else {
      if (n == basis.cutoff()) continue;
      factor = std::sqrt(static_cast<double>(n + 1));
      ket[mode] = n + 1;
    }
    out.amps()[static_cast<Eigen::Index>(basis.index(ket))] += factor * a;
  }
  return out;
}

StateVector pair_state(double phi, BasisPtr basis) {
  if (basis->cutoff() < 1) throw BasisError("pair state needs cutoff >= 1");
  StateVector s(std::move(basis));
  const double r = 1.0 / std::sqrt(2.0);
  s.set_amplitude(FockState{{1, 1, 0, 0}}, r);
  s.set_amplitude(FockState{{0, 0, 1, 1}}, r * std::polar(1.0, phi));
  return s;
}

double wrap_angle(double radians) {
  double r = std::remainder(radians, 2.0 * kPi);  // in [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double quarter_wave_flip(double phi_prime) { return wrap_angle(phi_prime + kPi); }

const char* to_string(SwapParity p) {
  switch (p) {
    case SwapParity::Even: return "even";
    case SwapParity::Odd: return "odd";
    case SwapParity::Mixed: return "mixed";
  }
  return "?";
}

StateVector pair_swapped(const StateVector& s) {
  const FockBasis& basis = s.basis();
  StateVector out(s.basis_ptr());
  for (std::size_t i = 0; i < basis.size(); ++i)
    out.amps()[static_cast<Eigen::Index>(basis.index(basis[i].swapped()))] =
        s.amps()[static_cast<Eigen::Index>(i)];
  return out;
}

SwapParity swap_parity(const StateVector& s, double tol) {
  if (!s.is_normalized()) throw ContractError("swap_parity requires a normalized state");
  const StateVector t = pair_swapped(s);
  if ((t.amps() - s.amps()).cwiseAbs().maxCoeff() <= tol) return SwapParity::Even;
  if ((t.amps() + s.amps()).cwiseAbs().maxCoeff() <= tol) return SwapParity::Odd;
  return SwapParity::Mixed;
}

}  // namespace qiopa
