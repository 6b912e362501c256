#include "qiopa/wigner.hpp"

#include <algorithm>
#include <cmath>

#include "qiopa/errors.hpp"

namespace qiopa {

namespace {

// Dense four-index amplitude tensor, last index fastest (same layout as the
// Fock basis ordering).
struct ModeTensor {
  std::array<int, 4> dims{};
  std::vector<cplx> data;

  static ModeTensor from_state(const StateVector& s) {
    const int d = s.basis().cutoff() + 1;
    ModeTensor t{{d, d, d, d}, std::vector<cplx>(s.amps().data(), s.amps().data() + s.amps().size())};
    return t;
  }
};

// Contracts `m` (rows x dims[axis]) into one axis of the tensor.
ModeTensor apply_axis(const ModeTensor& in, int axis, const Eigen::MatrixXcd& m) {
  ModeTensor out;
  out.dims = in.dims;
  out.dims[axis] = static_cast<int>(m.rows());
  std::size_t outer = 1;
  for (int k = 0; k < axis; ++k) outer *= static_cast<std::size_t>(in.dims[k]);
  std::size_t inner = 1;
  for (int k = axis + 1; k < 4; ++k) inner *= static_cast<std::size_t>(in.dims[k]);
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(in.dims[axis]);
  out.data.assign(outer * rows * inner, cplx{});
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t c = 0; c < cols; ++c) {
      const cplx* src = &in.data[(o * cols + c) * inner];
      bool nonzero = false;
      for (std::size_t i = 0; i < inner && !nonzero; ++i) nonzero = src[i] != cplx{};
      if (!nonzero) continue;
      for (std::size_t r = 0; r < rows; ++r) {
        const cplx f = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (f == cplx{}) continue;
        cplx* dst = &out.data[(o * rows + r) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += f * src[i];
      }
    }
  return out;
}

double laguerre(int n, int k, double x) { return std::assoc_laguerre(n, k, x); }

}  // namespace

double PhasePoint::max_modulus() const {
  double r = 0.0;
  for (cplx c : coords()) r = std::max(r, std::abs(c));
  return r;
}

PhasePoint random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::array<cplx, 4> c;
  for (auto& z : c) {
    const double re = u(rng);
    z = cplx(re, u(rng));
  }
  return PhasePoint::from_coords(c);
}

double SqueezedVars::sum_sq() const {
  return std::norm(a_plus) + std::norm(a_minus) + std::norm(b_plus) + std::norm(b_minus);
}

SqueezedVars squeezed_vars(const PhasePoint& p, double g) {
  const cplx i(0.0, 1.0);
  const double shrink = std::exp(-g);
  const double stretch = std::exp(g);
  return SqueezedVars{(p.alpha1 + std::conj(p.alpha2)) * shrink,
                      i * (p.alpha1 - std::conj(p.alpha2)) * stretch,
                      (p.beta1 + std::conj(p.beta2)) * shrink,
                      i * (p.beta1 - std::conj(p.beta2)) * stretch};
}

Eigen::MatrixXcd displacement_matrix(cplx alpha, int rows, int cols) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(rows, cols);
  const double r2 = std::norm(alpha);
  if (r2 == 0.0) {
    for (int k = 0; k < std::min(rows, cols); ++k) d(k, k) = 1.0;
    return d;
  }
  const double log_r = 0.5 * std::log(r2);
  const double unit_re = alpha.real() / std::sqrt(r2);
  const double unit_im = alpha.imag() / std::sqrt(r2);
  const cplx phase(unit_re, unit_im);
  for (int m = 0; m < rows; ++m)
    for (int n = 0; n < cols; ++n) {
      // <m|D|n> = sqrt(n!/m!) alpha^{m-n} e^{-|a|^2/2} L_n^{(m-n)}(|a|^2), m >= n
      //         = sqrt(m!/n!) (-alpha*)^{n-m} e^{-|a|^2/2} L_m^{(n-m)}(|a|^2), m < n
      const int lo = std::min(m, n);
      const int k = std::abs(m - n);
      const double mag = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)) +
                                  k * log_r - 0.5 * r2) *
                         laguerre(lo, k, r2);
      const cplx dir = m >= n ? std::pow(phase, k) : std::pow(-std::conj(phase), k);
      d(m, n) = mag * dir;
    }
  return d;
}

cplx expectation_displacement(const StateVector& s, const PhasePoint& point) {
  const int d = s.basis().cutoff() + 1;
  ModeTensor t = ModeTensor::from_state(s);
  const auto c = point.coords();
  for (int axis = 0; axis < 4; ++axis) t = apply_axis(t, axis, displacement_matrix(c[axis], d, d));
  cplx acc{};
  for (std::size_t i = 0; i < t.data.size(); ++i)
    acc += std::conj(s.amps()[static_cast<Eigen::Index>(i)]) * t.data[i];
  return acc;
}

cplx characteristic_fn(const StateVector& s, const OpaParams& params, const PhasePoint& point) {
  params.validate();
  const double C = params.C();
  const cplx SA = params.S();
  const cplx SB = params.S_tilde();
  // U^+ D(x) U = D(x') with x'_i = C x_i - S_pair x_j* for the partner j of i.
  const PhasePoint evolved{C * point.alpha1 - SA * std::conj(point.alpha2),
                           C * point.alpha2 - SA * std::conj(point.alpha1),
                           C * point.beta1 - SB * std::conj(point.beta2),
                           C * point.beta2 - SB * std::conj(point.beta1)};
  return expectation_displacement(s, evolved);
}

cplx delta_term(cplx plus, cplx minus, DeltaForm form) {
  const double diff = std::norm(plus) - std::norm(minus);
  const double re = (plus * std::conj(minus)).real();
  if (form == DeltaForm::AsPrinted) return 0.5 * cplx(diff, -re);
  return cplx(diff, -2.0 * re) / std::sqrt(2.0);
}

double wigner_bracket(const SqueezedVars& v, double phi, DeltaForm form) {
  const cplx da = delta_term(v.a_plus, v.a_minus, form);
  const cplx db = delta_term(v.b_plus, v.b_minus, form);
  return 1.0 + std::norm(std::polar(1.0, phi) * da + db) - v.sum_sq();
}

double wigner_closed_form(const PhasePoint& point, double g, double phi, DeltaForm form) {
  const SqueezedVars v = squeezed_vars(point, g);
  const double pi2 = kPi * kPi;
  const double wa = std::exp(-(std::norm(v.a_plus) + std::norm(v.a_minus))) / pi2;
  const double wb = std::exp(-(std::norm(v.b_plus) + std::norm(v.b_minus))) / pi2;
  return wa * wb * wigner_bracket(v, phi, form);
}

double wigner_squeezed_vacuum(const PhasePoint& point, double g) {
  const SqueezedVars v = squeezed_vars(point, g);
  return std::exp(-v.sum_sq()) / std::pow(kPi, 4);
}

NumericWigner wigner_numeric_detailed(const StateVector& s, const PhasePoint& point) {
  if (!s.is_normalized()) throw ContractError("wigner_numeric requires a normalized state");
  const int c = s.basis().cutoff();
  const auto coords = point.coords();
  const double r = point.max_modulus();
  int extra = static_cast<int>(std::ceil(2.0 * r * r + 6.0 * r)) + 6;
  constexpr int kMaxWorking = 64;

  NumericWigner result;
  for (;;) {
    const int working = std::min(c + extra, kMaxWorking);
    ModeTensor t = ModeTensor::from_state(s);
    for (int axis = 0; axis < 4; ++axis)
      t = apply_axis(t, axis, displacement_matrix(-coords[axis], working + 1, t.dims[axis]));
    double norm2 = 0.0;
    double parity = 0.0;
    const int d = working + 1;
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int e = 0; e < d; ++e) {
          const int partial = a + b + e;
          for (int f = 0; f < d; ++f, ++idx) {
            const double w = std::norm(t.data[idx]);
            norm2 += w;
            parity += ((partial + f) & 1) ? -w : w;
          }
        }
    result.value = std::pow(2.0 / kPi, 4) * parity;
    result.norm_loss = std::max(0.0, 1.0 - norm2);
    result.working_cutoff = working;
    if (result.norm_loss < 1e-10 || working == kMaxWorking) break;
    extra *= 2;
  }
  return result;
}

double wigner_numeric(const StateVector& s, const PhasePoint& point) {
  return wigner_numeric_detailed(s, point).value;
}

}  // namespace qiopa
