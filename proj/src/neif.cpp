#include "qiopa/neif.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qiopa/errors.hpp"

namespace qiopa {

void NeifConfig::validate() const {
  for (double a : {delta1, delta2, theta1, theta2})
    if (!std::isfinite(a)) throw ContractError("analyzer angles must be finite");
  if (!(bs_transmittance >= 0.0 && bs_transmittance <= 1.0))
    throw ContractError("beam-splitter transmittance must lie in [0, 1]");
}

Mode detector_mode(Detector d) {
  switch (d) {
    case Detector::D1h: return Mode::H1;
    case Detector::D1v: return Mode::V1;
    case Detector::D2h: return Mode::H2;
    case Detector::D2v: return Mode::V2;
  }
  return Mode::H1;
}

const char* detector_name(Detector d) {
  switch (d) {
    case Detector::D1h: return "D1h";
    case Detector::D1v: return "D1v";
    case Detector::D2h: return "D2h";
    case Detector::D2v: return "D2v";
  }
  return "?";
}

namespace {

Eigen::Matrix2cd rotation(double angle) {
  Eigen::Matrix2cd r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

Eigen::Matrix4cd embed(const OpticalElement& e) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  if (const auto* ph = std::get_if<PhaseElement>(&e)) {
    const auto k = static_cast<Eigen::Index>(slot(ph->mode));
    m(k, k) = std::polar(1.0, ph->angle);
  } else {
    const auto& mix = std::get<MixElement>(e);
    const auto p = static_cast<Eigen::Index>(slot(mix.p));
    const auto q = static_cast<Eigen::Index>(slot(mix.q));
    m(p, p) = mix.u(0, 0);
    m(q, p) = mix.u(1, 0);
    m(p, q) = mix.u(0, 1);
    m(q, q) = mix.u(1, 1);
  }
  return m;
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

double binomial(int n, int k) {
  return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

// Image of |n_p, n_q> under a two-mode mixing: entry j is the amplitude of
// |j, N - j> with N = n_p + n_q.
std::vector<cplx> mix_kernel(const Eigen::Matrix2cd& u, int np, int nq) {
  const int total = np + nq;
  std::vector<cplx> out(static_cast<std::size_t>(total) + 1, cplx{});
  const double norm_in = std::exp(-0.5 * (log_factorial(np) + log_factorial(nq)));
  for (int j = 0; j <= np; ++j)
    for (int k = 0; k <= nq; ++k) {
      const int to_p = j + k;
      const cplx coeff = binomial(np, j) * binomial(nq, k) * std::pow(u(0, 0), j) *
                         std::pow(u(1, 0), np - j) * std::pow(u(0, 1), k) *
                         std::pow(u(1, 1), nq - k);
      const double norm_out =
          std::exp(0.5 * (log_factorial(to_p) + log_factorial(total - to_p)));
      out[static_cast<std::size_t>(to_p)] += coeff * norm_in * norm_out;
    }
  return out;
}

void apply_phase(StateVector& s, const PhaseElement& e) {
  const FockBasis& basis = s.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto& a = s.amps()[static_cast<Eigen::Index>(i)];
    if (a != cplx{}) a *= std::polar(1.0, e.angle * basis[i][e.mode]);
  }
}

StateVector apply_mix(const StateVector& s, const MixElement& e) {
  const FockBasis& basis = s.basis();
  StateVector out(s.basis_ptr());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const cplx a = s.amps()[static_cast<Eigen::Index>(i)];
    if (a == cplx{}) continue;
    FockState ket = basis[i];
    const int np = ket[e.p];
    const int nq = ket[e.q];
    if (np == 0 && nq == 0) {
      out.amps()[static_cast<Eigen::Index>(i)] += a;
      continue;
    }
    const auto kernel = mix_kernel(e.u, np, nq);
    const int total = np + nq;
    for (int j = 0; j <= total; ++j) {
      if (kernel[static_cast<std::size_t>(j)] == cplx{}) continue;
      ket[e.p] = j;
      ket[e.q] = total - j;
      auto target = basis.find(ket);
      if (!target) throw BasisError("mode mixing left the basis; raise the output cutoff");
      out.amps()[static_cast<Eigen::Index>(*target)] += a * kernel[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace

std::vector<OpticalElement> neif_elements(const NeifConfig& cfg) {
  cfg.validate();
  const double t = std::sqrt(cfg.bs_transmittance);
  const double r = std::sqrt(1.0 - cfg.bs_transmittance);
  Eigen::Matrix2cd bs;
  bs << t, cplx(0.0, r), cplx(0.0, r), t;
  return {
      PhaseElement{Mode::H1, cfg.delta1},
      PhaseElement{Mode::H2, cfg.delta2},
      MixElement{Mode::H1, Mode::V1, rotation(kPi / 4 + cfg.theta1)},
      MixElement{Mode::H2, Mode::V2, rotation(kPi / 4 + cfg.theta2)},
      PhaseElement{Mode::V2, kPi},
      MixElement{Mode::H1, Mode::H2, bs},
      MixElement{Mode::V1, Mode::V2, bs},
  };
}

Eigen::Matrix4cd mode_unitary(const NeifConfig& cfg) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  for (const auto& e : neif_elements(cfg)) m = embed(e) * m;
  return m;
}

StateVector apply_elements(const StateVector& s, const std::vector<OpticalElement>& elements) {
  StateVector cur = s;
  for (const auto& e : elements) {
    if (const auto* ph = std::get_if<PhaseElement>(&e))
      apply_phase(cur, *ph);
    else
      cur = apply_mix(cur, std::get<MixElement>(e));
  }
  return cur;
}

StateVector transform_state(const StateVector& s, const NeifConfig& cfg, int out_cutoff,
                            double max_loss) {
  if (!s.is_normalized()) throw ContractError("transform_state requires a normalized state");
  const FockBasis& in = s.basis();
  if (out_cutoff < 0) {
    int photons = 0;
    for (std::size_t i = 0; i < in.size(); ++i)
      if (std::abs(s.amps()[static_cast<Eigen::Index>(i)]) > 1e-15)
        photons = std::max(photons, in[i].total());
    out_cutoff = std::min(photons, kDefaultMaxCutoff);
  }
  const auto out_basis = make_basis(out_cutoff);
  StateVector staged(out_basis);
  double dropped = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const cplx a = s.amps()[static_cast<Eigen::Index>(i)];
    if (a == cplx{}) continue;
    if (in[i].total() > out_cutoff) {
      dropped += std::norm(a);
      continue;
    }
    staged.amps()[static_cast<Eigen::Index>(out_basis->index(in[i]))] = a;
  }
  if (dropped > max_loss) {
    std::ostringstream msg;
    msg << "analyzer output cutoff " << out_cutoff << " drops weight " << dropped;
    throw TruncationError(msg.str(), dropped, max_loss);
  }
  return apply_elements(staged, neif_elements(cfg));
}

MomentTensor::MomentTensor(const StateVector& s) {
  // v[j][n] = a_j a_n |s>; G[i][m][j][n] = <v[i][m] | v[j][n]>.
  std::array<std::array<Eigen::VectorXcd, 4>, 4> v;
  for (int j = 0; j < 4; ++j) {
    const StateVector aj = apply_ladder(Ladder::Annihilate, kAllModes[j], s);
    for (int n = j; n < 4; ++n) {
      v[j][n] = apply_ladder(Ladder::Annihilate, kAllModes[n], aj).amps();
      v[n][j] = v[j][n];
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int m = 0; m < 4; ++m)
      for (int j = 0; j < 4; ++j)
        for (int n = 0; n < 4; ++n) g_[idx(i, m, j, n)] = v[i][m].dot(v[j][n]);
}

double MomentTensor::cross_number_correlation(const Eigen::RowVector4cd& rk,
                                              const Eigen::RowVector4cd& rl) const {
  // N_k N_l = d_k^+ d_l^+ d_k d_l for k != l, with d_k = sum_j rk(j) a_j.
  cplx acc{};
  for (int i = 0; i < 4; ++i)
    for (int m = 0; m < 4; ++m) {
      const cplx bra = std::conj(rk(i)) * std::conj(rl(m));
      if (bra == cplx{}) continue;
      for (int j = 0; j < 4; ++j)
        for (int n = 0; n < 4; ++n) acc += bra * rk(j) * rl(n) * g_[idx(i, m, j, n)];
    }
  return acc.real();
}

namespace {

void check_pair(const StateVector& s, std::pair<Detector, Detector> pair) {
  if (pair.first == pair.second) throw ContractError("coincidence needs two distinct detectors");
  if (!s.is_normalized()) throw ContractError("coincidence rates require a normalized state");
}

Eigen::RowVector4cd detector_row(const Eigen::Matrix4cd& m, Detector d) {
  return m.row(static_cast<Eigen::Index>(slot(detector_mode(d))));
}

}  // namespace

double double_coincidence(const StateVector& s, const NeifConfig& cfg,
                          std::pair<Detector, Detector> pair) {
  check_pair(s, pair);
  const Eigen::Matrix4cd m = mode_unitary(cfg);
  return MomentTensor(s).cross_number_correlation(detector_row(m, pair.first),
                                                  detector_row(m, pair.second));
}

double double_coincidence_distinguishable(const StateVector& s, const NeifConfig& cfg,
                                          std::pair<Detector, Detector> pair) {
  check_pair(s, pair);
  const Eigen::Matrix4cd m = mode_unitary(cfg);
  // Each detector mode splits into a beam-k1 time bin and a beam-k2 time bin.
  auto bins = [&](Detector d) {
    Eigen::RowVector4cd row = detector_row(m, d);
    Eigen::RowVector4cd from1 = row;
    Eigen::RowVector4cd from2 = row;
    for (Mode mode : kAllModes) {
      const bool beam1 = mode == Mode::H1 || mode == Mode::V1;
      (beam1 ? from2 : from1)(static_cast<Eigen::Index>(slot(mode))) = 0.0;
    }
    return std::array<Eigen::RowVector4cd, 2>{from1, from2};
  };
  const MomentTensor g(s);
  double total = 0.0;
  for (const auto& rk : bins(pair.first))
    for (const auto& rl : bins(pair.second)) total += g.cross_number_correlation(rk, rl);
  return total;
}

double complementary_coincidence(const StateVector& s, const NeifConfig& cfg) {
  return double_coincidence(s, cfg, {Detector::D1h, Detector::D1v});
}

double rate_closed_form(double phi, const NeifConfig& cfg, double S, RateForm form) {
  const double delta = cfg.delta();
  const double t1 = cfg.theta1;
  const double t2 = cfg.theta2;
  const double sin_sum2 = std::pow(std::sin(t1 + t2), 2);
  const double c1 = std::cos(2 * t1);
  const double c2 = std::cos(2 * t2);
  const double leading = 0.25 * (1 + std::cos(delta - phi)) * sin_sum2;
  const double square = form == RateForm::AsPrinted ? (c1 + c2) * (c1 + c2) : c1 * c1 + c2 * c2;
  const double bracket = 1 + std::cos(phi) + 0.25 * square -
                         0.25 * (c1 * c1 + c2 * c2) * std::cos(phi) +
                         0.5 * sin_sum2 *
                             (5 + 3 * std::cos(delta) + std::cos(delta - phi) - std::cos(phi));
  return leading + S * S * bracket;
}

double noise_rate_closed_form(const NeifConfig& cfg, double S) {
  const double c = std::cos(cfg.theta1 - cfg.theta2);
  return 0.5 * S * S * (1 - std::cos(cfg.delta())) * c * c + std::pow(S, 4);
}

double click_probability(const StateVector& out, std::span<const Detector> fire,
                         std::span<const Detector> veto) {
  const FockBasis& basis = out.basis();
  double p = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = std::norm(out.amps()[static_cast<Eigen::Index>(i)]);
    if (w == 0.0) continue;
    const FockState& ket = basis[i];
    const bool fired = std::all_of(fire.begin(), fire.end(),
                                   [&](Detector d) { return ket[detector_mode(d)] > 0; });
    const bool vetoed = std::any_of(veto.begin(), veto.end(),
                                    [&](Detector d) { return ket[detector_mode(d)] > 0; });
    if (fired && !vetoed) p += w;
  }
  return p;
}

const char* to_string(XorVeto v) {
  switch (v) {
    case XorVeto::D1v: return "d1v";
    case XorVeto::D1h: return "d1h";
    case XorVeto::Both: return "both";
  }
  return "?";
}

double xor_suppressed_rate(const StateVector& s, const NeifConfig& cfg, XorVeto veto) {
  const bool veto_h = veto != XorVeto::D1v;
  const bool veto_v = veto != XorVeto::D1h;
  const StateVector out = transform_state(s, cfg);
  const FockBasis& basis = out.basis();
  double p = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = std::norm(out.amps()[static_cast<Eigen::Index>(i)]);
    if (w == 0.0) continue;
    const FockState& ket = basis[i];
    if (ket[Mode::H2] == 0) continue;
    if ((veto_h && ket[Mode::H1] > 0) || (veto_v && ket[Mode::V1] > 0)) continue;
    // k photons on a 50/50 splitter reach both outputs with probability 1 - 2^{1-k}.
    const int k = ket[Mode::V2];
    if (k < 2) continue;
    p += w * (1.0 - std::ldexp(1.0, 1 - k));
  }
  return p;
}

}  // namespace qiopa
