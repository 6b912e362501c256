#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "qiopa/errors.hpp"
#include "qiopa/neif.hpp"
#include "qiopa/opa.hpp"

using namespace qiopa;

namespace {

using Monomial = std::array<int, 4>;
using Polynomial = std::map<Monomial, cplx>;

double factorial(int n) { return std::tgamma(n + 1.0); }

// Output state by substituting a_i^+ -> sum_k M(k, i) d_k^+ in the creation
// polynomial of each input ket.
StateVector substitute(const StateVector& s, const Eigen::Matrix4cd& M, BasisPtr out_basis) {
  StateVector out(out_basis);
  for (std::size_t idx = 0; idx < s.basis().size(); ++idx) {
    const cplx amp = s.amps()[static_cast<Eigen::Index>(idx)];
    if (amp == cplx{}) continue;
    const auto& n = s.basis()[idx].n;
    Polynomial poly{{Monomial{0, 0, 0, 0}, amp}};
    for (int i = 0; i < 4; ++i) {
      for (int rep = 0; rep < n[i]; ++rep) {
        Polynomial next;
        for (const auto& [mono, c] : poly)
          for (int k = 0; k < 4; ++k) {
            if (M(k, i) == cplx{}) continue;
            Monomial m = mono;
            ++m[k];
            next[m] += c * M(k, i);
          }
        poly = std::move(next);
      }
    }
    double norm = 1.0;
    for (int i = 0; i < 4; ++i) norm *= std::sqrt(factorial(n[i]));
    for (const auto& [mono, c] : poly) {
      double w = 1.0;
      for (int k = 0; k < 4; ++k) w *= std::sqrt(factorial(mono[k]));
      const FockState ket{mono};
      out.set_amplitude(ket, out.amplitude(ket) + c * w / norm);
    }
  }
  return out;
}

StateVector random_state(std::mt19937_64& rng, int cutoff) {
  std::normal_distribution<double> nd;
  const auto b = make_basis(cutoff);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(b->size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
  return StateVector(b, v.normalized());
}

NeifConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  NeifConfig c;
  c.delta1 = u(rng);
  c.delta2 = u(rng);
  c.theta1 = u(rng);
  c.theta2 = u(rng);
  c.bs_transmittance = 0.5 + 0.1 * u(rng) / kPi;
  return c;
}

double number_moment(const StateVector& out, Detector a, Detector b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < out.basis().size(); ++i)
    acc += out.basis()[i][detector_mode(a)] * out.basis()[i][detector_mode(b)] *
           std::norm(out.amps()[static_cast<Eigen::Index>(i)]);
  return acc;
}

OpaParams gain(double g) {
  OpaParams p;
  p.g = g;
  return p;
}

}  // namespace

TEST(ModeUnitary, IsUnitary) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Matrix4cd M = mode_unitary(random_config(rng));
    EXPECT_LT((M.adjoint() * M - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ModeUnitary, FullTransmissionAtMinusQuarterTurnLeavesOnlyTheFold) {
  NeifConfig c;
  c.theta1 = -kPi / 4;
  c.theta2 = -kPi / 4;
  c.bs_transmittance = 1.0;
  Eigen::Matrix4cd expect = Eigen::Matrix4cd::Identity();
  expect(static_cast<Eigen::Index>(slot(Mode::V2)), static_cast<Eigen::Index>(slot(Mode::V2))) = -1.0;
  EXPECT_LT((mode_unitary(c) - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TransformState, MatchesPolynomialSubstitution) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 4; ++t) {
    const StateVector s = random_state(rng, 2);
    const NeifConfig c = random_config(rng);
    const StateVector out = transform_state(s, c, 8);
    const StateVector ref = substitute(s, mode_unitary(c), make_basis(8));
    EXPECT_LT(max_abs_difference(out, ref), 1e-12);
    EXPECT_NEAR(out.norm(), 1.0, 1e-12);
    EXPECT_NEAR(out.mean_total(), s.mean_total(), 1e-11);
  }
}

TEST(TransformState, DropsHeavyKetsOnlyWithinTheLossBound) {
  const auto b = make_basis(3);
  StateVector s(b);
  s.set_amplitude(FockState{{1, 0, 0, 0}}, 1.0);
  s.set_amplitude(FockState{{3, 3, 3, 3}}, 1e-3);
  s = s.normalized();
  EXPECT_NO_THROW((void)transform_state(s, NeifConfig{}, 4));
  EXPECT_THROW((void)transform_state(s, NeifConfig{}, 4, 1e-8), TruncationError);
}

TEST(Coincidence, MomentRouteMatchesOutputState) {
  std::mt19937_64 rng(3);
  const StateVector s = random_state(rng, 2);
  const NeifConfig c = random_config(rng);
  const StateVector out = transform_state(s, c, 8);
  for (auto [a, b] : {std::pair{Detector::D1h, Detector::D2v}, std::pair{Detector::D1v, Detector::D2h},
                      std::pair{Detector::D1h, Detector::D1v}, std::pair{Detector::D2h, Detector::D2v}})
    EXPECT_NEAR(double_coincidence(s, c, {a, b}), number_moment(out, a, b), 1e-12);
  EXPECT_THROW(double_coincidence(s, c, {Detector::D1h, Detector::D1h}), ContractError);
}

TEST(Coincidence, LeadingOrderClosedForm) {
  std::mt19937_64 rng(5);
  const auto b = make_basis(2);
  for (int t = 0; t < 50; ++t) {
    NeifConfig c = random_config(rng);
    c.bs_transmittance = 0.5;
    const double phi = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
    EXPECT_NEAR(double_coincidence(pair_state(phi, b), c, {Detector::D1h, Detector::D2v}),
                rate_closed_form(phi, c, 0.0), 1e-13);
  }
}

TEST(Coincidence, ParitySelectivity) {
  const auto b = make_basis(2);
  const NeifConfig c;
  EXPECT_NEAR(double_coincidence(pair_state(0.0, b), c, {Detector::D1h, Detector::D2v}), 0.5, 1e-14);
  EXPECT_NEAR(double_coincidence(pair_state(kPi, b), c, {Detector::D1h, Detector::D2v}), 0.0, 1e-14);
  EXPECT_NEAR(complementary_coincidence(pair_state(0.0, b), c), 0.0, 1e-14);
  EXPECT_NEAR(complementary_coincidence(pair_state(kPi, b), c), 0.5, 1e-14);
  for (double phi : {0.0, kPi})
    EXPECT_NEAR(double_coincidence_distinguishable(pair_state(phi, b), c, {Detector::D1h, Detector::D2v}),
                0.25, 1e-14);
}

TEST(Coincidence, CorrectedGainBracketIsTheSinhSquaredCoefficient) {
  const auto b = make_basis(6);
  const OpaParams p = gain(0.02);
  const double S = p.S();
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    NeifConfig c = random_config(rng);
    c.bs_transmittance = 0.5;
    const double phi = std::uniform_real_distribution<double>(0, 2 * kPi)(rng);
    const StateVector out = evolve(pair_state(phi, b), p);
    const double sim = double_coincidence(out, c, {Detector::D1h, Detector::D2v});
    EXPECT_LT(std::abs(sim - rate_closed_form(phi, c, S, RateForm::Corrected)), 10 * std::pow(S, 4));
    const double gap = rate_closed_form(phi, c, S, RateForm::AsPrinted) -
                       rate_closed_form(phi, c, S, RateForm::Corrected);
    EXPECT_NEAR(gap, 0.5 * S * S * std::cos(2 * c.theta1) * std::cos(2 * c.theta2), 1e-15);
  }
}

TEST(Noise, ClosedFormToSinhFourth) {
  const auto b = make_basis(8);
  for (double g : {0.05, 0.1}) {
    const OpaParams p = gain(g);
    const StateVector vac = evolve(StateVector::vacuum(b), p);
    for (double delta : {0.0, 1.3, kPi}) {
      NeifConfig c;
      c.delta1 = delta;
      c.theta1 = 0.2;
      c.theta2 = 0.9;
      EXPECT_LT(std::abs(double_coincidence(vac, c, {Detector::D2h, Detector::D2v}) -
                         noise_rate_closed_form(c, p.S())),
                2 * std::pow(p.S(), 4));
    }
  }
}

TEST(Xor, SplitterWeight) {
  // k photons on a 50/50 splitter: both outputs occupied with probability 1 - 2^{1-k}.
  const auto b = make_basis(6);
  Eigen::Matrix2cd bs;
  bs << 1.0, cplx(0, 1), cplx(0, 1), 1.0;
  bs /= std::sqrt(2.0);
  for (int k = 1; k <= 6; ++k) {
    const StateVector s = StateVector::basis_state(b, FockState{{0, k, 0, 0}});
    const StateVector out = apply_elements(s, {MixElement{Mode::V2, Mode::H1, bs}});
    double both = 0.0;
    for (std::size_t i = 0; i < b->size(); ++i)
      if ((*b)[i][Mode::V2] > 0 && (*b)[i][Mode::H1] > 0) both += std::norm(out.amps()[static_cast<Eigen::Index>(i)]);
    EXPECT_NEAR(both, 1.0 - std::ldexp(1.0, 1 - k), 1e-13) << k;
  }
}

TEST(Xor, VacuumNoiseVanishesAtZeroDelta) {
  const auto b = make_basis(8);
  for (double g : {0.1, 0.3}) {
    const StateVector vac = evolve(StateVector::vacuum(b), gain(g));
    for (XorVeto v : {XorVeto::D1v, XorVeto::D1h, XorVeto::Both})
      EXPECT_LT(xor_suppressed_rate(vac, NeifConfig{}, v), 1e-12);
    NeifConfig off;
    off.delta1 = kPi / 2;
    if (g > 0.2) EXPECT_GT(xor_suppressed_rate(vac, off, XorVeto::D1v), 1e-5);
  }
}

TEST(Xor, AmplifiedSingletSurvivesOnlyTheD1vVeto) {
  // The amplified singlet is (A^+ - B^+) times split pairs; its extra d2v photon
  // always arrives with a d1h partner.
  const auto b = make_basis(8);
  const StateVector out = evolve(pair_state(kPi, b), gain(0.22));
  EXPECT_GT(xor_suppressed_rate(out, NeifConfig{}, XorVeto::D1v), 0.01);
  EXPECT_LT(xor_suppressed_rate(out, NeifConfig{}, XorVeto::D1h), 1e-12);
  EXPECT_LT(xor_suppressed_rate(out, NeifConfig{}, XorVeto::Both), 1e-12);
  EXPECT_LT(xor_suppressed_rate(evolve(pair_state(0.0, b), gain(0.22)), NeifConfig{}), 1e-12);
}

TEST(Clicks, ThresholdDetectors) {
  const auto b = make_basis(3);
  StateVector s(b);
  s.set_amplitude(FockState{{2, 0, 0, 1}}, std::sqrt(0.3));
  s.set_amplitude(FockState{{0, 1, 0, 0}}, std::sqrt(0.7));
  const std::array fire{Detector::D1h};
  const std::array none{Detector::D2v};
  const std::array veto{Detector::D2h};
  EXPECT_NEAR(click_probability(s, fire, {}), 0.3, 1e-15);
  EXPECT_NEAR(click_probability(s, none, {}), 0.7, 1e-15);
  EXPECT_NEAR(click_probability(s, fire, veto), 0.0, 1e-15);
}

TEST(NeifConfig, Validation) {
  NeifConfig c;
  c.bs_transmittance = 1.5;
  EXPECT_THROW(c.validate(), ContractError);
}
