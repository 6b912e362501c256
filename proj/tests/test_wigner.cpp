#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qiopa/errors.hpp"
#include "qiopa/opa.hpp"
#include "qiopa/wigner.hpp"

using namespace qiopa;

namespace {

OpaParams gain(double g) {
  OpaParams p;
  p.g = g;
  return p;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(Displacement, CoherentColumn) {
  const cplx a(0.7, -0.4);
  const Eigen::MatrixXcd D = displacement_matrix(a, 12, 3);
  for (int m = 0; m < 12; ++m) {
    const cplx expect = std::exp(-0.5 * std::norm(a)) * std::pow(a, m) / std::sqrt(factorial(m));
    EXPECT_LT(std::abs(D(m, 0) - expect), 1e-14) << m;
  }
}

TEST(Displacement, UnitaryOnLowColumns) {
  const Eigen::MatrixXcd D = displacement_matrix(cplx(1.1, 0.5), 60, 60);
  const Eigen::MatrixXcd G = D.adjoint() * D;
  EXPECT_LT((G.topLeftCorner(10, 10) - Eigen::MatrixXcd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXcd inv = displacement_matrix(cplx(-0.3, 0.2), 30, 30) * displacement_matrix(cplx(0.3, -0.2), 30, 30);
  EXPECT_LT((inv.topLeftCorner(8, 8) - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Characteristic, VacuumIsGaussian) {
  const auto b = make_basis(2);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    const PhasePoint p = random_point(rng, 0.8);
    double sum = 0.0;
    for (cplx z : p.coords()) sum += std::norm(z);
    EXPECT_LT(std::abs(expectation_displacement(StateVector::vacuum(b), p) - std::exp(-0.5 * sum)), 1e-14);
  }
}

TEST(Characteristic, EvolvedArgumentsMatchEvolvedState) {
  const auto small = make_basis(3);
  const auto big = make_basis(12);
  const OpaParams p = gain(0.22);
  std::mt19937_64 rng(2);
  for (double phi : {0.0, kPi}) {
    const StateVector in = pair_state(phi, small);
    const StateVector out = evolve(pair_state(phi, big), p);
    for (int t = 0; t < 3; ++t) {
      const PhasePoint pt = random_point(rng, 0.6);
      EXPECT_LT(std::abs(characteristic_fn(in, p, pt) - expectation_displacement(out, pt)), 1e-8);
    }
  }
}

TEST(WignerNumeric, VacuumDisplacedParity) {
  const auto b = make_basis(1);
  std::mt19937_64 rng(4);
  EXPECT_NEAR(wigner_numeric(StateVector::vacuum(b), PhasePoint{}), std::pow(2.0 / kPi, 4), 1e-14);
  for (int t = 0; t < 3; ++t) {
    const PhasePoint p = random_point(rng, 0.7);
    double sum = 0.0;
    for (cplx z : p.coords()) sum += std::norm(z);
    EXPECT_NEAR(wigner_numeric(StateVector::vacuum(b), p), std::pow(2.0 / kPi, 4) * std::exp(-2.0 * sum), 1e-12);
  }
  EXPECT_THROW(wigner_numeric(2.0 * StateVector::vacuum(b), PhasePoint{}), ContractError);
}

TEST(WignerClosedForm, SqueezedVacuumAgreesWithOracle) {
  const auto b = make_basis(10);
  const OpaParams p = gain(0.22);
  const StateVector vac = evolve(StateVector::vacuum(b), p);
  std::mt19937_64 rng(6);
  EXPECT_NEAR(kNumericToClosedForm * wigner_numeric(vac, PhasePoint{}), std::pow(kPi, -4), 1e-12);
  for (int t = 0; t < 4; ++t) {
    const PhasePoint pt = random_point(rng, 0.8);
    EXPECT_NEAR(kNumericToClosedForm * wigner_numeric(vac, pt), wigner_squeezed_vacuum(pt, p.g), 1e-9);
  }
}

TEST(WignerClosedForm, CorrectedDeltaMatchesOracle) {
  const auto b = make_basis(10);
  const OpaParams p = gain(0.22);
  std::mt19937_64 rng(8);
  for (double phi : {0.0, kPi}) {
    const StateVector out = evolve(pair_state(phi, b), p);
    double printed_gap = 0.0;
    for (int t = 0; t < 4; ++t) {
      const PhasePoint pt = random_point(rng, 0.9);
      const double w = kNumericToClosedForm * wigner_numeric(out, pt);
      EXPECT_NEAR(wigner_closed_form(pt, p.g, phi, DeltaForm::Corrected), w, 1e-9);
      printed_gap = std::max(printed_gap, std::abs(wigner_closed_form(pt, p.g, phi, DeltaForm::AsPrinted) - w));
    }
    EXPECT_GT(printed_gap, 1e-4);
  }
}

TEST(WignerClosedForm, OriginValue) {
  for (double phi : {0.0, 1.0, kPi})
    for (auto form : {DeltaForm::AsPrinted, DeltaForm::Corrected})
      EXPECT_DOUBLE_EQ(wigner_closed_form(PhasePoint{}, 0.22, phi, form), std::pow(kPi, -4));
}

TEST(WignerClosedForm, DeltaTerm) {
  const cplx gp(1.0, 0.5);
  const cplx gm(0.3, -0.2);
  const double diff = std::norm(gp) - std::norm(gm);
  const double re = (gp * std::conj(gm)).real();
  EXPECT_LT(std::abs(delta_term(gp, gm, DeltaForm::AsPrinted) - 0.5 * cplx(diff, -re)), 1e-15);
  EXPECT_LT(std::abs(delta_term(gp, gm, DeltaForm::Corrected) - cplx(diff, -2 * re) / std::sqrt(2.0)), 1e-15);
}

TEST(SqueezedVars, Definition) {
  const PhasePoint p{cplx(0.1, 0.2), cplx(-0.3, 0.4), cplx(0.5, 0.0), cplx(0.0, -0.6)};
  const SqueezedVars v = squeezed_vars(p, 0.3);
  EXPECT_LT(std::abs(v.a_plus - (p.alpha1 + std::conj(p.alpha2)) * std::exp(-0.3)), 1e-15);
  EXPECT_LT(std::abs(v.b_minus - cplx(0, 1) * (p.beta1 - std::conj(p.beta2)) * std::exp(0.3)), 1e-15);
}
