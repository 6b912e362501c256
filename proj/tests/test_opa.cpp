#include <gtest/gtest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "qiopa/errors.hpp"
#include "qiopa/opa.hpp"

using namespace qiopa;

namespace {

// exp(gK)|s> by its Taylor series on the sparse generator.
StateVector taylor_evolve(const StateVector& s, const OpaParams& p) {
  const SparseMatrix K = hamiltonian_generator(p, s.basis());
  Eigen::VectorXcd term = s.amps();
  Eigen::VectorXcd sum = term;
  for (int k = 1; k < 200; ++k) {
    term = (p.g / k) * (K * term);
    sum += term;
    if (term.norm() < 1e-18) break;
  }
  return StateVector(s.basis_ptr(), sum);
}

OpaParams gain(double g, double psi = 0.0) {
  OpaParams p;
  p.g = g;
  p.psi = psi;
  return p;
}

}  // namespace

TEST(Generator, AntiHermitianAndPairConserving) {
  const auto b = make_basis(3);
  const SparseMatrix K = hamiltonian_generator(gain(0.2, 0.4), *b);
  EXPECT_LT(Eigen::MatrixXcd(K + SparseMatrix(K.adjoint())).cwiseAbs().maxCoeff(), 1e-15);
  for (int k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it) {
      const auto& from = (*b)[static_cast<std::size_t>(it.col())].n;
      const auto& to = (*b)[static_cast<std::size_t>(it.row())].n;
      EXPECT_EQ(from[0] - from[1], to[0] - to[1]);
      EXPECT_EQ(from[2] - from[3], to[2] - to[3]);
    }
}

TEST(Propagator, MatchesDenseExponential) {
  const auto b = make_basis(3);
  const OpaParams p = gain(0.3, 0.9);
  const Eigen::MatrixXcd K = Eigen::MatrixXcd(hamiltonian_generator(p, *b));
  const Eigen::MatrixXcd U = (p.g * K).exp();
  const Propagator prop(p, b);
  EXPECT_LT((Eigen::MatrixXcd(prop.matrix()) - U).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_GT(prop.block_count(), 1u);
}

TEST(Propagator, MatchesTaylorSeries) {
  const auto b = make_basis(6);
  for (double psi : {0.0, 1.1}) {
    const OpaParams p = gain(0.22, psi);
    for (double phi : {0.0, kPi, 0.6}) {
      const StateVector s = pair_state(phi, b);
      EXPECT_LT(max_abs_difference(Propagator(p, b).apply(s), taylor_evolve(s, p)), 1e-12);
    }
  }
}

TEST(Propagator, Unitary) {
  const auto b = make_basis(5);
  const Propagator prop(gain(0.4, 0.3), b);
  const StateVector s = pair_state(1.0, b);
  const StateVector u = prop.apply(s);
  EXPECT_NEAR(u.norm(), 1.0, 1e-13);
  EXPECT_LT(max_abs_difference(prop.apply_adjoint(u), s), 1e-13);
}

TEST(Evolve, ZeroGainIsIdentity) {
  const auto b = make_basis(4);
  const StateVector s = pair_state(0.4, b);
  EXPECT_EQ(max_abs_difference(evolve(s, gain(0.0)), s), 0.0);
}

TEST(Evolve, TruncationIsReported) {
  const auto b = make_basis(3);
  try {
    (void)evolve(StateVector::vacuum(b), gain(1.0));
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_GT(e.loss(), e.bound());
  }
  EXPECT_NO_THROW((void)evolve(StateVector::vacuum(b), gain(1.0), 1.0));
}

TEST(Evolve, CachedPropagatorIsShared) {
  const auto b = make_basis(3);
  EXPECT_EQ(cached_propagator(gain(0.2), b).get(), cached_propagator(gain(0.2), b).get());
  EXPECT_NE(cached_propagator(gain(0.2), b).get(), cached_propagator(gain(0.21), b).get());
}

TEST(SqueezedVacuum, ClosedFormAgreesWithEvolution) {
  const auto b = make_basis(8);
  for (double g : {0.05, 0.22, 0.3})
    for (double psi : {0.0, 0.8}) {
      const OpaParams p = gain(g, psi);
      const StateVector out = evolve(StateVector::vacuum(b), p);
      EXPECT_GT(fidelity(out, squeezed_vacuum_closed_form(p, b)), 1 - 1e-8) << g << " " << psi;
      if (psi == 0.0) EXPECT_EQ(swap_parity(out, 1e-8), SwapParity::Even);
    }
}

TEST(SqueezedVacuum, ThermalPairStatistics) {
  // Two independent two-mode squeezers: P(k pairs) = (k+1) (1 - G^2)^2 G^{2k}.
  const auto b = make_basis(12);
  const OpaParams p = gain(0.2);
  const StateVector out = evolve(StateVector::vacuum(b), p);
  const double G2 = std::pow(p.Gamma(), 2);
  std::vector<double> prob(4, 0.0);
  for (std::size_t i = 0; i < b->size(); ++i) {
    const int k = (*b)[i].total() / 2;
    if (k < 4) prob[static_cast<std::size_t>(k)] += std::norm(out.amps()[static_cast<Eigen::Index>(i)]);
  }
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(prob[k], (k + 1) * std::pow(1 - G2, 2) * std::pow(G2, k), 1e-12);
}

TEST(CatState, SingletClosedFormIsExact) {
  const auto b = make_basis(8);
  const OpaParams p = gain(0.22);
  const StateVector out = evolve(pair_state(kPi, b), p);
  EXPECT_GT(fidelity(out, cat_output_closed_form(kPi, p, b).state), 1 - 1e-9);
  EXPECT_EQ(swap_parity(out, 1e-8), SwapParity::Odd);
}

TEST(CatState, TripletClosedFormDropsASinhSquaredTerm) {
  // The exact triplet amplitude on |nn.mm> is proportional to (n + m - 2 S^2) Gamma^{n+m};
  // the closed form keeps n + m.
  const auto b = make_basis(8);
  const OpaParams p = gain(0.22);
  const StateVector out = evolve(pair_state(0.0, b), p);
  const double f = fidelity(out, cat_output_closed_form(0.0, p, b).state);
  EXPECT_LT(f, 0.999);
  EXPECT_GT(f, 0.95);
  const double S2 = std::pow(p.S(), 2);
  const cplx ref = out.amplitude(FockState{{1, 1, 0, 0}}) / (1.0 - 2.0 * S2);
  for (int n = 0; n <= 3; ++n)
    for (int m = 0; m <= 3; ++m) {
      const cplx a = out.amplitude(FockState{{n, n, m, m}});
      const double expect = (n + m - 2.0 * S2) * std::pow(p.Gamma(), n + m - 1);
      EXPECT_NEAR(std::abs(a - ref * expect), 0.0, 1e-9) << n << "," << m;
    }
  EXPECT_EQ(swap_parity(out, 1e-8), SwapParity::Even);
}

TEST(Bogoliubov, HoldsAwayFromTheBoundary) {
  const auto b = make_basis(8);
  EXPECT_LT(bogoliubov_check(gain(0.22), b, 7), 1e-8);
  EXPECT_LT(bogoliubov_check(gain(0.05, 0.5), b, 6), 1e-6);
  EXPECT_GT(bogoliubov_check(gain(0.22), b, 2), 1e-3);
  EXPECT_THROW(bogoliubov_check(gain(0.22), make_basis(1), 2), BasisError);
}

TEST(Statistics, StimulatedPairsFollowSinhSquared) {
  for (double g : {0.05, 0.1, 0.22}) {
    OpaParams p = gain(g);
    p.cutoff = 10;
    EXPECT_NEAR(stimulated_pairs(kPi, p), 4 * std::pow(std::sinh(g), 2), 1e-8) << g;
  }
}

TEST(Statistics, DoublePairRatio) {
  for (double gp : {0.02, 0.22 / 3, 0.1})
    EXPECT_NEAR(double_pair_ratio(gp, 8), 1.5 * std::pow(std::tanh(gp), 2), 1e-10);
}

TEST(OpaParams, Validation) {
  OpaParams p;
  EXPECT_NO_THROW(p.validate());
  p.g = -0.1;
  EXPECT_THROW(p.validate(), ContractError);
  p = OpaParams{};
  p.eta = 0.0;
  EXPECT_THROW(p.validate(), ContractError);
  EXPECT_NEAR(OpaParams{}.g_prime(), 0.22 / 3, 1e-15);
}
