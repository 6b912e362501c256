#include <gtest/gtest.h>

#include <cmath>

#include "qiopa/errors.hpp"
#include "qiopa/fock.hpp"

using namespace qiopa;

TEST(FockBasis, SizeAndLexicographicIndex) {
  const FockBasis b(3);
  ASSERT_EQ(b.size(), 256u);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& n = b[i].n;
    EXPECT_EQ(static_cast<std::size_t>(((n[0] * 4 + n[1]) * 4 + n[2]) * 4 + n[3]), i);
    EXPECT_EQ(b.index(b[i]), i);
  }
  EXPECT_FALSE(b.contains(FockState{{4, 0, 0, 0}}));
  EXPECT_FALSE(b.find(FockState{{0, -1, 0, 0}}).has_value());
}

TEST(FockBasis, CutoffLimits) {
  EXPECT_THROW(make_basis(-1), ContractError);
  EXPECT_THROW(make_basis(kDefaultMaxCutoff + 1), ResourceError);
  EXPECT_NO_THROW(make_basis(0));
  EXPECT_EQ(make_basis(0)->size(), 1u);
}

TEST(FockState, SwapExchangesThePairs) {
  const FockState s{{1, 2, 3, 4}};
  EXPECT_EQ(s.swapped(), (FockState{{3, 4, 1, 2}}));
  EXPECT_EQ(s.total(), 10);
  EXPECT_EQ(s[Mode::V1], 3);
  EXPECT_EQ(partner(Mode::H1), Mode::V2);
  EXPECT_EQ(partner(Mode::H2), Mode::V1);
  EXPECT_EQ(pair_of(Mode::V2), ModePair::A);
  EXPECT_EQ(pair_of(Mode::H2), ModePair::B);
}

TEST(Ladder, MatrixElements) {
  const auto b = make_basis(3);
  const StateVector two = StateVector::basis_state(b, FockState{{2, 0, 0, 0}});
  const StateVector up = apply_ladder(Ladder::Create, Mode::H1, two);
  EXPECT_NEAR(std::abs(up.amplitude(FockState{{3, 0, 0, 0}})), std::sqrt(3.0), 1e-15);
  const StateVector down = apply_ladder(Ladder::Annihilate, Mode::H1, two);
  EXPECT_NEAR(std::abs(down.amplitude(FockState{{1, 0, 0, 0}})), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(apply_ladder(Ladder::Annihilate, Mode::V2, two).norm(), 0.0);
  const StateVector top = StateVector::basis_state(b, FockState{{3, 0, 0, 0}});
  EXPECT_DOUBLE_EQ(apply_ladder(Ladder::Create, Mode::H1, top).norm(), 0.0);
}

TEST(Ladder, CommutatorBelowTheCutoff) {
  const auto b = make_basis(4);
  for (std::size_t i = 0; i < b->size(); ++i) {
    const FockState& k = (*b)[i];
    if (k[Mode::V1] >= 4) continue;
    const StateVector s = StateVector::basis_state(b, k);
    const StateVector lhs = apply_ladder(Ladder::Annihilate, Mode::V1, apply_ladder(Ladder::Create, Mode::V1, s)) -
                            apply_ladder(Ladder::Create, Mode::V1, apply_ladder(Ladder::Annihilate, Mode::V1, s));
    EXPECT_LT(max_abs_difference(lhs, s), 1e-14);
  }
}

TEST(PairState, Components) {
  const auto b = make_basis(2);
  const StateVector s = pair_state(0.7, b);
  EXPECT_TRUE(s.is_normalized());
  EXPECT_NEAR(std::abs(s.amplitude(FockState{{1, 1, 0, 0}}) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.amplitude(FockState{{0, 0, 1, 1}}) - std::polar(1.0, 0.7) / std::sqrt(2.0)), 0.0,
              1e-15);
  EXPECT_THROW(pair_state(0.0, make_basis(0)), BasisError);
}

TEST(SwapParity, SingletOddTripletEven) {
  const auto b = make_basis(2);
  EXPECT_EQ(swap_parity(pair_state(kPi, b)), SwapParity::Odd);
  EXPECT_EQ(swap_parity(pair_state(0.0, b)), SwapParity::Even);
  EXPECT_EQ(swap_parity(pair_state(kPi / 2, b)), SwapParity::Mixed);
  EXPECT_EQ(swap_parity(StateVector::vacuum(b)), SwapParity::Even);
  EXPECT_THROW(swap_parity(2.0 * pair_state(0.0, b)), ContractError);
}

TEST(Angles, WrapIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(quarter_wave_flip(0.0), kPi, 1e-15);
  EXPECT_NEAR(quarter_wave_flip(kPi), 0.0, 1e-15);
}

TEST(StateVector, FidelityAcrossCutoffs) {
  const StateVector a = pair_state(0.3, make_basis(2));
  const StateVector b = pair_state(0.3, make_basis(5));
  EXPECT_NEAR(fidelity(a, b), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(a, pair_state(0.3 + kPi, make_basis(3))), 0.0, 1e-15);
  EXPECT_NEAR(b.mean_occupancy(Mode::H2), 0.5, 1e-15);
  EXPECT_NEAR(b.mean_total(), 2.0, 1e-15);
  EXPECT_THROW((void)a.inner(b), ContractError);
}
