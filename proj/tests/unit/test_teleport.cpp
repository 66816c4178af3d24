#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "teleqcp/correlators.hpp"
#include "teleqcp/error.hpp"
#include "teleqcp/teleport.hpp"

using namespace teleqcp;

namespace {

CorrelatorSet corr(double z, double xx, double yy, double zz) {
  CorrelatorSet c;
  c.z = z;
  c.xx = xx;
  c.yy = yy;
  c.zz = zz;
  return c;
}

PureQubit random_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng)};
}

int idx(auto e) { return static_cast<int>(e); }

}  // namespace

TEST(Protocol, OutcomeProbabilities) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto c = random_physical_correlators(rng);
    c.z = 0.0;
    const auto rho = assemble_xy_rho(c);
    const auto psi = random_qubit(rng);
    for (auto j : kBellOutcomes) EXPECT_NEAR(outcome_probability(psi, rho, j), 0.25, 1e-14);
  }
  const auto c = random_physical_correlators(rng);
  for (auto j : kBellOutcomes) {
    EXPECT_NEAR(outcome_probability(PureQubit{1.0 / std::sqrt(2.0), 0.4}, assemble_xy_rho(c), j), 0.25, 1e-14);
  }
  const auto up = assemble_xxz_rho(corr(1.0, 0.0, 0.0, 1.0));
  const PureQubit zero{1.0, 0.0};
  EXPECT_NEAR(outcome_probability(zero, up, BellOutcome::PsiMinus), 0.0, 1e-15);
  EXPECT_NEAR(outcome_probability(zero, up, BellOutcome::PsiPlus), 0.0, 1e-15);
  EXPECT_NEAR(outcome_probability(zero, up, BellOutcome::PhiMinus), 0.5, 1e-15);
  EXPECT_NEAR(outcome_probability(zero, up, BellOutcome::PhiPlus), 0.5, 1e-15);
}

TEST(Protocol, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    const auto rho = assemble_xy_rho(random_physical_correlators(rng));
    const auto psi = random_qubit(rng);
    double total = 0.0;
    for (auto j : kBellOutcomes) total += outcome_probability(psi, rho, j);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Protocol, IdealAndUselessResources) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto psi = random_qubit(rng);
    const Eigen::Matrix2cd target = psi.ket() * psi.ket().adjoint();
    for (auto k : kUnitarySets) {
      TwoQubitState ideal;
      const Eigen::Vector4cd b = bell_vector(static_cast<BellOutcome>(idx(k)));
      ideal.rho = b * b.adjoint();
      for (auto j : kBellOutcomes) {
        EXPECT_LT((bob_state(psi, ideal, j, k) - target).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_LT((bob_state(psi, TwoQubitState{}, j, k) - Eigen::Matrix2cd::Identity() / 2.0).cwiseAbs().maxCoeff(),
                  1e-14);
      }
      EXPECT_NEAR(mean_fidelity_sim(psi, ideal, k), 1.0, 1e-13);
    }
  }
}

TEST(Protocol, BellVectorsMatchOracle) {
  for (auto j : kBellOutcomes) EXPECT_LT((bell_vector(j) - oracle::bell(idx(j))).norm(), 1e-15);
}

TEST(Protocol, BobStateMatchesEightByEightOracle) {
  std::mt19937_64 rng(21);
  const auto rho = assemble_xy_rho(random_physical_correlators(rng));
  const PureQubit psi{0.6, 1.1};
  const Eigen::Matrix2cd raw = oracle::bob_unnormalised(psi.ket(), rho.rho, idx(BellOutcome::PsiPlus),
                                                        idx(UnitarySet::PsiMinus));
  const Eigen::Matrix2cd expected = raw / raw.trace().real();
  EXPECT_LT((bob_state(psi, rho, BellOutcome::PsiPlus, UnitarySet::PsiMinus) - expected).cwiseAbs().maxCoeff(), 1e-12);

  for (int t = 0; t < 200; ++t) {
    const auto r = assemble_xy_rho(random_physical_correlators(rng));
    const auto p = random_qubit(rng);
    for (auto k : kUnitarySets) {
      EXPECT_NEAR(mean_fidelity_sim(p, r, k), oracle::mean_fidelity(p.ket(), r.rho, idx(k)), 1e-12);
    }
  }
}

TEST(Protocol, ZeroProbabilityOutcomeIsReported) {
  const auto up = assemble_xxz_rho(corr(1.0, 0.0, 0.0, 1.0));
  try {
    bob_state(PureQubit{1.0, 0.0}, up, BellOutcome::PsiMinus, UnitarySet::PhiPlus);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroProbabilityOutcome);
  }
  EXPECT_NEAR(mean_fidelity_sim(PureQubit{1.0, 0.0}, up, UnitarySet::PhiPlus), 1.0, 1e-14);
}

TEST(ClosedForm, MatchesSimulation) {
  std::mt19937_64 rng(20100101);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int t = 0; t < 1000; ++t) {
    const auto psi = random_qubit(rng);
    const auto c = random_physical_correlators(rng);
    const auto k = kUnitarySets[pick(rng)];
    EXPECT_NEAR(mean_fidelity_sim(psi, assemble_xy_rho(c), k), mean_fidelity_closed(psi, c, k), 1e-12);
  }
}

TEST(ClosedForm, SpecialValues) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto psi = random_qubit(rng);
    for (auto k : kUnitarySets) EXPECT_NEAR(mean_fidelity_closed(psi, corr(0.3, 0.0, 0.0, 0.0), k), 0.5, 1e-15);
  }
  const auto c = corr(0.2, 0.4, -0.1, -0.6);
  EXPECT_NEAR(mean_fidelity_closed(PureQubit{1.0, 0.0}, c, UnitarySet::PsiPlus), (1.0 - c.zz) / 2.0, 1e-15);
}

TEST(ClosedForm, XyFormReducesToXxzForm) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    const auto c = random_physical_correlators(rng, true);
    const auto psi = random_qubit(rng);
    for (auto k : kUnitarySets) {
      EXPECT_NEAR(mean_fidelity_xy_form(psi, c, k), mean_fidelity_xxz_form(psi, c, k), 1e-14);
      EXPECT_NEAR(per_set_max_fidelity(c, k).value, per_set_max_fidelity_xxz_form(c, k), 1e-14);
      EXPECT_NEAR(avg_fidelity_closed(c, k), avg_fidelity_xxz_form(c, k), 1e-14);
    }
    EXPECT_NEAR(max_mean_fidelity(c).value, max_mean_fidelity_xxz_form(c), 1e-14);
    EXPECT_NEAR(max_avg_fidelity(c).value, max_avg_fidelity_xxz_form(c), 1e-14);
  }
}

TEST(PerSet, SpecialValues) {
  const auto singlet = corr(0.0, -1.0, -1.0, -1.0);
  EXPECT_NEAR(per_set_max_fidelity(singlet, UnitarySet::PsiMinus).value, 1.0, 1e-15);
  const auto zero = per_set_max_fidelity(corr(0, 0, 0, 0), UnitarySet::PhiMinus);
  EXPECT_DOUBLE_EQ(zero.value, 0.5);
  ASSERT_TRUE(zero.argmax_state.has_value());
  EXPECT_EQ(*zero.argmax_state, InputFamily::Zero);
}

TEST(PerSet, MatchesGridSearchOracle) {
  const auto c = xy_correlators_tl(1.5, 1.0, 0.0);
  const auto rho = assemble_xy_rho(c);
  for (auto k : kUnitarySets) {
    EXPECT_NEAR(per_set_max_fidelity(c, k).value, oracle::grid_max_fidelity(rho.rho, idx(k), 200), 1e-6)
        << to_string(k);
  }
}

TEST(PerSet, MatchesGridSearchOnRandomStates) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 5; ++t) {
    const auto c = random_physical_correlators(rng);
    const auto rho = assemble_xy_rho(c);
    for (auto k : kUnitarySets) {
      const double grid = oracle::grid_max_fidelity(rho.rho, idx(k), 60);
      const double closed = per_set_max_fidelity(c, k).value;
      EXPECT_GE(closed, grid - 1e-12);
      EXPECT_NEAR(closed, grid, 5e-3);
    }
  }
}

TEST(MaxMean, ExamplesAndConsistency) {
  const auto r = max_mean_fidelity(corr(0.1, 0.6, 0.6, -0.3));
  EXPECT_DOUBLE_EQ(r.value, 0.8);
  EXPECT_EQ(r.branch, Branch::Xx);
  EXPECT_DOUBLE_EQ(max_mean_fidelity(corr(0, 0, 0, 0)).value, 0.5);
  EXPECT_EQ(max_mean_fidelity(corr(0, 0, 0, 0)).branch, Branch::Zz);

  const auto c = xy_correlators_tl(1.5, 0.5, 0.0);
  double best = 0.0;
  for (auto k : kUnitarySets) best = std::max(best, per_set_max_fidelity(c, k).value);
  EXPECT_NEAR(max_mean_fidelity(c).value, best, 1e-14);
  const auto report = max_mean_fidelity(c);
  EXPECT_NEAR(per_set_max_fidelity(c, report.argmax_set).value, report.value, 1e-14);
}

TEST(Average, ClosedFormExamples) {
  for (auto k : kUnitarySets) EXPECT_DOUBLE_EQ(avg_fidelity_closed(corr(0.4, 0, 0, 0), k), 0.5);
  EXPECT_NEAR(avg_fidelity_closed(corr(0.0, 1.0, -1.0, 1.0), UnitarySet::PhiPlus), 1.0, 1e-15);
  EXPECT_NEAR(max_avg_fidelity(corr(0.0, -1.0, -1.0, -1.0)).value, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(max_avg_fidelity(corr(0, 0, 0, 0)).value, 0.5);
  EXPECT_EQ(max_avg_fidelity(corr(0, 0, 0, 0)).branch, Branch::PsiPair);
}

TEST(Average, QuadratureMatchesClosedForm) {
  std::mt19937_64 rng(23);
  for (auto k : kUnitarySets) EXPECT_NEAR(avg_fidelity_quadrature(TwoQubitState{}, k), 0.5, 1e-14);
  for (int t = 0; t < 100; ++t) {
    const auto c = random_physical_correlators(rng);
    const auto rho = assemble_xy_rho(c);
    for (auto k : kUnitarySets) EXPECT_NEAR(avg_fidelity_quadrature(rho, k), avg_fidelity_closed(c, k), 1e-8);
    for (auto j : kBellOutcomes) EXPECT_NEAR(avg_outcome_probability_quadrature(rho, j), 0.25, 1e-8);
  }
}

TEST(Average, QuadratureNeedsEnoughNodes) {
  EXPECT_THROW(avg_fidelity_quadrature(TwoQubitState{}, UnitarySet::PsiMinus, 4), Error);
}

TEST(Names, Strings) {
  EXPECT_EQ(to_string(UnitarySet::PsiMinus), "S_psi-");
  EXPECT_EQ(to_string(BellOutcome::PhiPlus), "phi+");
  EXPECT_EQ(to_string(Branch::PsiPair), "psi");
}
