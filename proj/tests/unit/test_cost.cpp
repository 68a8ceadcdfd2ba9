#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "socmarket/cost.hpp"
#include "socmarket/error.hpp"

using namespace socmarket;
using cost::StageAction;

namespace {

const SocBid kEdcr{{0, 5, 10}, {2, 1}, {5, 4}, 1.0};
const SocBid kNonEdcr{{0, 5, 10}, {2, 1}, {6, 4}, 1.0};

Trajectory two_step(double delta, std::vector<double> up, std::vector<double> down, std::vector<double> soc) {
  return Trajectory{delta, std::move(up), std::move(down), std::move(soc)};
}

// Random action whose end SoC lies in range; at least one walking order fits.
StageAction random_action(std::mt19937_64& rng, const SocBid& b) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lo = b.soc_min();
  const double hi = b.soc_max();
  for (;;) {
    StageAction a;
    a.start_soc = lo + (hi - lo) * u(rng);
    const double mode = u(rng);
    if (mode < 0.35) {
      a.charge = u(rng) * (hi - a.start_soc) / b.efficiency;
    } else if (mode < 0.7) {
      a.discharge = u(rng) * (a.start_soc - lo);
    } else {
      a.charge = u(rng) * (hi - lo) / b.efficiency;
      a.discharge = u(rng) * (hi - lo);
    }
    const double end = a.start_soc + b.efficiency * a.charge - a.discharge;
    if (end < lo || end > hi) continue;
    if (std::isnan(oracle::walked_stage_cost(b, a.start_soc, a.charge, a.discharge))) continue;
    return a;
  }
}

}  // namespace

TEST(StageCost, ChargeWithinUpperSegment) { EXPECT_NEAR(cost::stage_cost(kEdcr, {3, 0, 5}), -3.0, 1e-12); }

TEST(StageCost, ChargeAcrossBreakpoint) { EXPECT_NEAR(cost::stage_cost(kEdcr, {6, 0, 2}), -9.0, 1e-12); }

TEST(StageCost, ZeroActionIsZero) {
  for (double e : {0.0, 2.5, 5.0, 7.0, 10.0}) EXPECT_NEAR(cost::stage_cost(kEdcr, {0, 0, e}), 0.0, 1e-12);
}

TEST(StageCost, OutOfRangeEndThrows) {
  try {
    cost::stage_cost(kEdcr, {6, 0, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(StageCostThreeCase, EndBelowStart) { EXPECT_NEAR(cost::stage_cost_threecase(kEdcr, {0, 3, 5}), 15.0, 1e-12); }

TEST(StageCostThreeCase, EndAboveStart) { EXPECT_NEAR(cost::stage_cost_threecase(kEdcr, {6, 0, 2}), -9.0, 1e-12); }

TEST(StageCostThreeCase, SameSegment) { EXPECT_NEAR(cost::stage_cost_threecase(kEdcr, {1, 0, 7}), -1.0, 1e-12); }

TEST(StageCost, MatchesWalkedOracleOnRandomEdcrBids) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 300; ++n) {
    const SocBid b = oracle::random_edcr_bid(rng, 1 + n % 4, 0.7 + 0.3 * u(rng), 10.0);
    const StageAction a = random_action(rng, b);
    const double ref = oracle::walked_stage_cost(b, a.start_soc, a.charge, a.discharge);
    EXPECT_NEAR(cost::stage_cost(b, a), ref, 1e-9);
    EXPECT_NEAR(cost::stage_cost_threecase(b, a), ref, 1e-9);
  }
}

TEST(Epigraph, MaxAlphaIsZero) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 20; ++n) {
    const SocBid b = oracle::random_edcr_bid(rng, 1 + n % 4, 0.7 + 0.3 * u(rng), 10.0);
    for (int i = 0; i < 1000; ++i) {
      const auto co = cost::epigraph_coeffs(b, 10.0 * u(rng));
      EXPECT_NEAR(*std::max_element(co.alpha.begin(), co.alpha.end()), 0.0, 1e-9);
    }
  }
}

TEST(Epigraph, StoredChargeValueIsStepIntegral) {
  const SocBid b{{0, 3, 7, 10}, {4, 3, 1.5}, {8, 6.5, 5}, 0.9};
  for (double e : {0.0, 1.0, 3.0, 5.5, 10.0}) {
    EXPECT_NEAR(cost::stored_charge_value(b, e), oracle::step_integral(b.breakpoints, b.charge_prices, 0, e) / 0.9,
                1e-12);
  }
}

TEST(StageCost, ContinuousAcrossBreakpoints) {
  std::mt19937_64 rng(3);
  const SocBid b = oracle::random_edcr_bid(rng, 4, 0.85, 10.0);
  const double h = 1e-7;
  const double lipschitz = b.discharge_prices.front() + b.charge_prices.front() / b.efficiency;
  for (std::size_t k = 1; k + 1 < b.breakpoints.size(); ++k) {
    const double e = b.breakpoints[k];
    for (const auto& [qc, qd] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}, std::pair{0.5, 0.5}}) {
      const double mid = cost::stage_cost(b, {qc, qd, e});
      EXPECT_LE(std::abs(cost::stage_cost(b, {qc, qd, e - h}) - mid), lipschitz * h + 1e-9);
      EXPECT_LE(std::abs(cost::stage_cost(b, {qc, qd, e + h}) - mid), lipschitz * h + 1e-9);
    }
  }
}

TEST(MultiStageCost, TwoChargesEqualSingleStage) {
  const std::vector<double> qc{3, 3};
  const std::vector<double> qd{0, 0};
  EXPECT_NEAR(cost::multi_stage_cost(kEdcr, qc, qd, 2.0), -9.0, 1e-12);
}

TEST(MultiStageCost, SingleIntervalEqualsStageCost) {
  const std::vector<double> qc{1.5};
  const std::vector<double> qd{4.0};
  EXPECT_NEAR(cost::multi_stage_cost(kEdcr, qc, qd, 6.0), cost::stage_cost(kEdcr, {1.5, 4.0, 6.0}), 1e-12);
}

TEST(MultiStageCost, ZeroDispatch) {
  const std::vector<double> z{0, 0, 0};
  EXPECT_EQ(cost::multi_stage_cost(kEdcr, z, z, 3.0), 0.0);
}

TEST(MultiStageCost, InfeasiblePathThrows) {
  const std::vector<double> qc{4, 4};
  const std::vector<double> qd{0, 0};
  try {
    cost::multi_stage_cost(kEdcr, qc, qd, 5.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasiblePath);
  }
}

TEST(MultiStageCost, EqualsSumOfStageCostsAlongPath) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const SocBid b = oracle::random_edcr_bid(rng, 1 + n % 4, 0.7 + 0.3 * u(rng), 10.0);
    const std::size_t T = 1 + n % 5;
    std::vector<double> qc(T), qd(T);
    double e = 10.0 * u(rng);
    const double s = e;
    for (std::size_t t = 0; t < T; ++t) {
      if (u(rng) < 0.5) {
        qc[t] = u(rng) * (10.0 - e) / b.efficiency;
        e += b.efficiency * qc[t];
      } else {
        qd[t] = u(rng) * e;
        e -= qd[t];
      }
    }
    const auto path = cost::soc_path(b, qc, qd, s);
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) sum += cost::stage_cost(b, {qc[t], qd[t], path[t]});
    EXPECT_NEAR(cost::multi_stage_cost(b, qc, qd, s), sum, 1e-9);
  }
}

TEST(MultiStageCost, MidpointConvex) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SocBid b = oracle::random_edcr_bid(rng, 4, 0.9, 10.0);
  const double s = 5.0;
  for (int n = 0; n < 500; ++n) {
    std::vector<double> a_c{u(rng) * 2, u(rng) * 2}, a_d{u(rng) * 2, u(rng) * 2};
    std::vector<double> b_c{u(rng) * 2, u(rng) * 2}, b_d{u(rng) * 2, u(rng) * 2};
    std::vector<double> m_c(2), m_d(2);
    for (int t = 0; t < 2; ++t) {
      m_c[t] = 0.5 * (a_c[t] + b_c[t]);
      m_d[t] = 0.5 * (a_d[t] + b_d[t]);
    }
    const double fa = cost::multi_stage_cost(b, a_c, a_d, s);
    const double fb = cost::multi_stage_cost(b, b_c, b_d, s);
    const double fm = cost::multi_stage_cost(b, m_c, m_d, s);
    EXPECT_GE(0.5 * (fa + fb) - fm, -1e-9);
  }
}

TEST(Subgradient, UniqueActivePiece) {
  const std::vector<double> qc{1};
  const std::vector<double> qd{0};
  const auto g = cost::cost_subgradient(kEdcr, qc, qd, 2.0, 0, cost::Side::Charge, 1.0);
  EXPECT_NEAR(g.lo, -2.0, 1e-12);
  EXPECT_NEAR(g.hi, -2.0, 1e-12);
}

TEST(Subgradient, TieAtBreakpoint) {
  const std::vector<double> qc{3};
  const std::vector<double> qd{0};
  const auto g = cost::cost_subgradient(kEdcr, qc, qd, 2.0, 0, cost::Side::Charge, 1.0);
  EXPECT_NEAR(g.lo, -2.0, 1e-12);
  EXPECT_NEAR(g.hi, -1.0, 1e-12);
}

TEST(Subgradient, DischargeSideUpperSegment) {
  const std::vector<double> qc{0};
  const std::vector<double> qd{1};
  const auto g = cost::cost_subgradient(kEdcr, qc, qd, 8.0, 0, cost::Side::Discharge, 1.0);
  EXPECT_NEAR(g.lo, 4.0, 1e-12);
  EXPECT_NEAR(g.hi, 4.0, 1e-12);
}

TEST(Subgradient, ScalesWithIntervalLength) {
  const std::vector<double> qc{1};
  const std::vector<double> qd{0};
  const auto g = cost::cost_subgradient(kEdcr, qc, qd, 2.0, 0, cost::Side::Charge, 0.25);
  EXPECT_NEAR(g.lo, -0.5, 1e-12);
}

TEST(ExactTrajectoryCost, TwoChargeSteps) {
  // 2 -> 5 in the lower segment, then 5 -> 8 in the upper one.
  const Trajectory t = two_step(0.5, {0, 0}, {0, 0}, {2, 5, 8});
  EXPECT_NEAR(cost::exact_trajectory_cost(kEdcr, 6.0, 0.0, t), -9.0, 1e-12);
}

TEST(ExactTrajectoryCost, OrderMattersForNonEdcrBid) {
  const Trajectory discharge_first = two_step(0.5, {2, 0}, {0, 2}, {5, 4, 5});
  const Trajectory charge_first = two_step(0.5, {0, 2}, {2, 0}, {5, 6, 5});
  EXPECT_NEAR(cost::exact_trajectory_cost(kNonEdcr, 0, 0, discharge_first), 4.0, 1e-12);
  EXPECT_NEAR(cost::exact_trajectory_cost(kNonEdcr, 0, 0, charge_first), 3.0, 1e-12);
}

TEST(ExactTrajectoryCost, OrderIrrelevantForEdcrBid) {
  const Trajectory discharge_first = two_step(0.5, {2, 0}, {0, 2}, {5, 4, 5});
  const Trajectory charge_first = two_step(0.5, {0, 2}, {2, 0}, {5, 6, 5});
  EXPECT_NEAR(cost::exact_trajectory_cost(kEdcr, 0, 0, discharge_first),
              cost::exact_trajectory_cost(kEdcr, 0, 0, charge_first), 1e-12);
}

TEST(ExactTrajectoryCost, ZeroMileageZeroPower) {
  EXPECT_EQ(cost::exact_trajectory_cost(kEdcr, 0, 0, two_step(0.5, {0, 0}, {0, 0}, {3, 3, 3})), 0.0);
}

TEST(ExactTrajectoryCost, RejectsInconsistentPath) {
  try {
    cost::exact_trajectory_cost(kEdcr, 0, 0, two_step(0.5, {2, 0}, {0, 2}, {5, 4.5, 5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentTrajectory);
  }
  EXPECT_THROW(cost::exact_trajectory_cost(kEdcr, 0, 0, two_step(0.5, {1, 0}, {1, 0}, {5, 5, 5})), Error);
}

TEST(Legs, MatchStepIntegrals) {
  const SocBid b{{0, 3, 7, 10}, {4, 3, 1.5}, {8, 6.5, 5}, 0.9};
  EXPECT_NEAR(cost::discharge_leg_cost(b, 8.0, 6.0), oracle::discharge_cost(b, 8.0, 6.0), 1e-12);
  EXPECT_NEAR(cost::charge_leg_benefit(b, 1.0, 7.0), oracle::charge_benefit(b, 1.0, 7.0), 1e-12);
}

TEST(SocPath, FollowsRecursion) {
  const std::vector<double> qc{2, 0};
  const std::vector<double> qd{0, 1};
  const SocBid b{{0, 10}, {1}, {5}, 0.8};
  const auto p = cost::soc_path(b, qc, qd, 1.0);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[1], 2.6, 1e-12);
  EXPECT_NEAR(p[2], 1.6, 1e-12);
}
