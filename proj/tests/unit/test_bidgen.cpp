#include <gtest/gtest.h>

#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "socmarket/bidgen.hpp"
#include "socmarket/cost.hpp"
#include "socmarket/error.hpp"

using namespace socmarket;
using bidgen::MarginalCostSample;
using bidgen::MarginalCostSamples;

namespace {

MarginalCostSamples samples_from(const SocBid& b, std::size_t n) {
  MarginalCostSamples out;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = b.soc_min() + (b.soc_max() - b.soc_min()) * (i + 0.5) / n;
    std::size_t k = 0;
    while (k + 1 < b.segments() && s >= b.breakpoints[k + 1]) ++k;
    out.push_back({s, b.charge_prices[k], b.discharge_prices[k]});
  }
  return out;
}

double sample_error(const std::vector<double>& e, const std::vector<double>& cc, const std::vector<double>& cd,
                    const MarginalCostSamples& s) {
  double sum = 0;
  for (const auto& x : s) {
    std::size_t k = 0;
    while (k + 1 < cc.size() && x.soc >= e[k + 1]) ++k;
    sum += (cc[k] - x.charge_benefit) * (cc[k] - x.charge_benefit) +
           (cd[k] - x.discharge_cost) * (cd[k] - x.discharge_cost);
  }
  return sum / s.size();
}

StorageAsset asset_for(const SocBid& b) { return fixtures::storage_for(b, 5, 0, b.soc_min()); }

}  // namespace

TEST(FitPriceStep, RecoversEdcrBid) {
  const SocBid b{{0, 5, 10}, {3, 2}, {6, 5}, 1.0};
  const auto s = samples_from(b, 40);
  const auto fit = bidgen::fit_price_step(b.breakpoints, s, {2, 6}, 1.0);
  EXPECT_NEAR(fit.charge_prices[0], 3, 1e-9);
  EXPECT_NEAR(fit.charge_prices[1], 2, 1e-9);
  EXPECT_NEAR(fit.discharge_prices[0], 6, 1e-9);
  EXPECT_NEAR(fit.discharge_prices[1], 5, 1e-9);
  EXPECT_NEAR(fit.objective, 0, 1e-12);
  EXPECT_LE(fit.stationarity, 1e-7);
}

TEST(FitPriceStep, ConstantSamplesGiveFlatBid) {
  MarginalCostSamples s;
  for (int i = 0; i < 10; ++i) s.push_back({i + 0.5, 1.5, 8});
  const auto fit = bidgen::fit_price_step({0, 4, 10}, s, {1.5, 8}, 0.9);
  for (double c : fit.charge_prices) EXPECT_NEAR(c, 1.5, 1e-9);
  for (double c : fit.discharge_prices) EXPECT_NEAR(c, 8, 1e-9);
}

TEST(FitPriceStep, IncompatibleBoundsInfeasible) {
  MarginalCostSamples s{{1, 5, 4}, {9, 5, 4}};
  try {
    bidgen::fit_price_step({0, 10}, s, {5, 4}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleConstraints);
  }
}

TEST(FitPriceStep, OutputSatisfiesConstraints) {
  const SocBid truth{{0, 3.5, 7, 10.5}, {4, 3, 1.5}, {8, 6.5, 5}, 0.9};
  const auto s = samples_from(truth, 64);
  const auto fit = bidgen::fit_price_step(truth.breakpoints, s, {1.5, 8}, 0.9);
  const SocBid out{truth.breakpoints, fit.charge_prices, fit.discharge_prices, 0.9};
  EXPECT_TRUE(is_edcr(out, 1e-8));
  EXPECT_TRUE(validate_bid(out, 0.0).ok());
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_GE(out.charge_prices[k], 1.5 - 1e-8);
    EXPECT_LE(out.charge_prices[k], out.discharge_prices[k] + 1e-8);
    EXPECT_LE(out.discharge_prices[k], 8 + 1e-8);
  }
  EXPECT_GT(fit.objective, 0);
  EXPECT_NEAR(fit.objective, sample_error(out.breakpoints, out.charge_prices, out.discharge_prices, s), 1e-9);
}

TEST(FitBreakpointStep, SharpStepFound) {
  MarginalCostSamples s;
  for (int i = 0; i < 20; ++i) {
    const double soc = 0.25 + 0.5 * i;
    s.push_back({soc, soc < 5 ? 3.0 : 2.0, soc < 5 ? 6.0 : 5.0});
  }
  const auto e = bidgen::fit_breakpoint_step({3, 2}, {6, 5}, s, 0, 10, 1.0);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_NEAR(e[1], 0.5 * (4.75 + 5.25), 1e-12);
}

TEST(FitBreakpointStep, MatchesExhaustiveCutSearch) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 30; ++n) {
    MarginalCostSamples s;
    for (int i = 0; i < 12; ++i) s.push_back({10 * u(rng), 1 + 3 * u(rng), 5 + 3 * u(rng)});
    const std::vector<double> cc{3.5, 2.5, 1.5};
    const std::vector<double> cd{7.5, 6.5, 5.5};
    const auto e = bidgen::fit_breakpoint_step(cc, cd, s, 0, 10, 1.0);
    const double got = sample_error(e, cc, cd, s);
    std::vector<double> socs;
    for (const auto& x : s) socs.push_back(x.soc);
    std::sort(socs.begin(), socs.end());
    std::vector<double> cand{0.0};
    for (std::size_t i = 0; i + 1 < socs.size(); ++i) cand.push_back(0.5 * (socs[i] + socs[i + 1]));
    cand.push_back(10.0);
    double best = 1e300;
    for (std::size_t a = 0; a < cand.size(); ++a) {
      for (std::size_t b = a; b < cand.size(); ++b) {
        best = std::min(best, sample_error({0, cand[a], cand[b], 10}, cc, cd, s));
      }
    }
    EXPECT_NEAR(got, best, 1e-12);
  }
}

TEST(FitBreakpointStep, SingleSegmentUnchanged) {
  MarginalCostSamples s{{1, 2, 5}, {2, 2, 5}};
  EXPECT_EQ(bidgen::fit_breakpoint_step({2}, {5}, s, 0, 10, 1.0), (std::vector<double>{0, 10}));
}

TEST(FitBreakpointStep, UniformSamplesPickSmallestCut) {
  MarginalCostSamples s;
  for (int i = 0; i < 6; ++i) s.push_back({i + 0.5, 2, 5});
  const auto e = bidgen::fit_breakpoint_step({2, 2}, {5, 5}, s, 0, 6, 1.0);
  EXPECT_EQ(e[1], 0.0);
}

TEST(ActionSet, StartAtLowerBoundDeduplicated) {
  const StorageAsset a = fixtures::storage_for(SocBid{{0, 5, 10}, {3, 2}, {6, 5}, 1.0}, 10, 0, 0);
  const auto acts = bidgen::action_set(a, 0, 1);
  std::set<double> starts;
  for (const auto& x : acts) starts.insert(x.start_soc);
  EXPECT_EQ(starts, (std::set<double>{0, 10}));
  // From 0: stay, to 5, to 10. From 10: to 0, to 5, stay.
  EXPECT_EQ(acts.size(), 6u);
}

TEST(ActionSet, OneSidedAndLandsOnBreakpoints) {
  const SocBid b{{0, 3, 7, 10}, {4, 3, 2}, {8, 7, 6}, 0.8};
  const StorageAsset a = fixtures::storage_for(b, 5, 0, 5);
  for (const auto& x : bidgen::action_set(a, 5, 1)) {
    EXPECT_TRUE(x.charge == 0 || x.discharge == 0);
    const double end = x.start_soc + 0.8 * x.charge - x.discharge;
    EXPECT_TRUE(std::any_of(b.breakpoints.begin(), b.breakpoints.end(),
                            [&](double e) { return std::abs(e - end) < 1e-12; }));
    EXPECT_LE(x.charge, 5 + 1e-12);
    EXPECT_LE(x.discharge, 5 + 1e-12);
  }
}

TEST(ActionSet, SingleSegmentFullRange) {
  const StorageAsset a = fixtures::storage_for(SocBid::flat(0, 10, 1, 5, 1.0), 20, 0, 0);
  const auto acts = bidgen::action_set(a, 0, 1);
  for (const auto& x : acts) EXPECT_TRUE(x.charge == 0 || std::abs(x.charge - 10) < 1e-12);
}

TEST(TrueActionCost, WalksTrueBid) {
  const SocBid truth{{0, 5, 10}, {2, 1}, {6, 4}, 1.0};
  EXPECT_NEAR(bidgen::true_action_cost(truth, {0, 2, 6}), oracle::discharge_cost(truth, 6, 2), 1e-12);
  EXPECT_NEAR(bidgen::true_action_cost(truth, {3, 0, 4}), -oracle::charge_benefit(truth, 4, 3), 1e-12);
}

TEST(Generate, RecoversShiftedEdcrBid) {
  const SocBid target{{0, 5, 10}, {3, 2}, {6, 5}, 1.0};
  const SocBid flat = SocBid::flat(0, 10, 2, 6, 1.0);
  const auto s = samples_from(target, 40);
  bidgen::BidGenOptions opt;
  opt.segments = 2;
  auto truth = [&](const cost::StageAction& a) { return bidgen::true_action_cost(target, a); };
  const auto r = bidgen::generate(flat, s, asset_for(flat), truth, opt);
  EXPECT_NEAR(r.objective_trace.back(), 0, 1e-12);
  EXPECT_NEAR(r.bid.breakpoints[1], 5, 0.26);
  EXPECT_NEAR(r.bid.charge_prices[0], 3, 1e-9);
  EXPECT_NEAR(r.bid.discharge_prices[1], 5, 1e-9);
  EXPECT_FALSE(r.cons_c2_report.empty());
  for (const auto& e : r.cons_c2_report) {
    EXPECT_NEAR(e.slack, e.bid_cost - e.true_cost, 1e-12);
    EXPECT_NEAR(e.bid_cost, cost::stage_cost(r.bid, e.action), 1e-12);
  }
}

TEST(Generate, ZeroIterationsReturnsFlatFit) {
  const SocBid truth{{0, 3.5, 7, 10.5}, {4, 3, 1.5}, {8, 6.5, 5}, 0.9};
  const SocBid flat = SocBid::flat(0, 10.5, 1.5, 8, 0.9);
  bidgen::BidGenOptions opt;
  opt.max_iters = 0;
  auto tc = [&](const cost::StageAction& a) { return bidgen::true_action_cost(truth, a); };
  const auto r = bidgen::generate(flat, samples_from(truth, 30), asset_for(flat), tc, opt);
  EXPECT_EQ(r.bid.segments(), 1u);
  EXPECT_EQ(r.objective_trace.size(), 1u);
  EXPECT_NEAR(r.bid.charge_prices[0], (4 + 3 + 1.5) / 3.0, 0.2);
}

TEST(Generate, InvertedBoundsInfeasible) {
  // Spread condition c^c / eta <= c^d cannot hold inside these bounds.
  const SocBid flat{{0, 10}, {5}, {6}, 0.5};
  MarginalCostSamples s{{1, 5, 6}, {5, 5, 6}, {9, 5, 6}};
  auto tc = [](const cost::StageAction&) { return 0.0; };
  try {
    bidgen::BidGenOptions opt;
    opt.segments = 2;
    bidgen::generate(flat, s, asset_for(flat), tc, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleConstraints);
  }
}

TEST(Generate, TraceNonincreasingAndBidFeasible) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 15; ++n) {
    MarginalCostSamples s;
    for (int i = 0; i < 30; ++i) {
      const double soc = 10 * u(rng);
      s.push_back({soc, 2 + 2 * (1 - soc / 10) + u(rng), 6 + 2 * (1 - soc / 10) + u(rng)});
    }
    const SocBid flat = SocBid::flat(0, 10, 2, 9, 0.9);
    auto tc = [](const cost::StageAction&) { return 0.0; };
    bidgen::BidGenOptions opt;
    opt.segments = 1 + n % 4;
    const auto r = bidgen::generate(flat, s, asset_for(flat), tc, opt);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-12);
    }
    EXPECT_TRUE(is_edcr(r.bid, 1e-8));
    EXPECT_NEAR(r.objective_trace.back(), sample_error(r.bid.breakpoints, r.bid.charge_prices,
                                                       r.bid.discharge_prices, s), 1e-9);
  }
}

TEST(Generate, StrictModeRemovesViolations) {
  const SocBid truth{{0, 3.5, 7, 10.5}, {4, 3, 1.5}, {8, 6.5, 5}, 0.9};
  const SocBid flat = SocBid::flat(0, 10.5, 1.5, 8, 0.9);
  StorageAsset a = fixtures::storage_for(flat, 5, 0, 2.5);
  auto tc = [&](const cost::StageAction& x) { return bidgen::true_action_cost(truth, x); };
  bidgen::BidGenOptions opt;
  const auto relaxed = bidgen::generate(flat, samples_from(truth, 64), a, tc, opt);
  opt.strict = true;
  const auto strict = bidgen::generate(flat, samples_from(truth, 64), a, tc, opt);
  EXPECT_LE(strict.violations, relaxed.violations);
  EXPECT_TRUE(is_edcr(strict.bid, 1e-8));
}

TEST(SampleBid, CellMidpoints) {
  const auto s = bidgen::sample_bid(SocBid{{0, 5, 10}, {3, 2}, {6, 5}, 1.0}, 4);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(s[0].soc, 1.25, 1e-12);
  EXPECT_EQ(s[0].charge_benefit, 3);
  EXPECT_EQ(s[3].discharge_cost, 5);
}
