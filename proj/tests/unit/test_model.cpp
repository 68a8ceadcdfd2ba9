#include <gtest/gtest.h>

#include "socmarket/error.hpp"
#include "socmarket/model.hpp"

using namespace socmarket;

namespace {

SocBid bid(std::vector<double> e, std::vector<double> cc, std::vector<double> cd, double eta) {
  return SocBid{std::move(e), std::move(cc), std::move(cd), eta};
}

}  // namespace

TEST(ValidateBid, AcceptsMonotoneBid) {
  EXPECT_TRUE(validate_bid(bid({0, 5, 10}, {2, 1}, {5, 4}, 1.0)).ok());
}

TEST(ValidateBid, RejectsIncreasingChargePrices) {
  EXPECT_EQ(validate_bid(bid({0, 5, 10}, {1, 2}, {5, 4}, 1.0)).violation, BidViolation::Monotonicity);
}

TEST(ValidateBid, RejectsIncreasingDischargePrices) {
  EXPECT_EQ(validate_bid(bid({0, 5, 10}, {2, 1}, {4, 5}, 1.0)).violation, BidViolation::Monotonicity);
}

TEST(ValidateBid, RejectsNegativeSpread) {
  EXPECT_EQ(validate_bid(bid({0, 10}, {4}, {3}, 1.0)).violation, BidViolation::Spread);
}

TEST(ValidateBid, SpreadUsesEfficiency) {
  // 2.7 / 0.9 = 3 is not strictly below 3.
  EXPECT_EQ(validate_bid(bid({0, 10}, {2.7}, {3}, 0.9)).violation, BidViolation::Spread);
  EXPECT_TRUE(validate_bid(bid({0, 10}, {2.6}, {3}, 0.9)).ok());
}

TEST(ValidateBid, RejectsUnorderedBreakpoints) {
  EXPECT_EQ(validate_bid(bid({0, 6, 5, 10}, {3, 2, 1}, {6, 5, 4}, 1.0)).violation, BidViolation::Breakpoint);
}

TEST(ValidateBid, RejectsShapeMismatch) {
  EXPECT_FALSE(validate_bid(bid({0, 5, 10}, {2}, {5, 4}, 1.0)).ok());
  EXPECT_FALSE(validate_bid(bid({0, 10}, {2}, {5}, 1.5)).ok());
  EXPECT_FALSE(validate_bid(bid({0, 10}, {}, {}, 1.0)).ok());
}

TEST(ValidateBid, RequireThrowsTypedError) {
  try {
    require_valid_bid(bid({0, 10}, {4}, {3}, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpreadViolation);
  }
}

TEST(IsEdcr, DifferenceForm) {
  EXPECT_TRUE(is_edcr(bid({0, 5, 10}, {2, 1}, {5, 4}, 1.0)));
  EXPECT_FALSE(is_edcr(bid({0, 5, 10}, {2, 1}, {6, 4}, 1.0)));
  EXPECT_TRUE(is_edcr(bid({0, 5, 10}, {2, 1.1}, {6, 5}, 0.9)));
}

TEST(IsEdcr, SingleSegmentAlwaysEdcr) { EXPECT_TRUE(is_edcr(SocBid::flat(0, 10, 1, 5, 0.8))); }

TEST(IsEdcr, FlatRegionAllowed) { EXPECT_TRUE(is_edcr(bid({0, 5, 10}, {2, 2}, {5, 5}, 0.9))); }

TEST(IsEdcr, ToleranceApplies) {
  const SocBid b = bid({0, 5, 10}, {2, 1}, {5, 4 + 1e-6}, 1.0);
  EXPECT_FALSE(is_edcr(b));
  EXPECT_TRUE(is_edcr(b, 1e-5));
}

TEST(SegmentIndex, HalfOpenSegments) {
  const SocBid b = bid({0, 5, 10}, {2, 1}, {5, 4}, 1.0);
  EXPECT_EQ(segment_index(b, 0.0), 0u);
  EXPECT_EQ(segment_index(b, 4.999), 0u);
  EXPECT_EQ(segment_index(b, 5.0), 1u);
  EXPECT_EQ(segment_index(b, 10.0), 1u);
  EXPECT_THROW(segment_index(b, 10.1), Error);
}

TEST(SegmentIndex, SkipsZeroWidthSegments) {
  const SocBid b = bid({0, 5, 5, 10}, {3, 2, 1}, {6, 5, 4}, 1.0);
  EXPECT_EQ(segment_index(b, 5.0), 2u);
  const SocBid top = bid({0, 10, 10}, {2, 1}, {5, 4}, 1.0);
  EXPECT_EQ(segment_index(top, 10.0), 0u);
}

TEST(SocBidOps, FlatAndScaled) {
  const SocBid f = SocBid::flat(0, 10.5, 1.5, 8, 0.9);
  EXPECT_EQ(f.segments(), 1u);
  const SocBid s = f.scaled(2.0);
  EXPECT_DOUBLE_EQ(s.charge_prices[0], 3.0);
  EXPECT_DOUBLE_EQ(s.discharge_prices[0], 16.0);
  EXPECT_EQ(s.breakpoints, f.breakpoints);
}

TEST(ValidateInstance, DetectsDimensionMismatch) {
  MarketInstance inst;
  inst.horizon = 2;
  inst.demand = {{10.0}};
  inst.regup_requirement = {0, 0};
  inst.regdown_requirement = {0, 0};
  try {
    validate_instance(inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(ValidateInstance, RejectsShortOutputProfile) {
  MarketInstance inst;
  inst.horizon = 2;
  inst.demand = {{10.0}, {10.0}};
  inst.regup_requirement = {0, 0};
  inst.regdown_requirement = {0, 0};
  Generator g;
  g.energy_price = 1;
  g.output_max = 50;
  g.output_max_profile = {50};
  inst.generators.push_back(g);
  EXPECT_THROW(validate_instance(inst), Error);
  inst.generators[0].output_max_profile = {50, 40};
  EXPECT_NO_THROW(validate_instance(inst));
}

TEST(ValidateAsset, InitialSocMustBeInRange) {
  StorageAsset s;
  s.bid = SocBid::flat(0, 10, 1, 5, 1.0);
  s.soc_min = 0;
  s.soc_max = 10;
  s.initial_soc = 11;
  EXPECT_THROW(validate_asset(s), Error);
  s.initial_soc = 5;
  EXPECT_NO_THROW(validate_asset(s));
}

TEST(ValidateGenerator, OutputOrder) {
  Generator g;
  g.output_min = 5;
  g.output_max = 4;
  EXPECT_THROW(validate_generator(g), Error);
}

TEST(ValidateNetwork, RowCountMatchesLimits) {
  Network n;
  n.bus_count = 2;
  n.shift_factors = {{0, 1}, {0, -1}};
  n.line_limits = {10};
  EXPECT_THROW(validate_network(n), Error);
  n.line_limits = {10, 10};
  EXPECT_NO_THROW(validate_network(n));
}
