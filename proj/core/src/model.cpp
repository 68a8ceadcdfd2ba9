#include "socmarket/model.hpp"

#include <cmath>
#include <sstream>

#include "socmarket/error.hpp"

namespace socmarket {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

BidValidation fail(BidViolation v, const std::string& msg) { return {v, msg}; }

double per_interval(const std::vector<double>& v, std::size_t t, const char* name) {
  if (v.empty()) throw Error(ErrorCode::InvalidInput, std::string(name) + " is empty");
  if (v.size() == 1) return v.front();
  if (t >= v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " has no entry for interval " + std::to_string(t));
  }
  return v[t];
}

}  // namespace

SocBid SocBid::flat(double soc_min, double soc_max, double charge_price,
                    double discharge_price, double efficiency) {
  return SocBid{{soc_min, soc_max}, {charge_price}, {discharge_price}, efficiency};
}

SocBid SocBid::scaled(double factor) const {
  SocBid out = *this;
  for (double& c : out.charge_prices) c *= factor;
  for (double& c : out.discharge_prices) c *= factor;
  return out;
}

BidValidation validate_bid(const SocBid& bid, double spread_margin) {
  const std::size_t k = bid.segments();
  if (k == 0) return fail(BidViolation::Malformed, "bid has no segments");
  if (bid.discharge_prices.size() != k) {
    return fail(BidViolation::Malformed, "charge and discharge price vectors differ in length");
  }
  if (bid.breakpoints.size() != k + 1) {
    return fail(BidViolation::Breakpoint, "expected K+1 breakpoints");
  }
  if (!all_finite(bid.charge_prices) || !all_finite(bid.discharge_prices)) {
    return fail(BidViolation::Malformed, "prices must be finite");
  }
  if (!all_finite(bid.breakpoints)) {
    return fail(BidViolation::Breakpoint, "breakpoints must be finite");
  }
  if (!(bid.efficiency > 0.0 && bid.efficiency <= 1.0)) {
    return fail(BidViolation::Malformed, "efficiency must lie in (0, 1]");
  }
  for (std::size_t i = 0; i + 1 < bid.breakpoints.size(); ++i) {
    if (bid.breakpoints[i] > bid.breakpoints[i + 1]) {
      std::ostringstream os;
      os << "breakpoint " << i + 1 << " exceeds breakpoint " << i + 2;
      return fail(BidViolation::Breakpoint, os.str());
    }
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (bid.charge_prices[i] < bid.charge_prices[i + 1]) {
      return fail(BidViolation::Monotonicity,
                  "charge price increases at segment " + std::to_string(i + 2));
    }
    if (bid.discharge_prices[i] < bid.discharge_prices[i + 1]) {
      return fail(BidViolation::Monotonicity,
                  "discharge price increases at segment " + std::to_string(i + 2));
    }
  }
  if (!(bid.charge_prices.front() / bid.efficiency + spread_margin <= bid.discharge_prices.back())) {
    return fail(BidViolation::Spread, "c^c_1 / eta must be strictly below c^d_K");
  }
  return {};
}

void require_valid_bid(const SocBid& bid, double spread_margin) {
  const BidValidation v = validate_bid(bid, spread_margin);
  switch (v.violation) {
    case BidViolation::None: return;
    case BidViolation::Malformed: throw Error(ErrorCode::InvalidInput, v.message);
    case BidViolation::Monotonicity: throw Error(ErrorCode::MonotonicityViolation, v.message);
    case BidViolation::Spread: throw Error(ErrorCode::SpreadViolation, v.message);
    case BidViolation::Breakpoint: throw Error(ErrorCode::BreakpointViolation, v.message);
  }
}

bool is_edcr(const SocBid& bid, double tol) {
  const auto& cc = bid.charge_prices;
  const auto& cd = bid.discharge_prices;
  for (std::size_t k = 0; k + 1 < bid.segments(); ++k) {
    const double gap = (cc[k] - cc[k + 1]) - bid.efficiency * (cd[k] - cd[k + 1]);
    if (std::abs(gap) > tol) return false;
  }
  return true;
}

std::size_t segment_index(const SocBid& bid, double soc, double tol) {
  const auto& e = bid.breakpoints;
  if (soc < e.front() - tol || soc > e.back() + tol || !std::isfinite(soc)) {
    std::ostringstream os;
    os << "SoC " << soc << " outside [" << e.front() << ", " << e.back() << "]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  const std::size_t k = bid.segments();
  std::size_t last_nonempty = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (e[i + 1] <= e[i]) continue;
    last_nonempty = i;
    if (soc < e[i + 1]) return i;
  }
  return last_nonempty;
}

double StorageAsset::gamma_up(std::size_t t) const {
  return per_interval(dispatch_fraction_up, t, "dispatch_fraction_up");
}

double StorageAsset::gamma_down(std::size_t t) const {
  return per_interval(dispatch_fraction_down, t, "dispatch_fraction_down");
}

void validate_asset(const StorageAsset& asset, std::size_t horizon) {
  require_valid_bid(asset.bid);
  if (!(asset.soc_min <= asset.soc_max)) {
    throw Error(ErrorCode::InvalidInput, "soc_min exceeds soc_max");
  }
  if (asset.initial_soc < asset.soc_min - kSocTol || asset.initial_soc > asset.soc_max + kSocTol) {
    throw Error(ErrorCode::OutOfRange, "initial_soc outside [soc_min, soc_max]");
  }
  for (double cap : {asset.charge_cap, asset.discharge_cap, asset.regdown_cap, asset.regup_cap}) {
    if (!(cap >= 0.0) || !std::isfinite(cap)) {
      throw Error(ErrorCode::InvalidInput, "storage capacities must be finite and nonnegative");
    }
  }
  if (std::abs(asset.bid.soc_min() - asset.soc_min) > kSocTol ||
      std::abs(asset.bid.soc_max() - asset.soc_max) > kSocTol) {
    throw Error(ErrorCode::BreakpointViolation, "bid breakpoints must span [soc_min, soc_max]");
  }
  for (const auto* fractions : {&asset.dispatch_fraction_up, &asset.dispatch_fraction_down}) {
    if (fractions->empty()) throw Error(ErrorCode::InvalidInput, "dispatch fractions are empty");
    for (double g : *fractions) {
      if (!(g >= 0.0 && g <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "dispatch fractions must lie in [0, 1]");
      }
    }
    if (horizon > 0 && fractions->size() != 1 && fractions->size() < horizon) {
      throw Error(ErrorCode::DimensionMismatch, "dispatch fractions shorter than the horizon");
    }
  }
}

void validate_generator(const Generator& gen) {
  for (double p : {gen.energy_price, gen.regup_price, gen.regdown_price}) {
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidInput, "generator prices must be finite");
  }
  if (!(gen.output_min <= gen.output_max)) {
    throw Error(ErrorCode::InvalidInput, "generator output_min exceeds output_max");
  }
  for (const auto& cap : {gen.regup_capacity_max, gen.regdown_capacity_max}) {
    if (cap && !(*cap >= 0.0)) {
      throw Error(ErrorCode::InvalidInput, "generator regulation caps must be nonnegative");
    }
  }
  for (double cap : gen.output_max_profile) {
    if (!(gen.output_min <= cap) || !std::isfinite(cap)) {
      throw Error(ErrorCode::InvalidInput, "generator output profile below output_min");
    }
  }
}

void validate_network(const Network& net) {
  if (net.bus_count == 0) throw Error(ErrorCode::InvalidInput, "network has no buses");
  if (net.shift_factors.size() != net.line_limits.size()) {
    throw Error(ErrorCode::DimensionMismatch, "shift factor rows must match line limits");
  }
  for (const auto& row : net.shift_factors) {
    if (row.size() != net.bus_count) {
      throw Error(ErrorCode::DimensionMismatch, "shift factor row length must equal bus_count");
    }
  }
}

void validate_instance(const MarketInstance& inst) {
  if (inst.horizon == 0) throw Error(ErrorCode::InvalidInput, "horizon must be at least 1");
  if (!(inst.interval_length > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "interval_length must be positive");
  }
  validate_network(inst.network);
  const std::size_t t_count = inst.horizon;
  if (inst.demand.size() != t_count) {
    throw Error(ErrorCode::DimensionMismatch, "demand must have one row per interval");
  }
  for (const auto& row : inst.demand) {
    if (row.size() != inst.network.bus_count) {
      throw Error(ErrorCode::DimensionMismatch, "demand row length must equal bus_count");
    }
  }
  if (inst.regup_requirement.size() != t_count || inst.regdown_requirement.size() != t_count) {
    throw Error(ErrorCode::DimensionMismatch, "regulation requirements must cover the horizon");
  }
  for (std::size_t t = 0; t < t_count; ++t) {
    if (!(inst.regup_requirement[t] >= 0.0) || !(inst.regdown_requirement[t] >= 0.0)) {
      throw Error(ErrorCode::InvalidInput, "regulation requirements must be nonnegative");
    }
  }
  for (const auto& g : inst.generators) {
    validate_generator(g);
    if (!g.output_max_profile.empty() && g.output_max_profile.size() != t_count) {
      throw Error(ErrorCode::DimensionMismatch, "generator output profile must cover the horizon");
    }
    if (g.bus >= inst.network.bus_count) {
      throw Error(ErrorCode::DimensionMismatch, "generator bus index out of range");
    }
  }
  for (const auto& s : inst.storages) {
    validate_asset(s, t_count);
    if (s.bus >= inst.network.bus_count) {
      throw Error(ErrorCode::DimensionMismatch, "storage bus index out of range");
    }
  }
}

}  // namespace socmarket
