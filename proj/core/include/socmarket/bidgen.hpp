#pragma once

// EDCR bid generation from a SoC-independent bid and sampled true marginal
// costs, by alternating a price fit (convex QP) and a breakpoint fit (1-D DP).

#include <cstddef>
#include <functional>
#include <vector>

#include "socmarket/cost.hpp"
#include "socmarket/model.hpp"

namespace socmarket::bidgen {

struct MarginalCostSample {
  double soc = 0.0;             // S_n, MWh
  double charge_benefit = 0.0;  // B^c_n, $/MWh
  double discharge_cost = 0.0;  // B^d_n, $/MWh
};

using MarginalCostSamples = std::vector<MarginalCostSample>;

/// Price bounds taken from the SoC-independent bid: charge_min <= c^c_k <=
/// c^d_k <= discharge_max.
struct PriceBounds {
  double charge_min = 0.0;
  double discharge_max = 0.0;
};

/// Linear lower bound a'(c^c, c^d) >= rhs added to the price fit.
struct PriceCut {
  std::vector<double> coeffs;  // 2K entries: charge prices then discharge prices
  double rhs = 0.0;
};

struct PriceFit {
  std::vector<double> charge_prices;
  std::vector<double> discharge_prices;
  double objective = 0.0;
  double stationarity = 0.0;
};

/// Mean squared error between the bid step function and the samples.
double fit_error(const SocBid& bid, const MarginalCostSamples& samples);

/// Best EDCR prices for fixed breakpoints. Throws InfeasibleConstraints when
/// the bounds are incompatible with EDCR and monotonicity.
PriceFit fit_price_step(const std::vector<double>& breakpoints, const MarginalCostSamples& samples,
                        const PriceBounds& bounds, double efficiency,
                        double spread_margin = kDefaultSpreadMargin,
                        const std::vector<PriceCut>& cuts = {});

/// Best breakpoints for fixed prices; interior breakpoints are midpoints
/// between consecutive distinct sorted sample SoCs, end points stay at
/// [soc_min, soc_max]. Ties pick the smallest cut positions.
std::vector<double> fit_breakpoint_step(const std::vector<double>& charge_prices,
                                        const std::vector<double>& discharge_prices,
                                        const MarginalCostSamples& samples, double soc_min,
                                        double soc_max, double efficiency);

/// Single-stage actions starting from {s, soc_min, soc_max} that end on a
/// breakpoint of the asset's bid and respect the power caps over one
/// interval of length tau. Zero actions are included.
std::vector<cost::StageAction> action_set(const StorageAsset& asset, double s, double tau);

/// True single-stage cost of a one-sided action under a reference bid.
double true_action_cost(const SocBid& true_bid, const cost::StageAction& a);

struct ConsC2Entry {
  cost::StageAction action;
  double bid_cost = 0.0;
  double true_cost = 0.0;
  double slack = 0.0;  // bid_cost - true_cost
};

struct BidGenOptions {
  std::size_t segments = 3;
  std::size_t max_iters = 20;
  double tol = 1e-8;
  double spread_margin = kDefaultSpreadMargin;
  double tau = 1.0;
  bool strict = false;  // add linear cuts for violated cost-dominance rows
  std::size_t strict_rounds = 20;
};

struct BidGenResult {
  SocBid bid;
  std::vector<double> objective_trace;
  std::vector<ConsC2Entry> cons_c2_report;
  std::size_t violations = 0;  // entries with slack < -1e-9
  std::size_t iterations = 0;
};

using TrueCostFn = std::function<double(const cost::StageAction&)>;

/// Alternates fit_price_step and fit_breakpoint_step from the best flat fit
/// until the error improves by less than opt.tol or max_iters is reached,
/// then reports cost-dominance slacks over action_set. max_iters = 0 returns
/// the best single-segment bid.
BidGenResult generate(const SocBid& flat_bid, const MarginalCostSamples& samples,
                      const StorageAsset& asset, const TrueCostFn& true_cost,
                      const BidGenOptions& opt = {});

/// Samples B^c, B^d of a reference bid at n evenly spaced SoC values.
MarginalCostSamples sample_bid(const SocBid& bid, std::size_t n);

}  // namespace socmarket::bidgen
