#pragma once

// Monte-Carlo dispatch experiments: one-shot (day-ahead) and rolling-window
// (real-time) clearing over noisy demand and solar scenarios.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "socmarket/bidgen.hpp"
#include "socmarket/clearing.hpp"
#include "socmarket/model.hpp"

namespace socmarket::sim {

/// Resources shared by every scenario. The solar unit, when present, is
/// appended after the conventional generators with its capacity drawn per
/// scenario and interval.
struct MarketTemplate {
  std::vector<Generator> generators;
  bool has_solar = false;
  Generator solar;
  StorageAsset storage;
  double interval_length = 1.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::size_t scenario_count = 100;
  std::vector<double> demand_profile;  // MW per interval of the day
  double demand_variance_ratio = 0.01;  // variance = ratio * mean
  std::vector<double> solar_profile;   // mean solar capacity, MW
  double solar_variance_ratio = 0.001;
  std::vector<double> regup_requirement;
  std::vector<double> regdown_requirement;
  double nu = 1.0;  // bid scale factor
  std::size_t horizon = 7;
  std::size_t windows = 21;
  std::size_t start_interval = 4;  // zero-based first interval of the one-shot run
  double initial_soc = 2.5;
  std::size_t sub_steps = 2;    // true-cost enumeration: sub-intervals per interval
  std::size_t grid_levels = 8;  // and mileage levels per sub-interval
};

struct Scenario {
  std::vector<double> demand;
  std::vector<double> solar;
};

/// Deterministic in (seed, scenario index): scenario k draws from its own
/// generator seeded with (seed, k). Draws are truncated at zero.
std::vector<Scenario> generate_scenarios(const ScenarioConfig& cfg);

struct ScenarioRow {
  std::size_t scenario = 0;
  bool feasible = true;
  std::string failure;
  double system_cost = 0.0;
  double throughput = 0.0;
  double payment = 0.0;
  double bid_in_profit = 0.0;
  double true_profit = 0.0;
  std::vector<double> soc;  // storage SoC path actually realized
};

struct RunMetrics {
  std::string label;
  double mean_system_cost = 0.0;
  double mean_throughput = 0.0;
  double mean_bid_in_profit = 0.0;
  double mean_true_profit = 0.0;
  std::size_t excluded = 0;
  std::size_t solves = 0;
  double max_primal_residual = 0.0;
  double max_dual_residual = 0.0;
  double max_duality_gap = 0.0;
  std::vector<ScenarioRow> rows;
};

/// Storage bid submitted to the market before scaling by nu.
struct BidVariant {
  std::string label;
  SocBid bid;
};

/// Builds the clearing instance for intervals [start, start + horizon) of a
/// scenario with the given storage bid and initial SoC.
MarketInstance make_instance(const MarketTemplate& market, const ScenarioConfig& cfg,
                             const Scenario& scenario, const SocBid& bid, std::size_t start,
                             std::size_t horizon, double initial_soc);

/// Clears each scenario once over cfg.horizon intervals from
/// cfg.start_interval and settles the storage against true_bid (both bids
/// scaled by nu).
RunMetrics run_one_shot(const MarketTemplate& market, const ScenarioConfig& cfg,
                        const std::vector<Scenario>& scenarios, const BidVariant& variant,
                        const SocBid& true_bid);

/// cfg.windows windows of cfg.horizon intervals; window w starts at
/// interval w, implements only its first interval and hands the resulting
/// SoC to window w + 1.
RunMetrics run_rolling(const MarketTemplate& market, const ScenarioConfig& cfg,
                       const std::vector<Scenario>& scenarios, const BidVariant& variant,
                       const SocBid& true_bid);

/// 19 conventional generators plus a zero-price solar unit, 10.5 MWh storage.
MarketTemplate mixed_fleet_template();
/// 31 generators priced 10, 15, ..., 160 $/MWh with 30 MW each, same storage.
MarketTemplate ladder_fleet_template();

struct DefaultFleets {
  MarketTemplate mixed;
  MarketTemplate ladder;
};

DefaultFleets default_fleets();

/// 24-interval synthetic profiles: two-peak demand, midday solar, and
/// alternating one-sided regulation requirements.
ScenarioConfig default_config();

/// Reference storage costs used by the experiments: a non-EDCR three-segment
/// staircase and the SoC-independent bid bracketing it.
SocBid default_true_bid();
SocBid default_flat_bid();

/// EDCR bid fitted to `sample_count` samples of true_bid, with price bounds
/// taken from flat_bid and cost dominance checked against true_bid.
bidgen::BidGenResult fit_edcr_bid(const StorageAsset& asset, const SocBid& flat_bid, const SocBid& true_bid,
                                  std::size_t sample_count = 64, const bidgen::BidGenOptions& opt = {});

}  // namespace socmarket::sim
