#pragma once

// Worst-case intra-interval cost of cleared regulation capacity, by exhaustive
// enumeration of discretized mileage sequences.

#include <cstddef>
#include <functional>

#include "socmarket/model.hpp"

namespace socmarket::cost {

struct RobustOptions {
  double tau = 1.0;
  double gamma_up = 1.0;
  double gamma_down = 1.0;
  std::size_t sub_steps = 2;    // J
  std::size_t grid_levels = 8;  // uniform mileage levels per sub-interval, including zero
};

struct RobustResult {
  double cost = 0.0;       // worst case
  double best_cost = 0.0;  // cheapest enumerated trajectory
  Trajectory worst;
  std::size_t trajectories = 0;
};

/// Calls `visit` for every one-sided mileage sequence on the grid (uniform
/// levels of the remaining totals plus levels that land exactly on a
/// breakpoint) whose fine SoC stays within [soc_min, soc_max] and whose
/// totals match gamma r tau. Visit order is deterministic.
void enumerate_trajectories(const StorageAsset& asset, double p_charge, double p_discharge,
                            double r_up, double r_down, double soc, const RobustOptions& opt,
                            const std::function<void(const Trajectory&)>& visit);

/// Maximum of exact_trajectory_cost over enumerate_trajectories. Ties keep
/// the lexicographically smallest (mileage_up, mileage_down) vector.
/// Throws NoFeasibleTrajectory when nothing is enumerated.
RobustResult robust_stage_cost(const StorageAsset& asset, double p_charge, double p_discharge,
                               double r_up, double r_down, double soc, const RobustOptions& opt);

}  // namespace socmarket::cost
