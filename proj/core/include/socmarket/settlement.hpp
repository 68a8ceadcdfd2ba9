#pragma once

// Storage payment and profit from a cleared instance.

#include <cstddef>
#include <vector>

#include "socmarket/clearing.hpp"
#include "socmarket/model.hpp"
#include "socmarket/robust.hpp"

namespace socmarket {

struct ProfitReport {
  double payment = 0.0;
  double bid_in_cost = 0.0;
  double bid_in_profit = 0.0;
  double true_cost = 0.0;
  double true_profit = 0.0;
  double throughput = 0.0;
};

/// sum_t [ pi_t (p^d_t - p^c_t) + beta^u_t r^u_t + beta^d_t r^d_t ] at the
/// storage's bus. Prices are per interval, so no tau factor appears.
double payment(const MarketInstance& inst, const DispatchSolution& sol, const PriceSolution& prices,
               std::size_t storage);

/// Convexified multi-interval cost of the cleared energies under the
/// submitted bid.
double bid_in_cost(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage);

/// Worst-case cost of the cleared schedule under `true_bid`, summed over
/// intervals; each interval starts from the cleared SoC.
double true_cost(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage,
                 const SocBid& true_bid, std::size_t sub_steps = 2, std::size_t grid_levels = 8);

/// Cost of the cleared schedule when the realized intra-interval mileage is
/// known (one trajectory per interval).
double realized_cost(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage,
                     const SocBid& true_bid, const std::vector<Trajectory>& realized);

/// Energy moved (MWh) plus regulation capacity cleared (MW), over the horizon.
double throughput(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage);

ProfitReport settle(const MarketInstance& inst, const DispatchSolution& sol, const PriceSolution& prices,
                    std::size_t storage, const SocBid& true_bid, std::size_t sub_steps = 2,
                    std::size_t grid_levels = 8);

}  // namespace socmarket
