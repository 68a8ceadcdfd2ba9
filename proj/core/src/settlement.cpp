#include "socmarket/settlement.hpp"

#include "socmarket/cost.hpp"
#include "socmarket/error.hpp"

namespace socmarket {

namespace {

void check_storage(const MarketInstance& inst, const DispatchSolution& sol, std::size_t i) {
  if (i >= inst.storages.size() || i >= sol.charge.size()) {
    throw Error(ErrorCode::OutOfRange, "storage index beyond the instance");
  }
  if (sol.charge[i].size() != inst.horizon || sol.soc[i].size() != inst.horizon + 1) {
    throw Error(ErrorCode::DimensionMismatch, "dispatch does not cover the horizon");
  }
}

StorageAsset with_bid(const StorageAsset& asset, const SocBid& bid) {
  StorageAsset a = asset;
  a.bid = bid;
  return a;
}

}  // namespace

double payment(const MarketInstance& inst, const DispatchSolution& sol, const PriceSolution& prices,
               std::size_t storage) {
  check_storage(inst, sol, storage);
  const std::size_t bus = inst.storages[storage].bus;
  double total = 0.0;
  for (std::size_t t = 0; t < inst.horizon; ++t) {
    total += prices.lmp[t][bus] * (sol.discharge[storage][t] - sol.charge[storage][t]) +
             prices.regup_price[t] * sol.regup[storage][t] +
             prices.regdown_price[t] * sol.regdown[storage][t];
  }
  return total;
}

double bid_in_cost(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage) {
  check_storage(inst, sol, storage);
  const StorageAsset& a = inst.storages[storage];
  return cost::multi_stage_cost(a.bid, sol.charge_energy[storage], sol.discharge_energy[storage],
                                a.initial_soc);
}

double true_cost(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage,
                 const SocBid& true_bid, std::size_t sub_steps, std::size_t grid_levels) {
  check_storage(inst, sol, storage);
  const StorageAsset asset = with_bid(inst.storages[storage], true_bid);
  validate_asset(asset, inst.horizon);
  double total = 0.0;
  for (std::size_t t = 0; t < inst.horizon; ++t) {
    cost::RobustOptions opt;
    opt.tau = inst.interval_length;
    opt.gamma_up = asset.gamma_up(t);
    opt.gamma_down = asset.gamma_down(t);
    opt.sub_steps = sub_steps;
    opt.grid_levels = grid_levels;
    total += cost::robust_stage_cost(asset, sol.charge[storage][t], sol.discharge[storage][t],
                                     sol.regup[storage][t], sol.regdown[storage][t],
                                     sol.soc[storage][t], opt)
                 .cost;
  }
  return total;
}

double realized_cost(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage,
                     const SocBid& true_bid, const std::vector<Trajectory>& realized) {
  check_storage(inst, sol, storage);
  if (realized.size() != inst.horizon) {
    throw Error(ErrorCode::DimensionMismatch, "one realized trajectory per interval is required");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < inst.horizon; ++t) {
    total += cost::exact_trajectory_cost(true_bid, sol.charge[storage][t], sol.discharge[storage][t],
                                         realized[t]);
  }
  return total;
}

double throughput(const MarketInstance& inst, const DispatchSolution& sol, std::size_t storage) {
  check_storage(inst, sol, storage);
  double total = 0.0;
  for (std::size_t t = 0; t < inst.horizon; ++t) {
    total += (sol.charge[storage][t] + sol.discharge[storage][t]) * inst.interval_length +
             sol.regup[storage][t] + sol.regdown[storage][t];
  }
  return total;
}

ProfitReport settle(const MarketInstance& inst, const DispatchSolution& sol, const PriceSolution& prices,
                    std::size_t storage, const SocBid& true_bid, std::size_t sub_steps,
                    std::size_t grid_levels) {
  ProfitReport r;
  r.payment = payment(inst, sol, prices, storage);
  r.bid_in_cost = bid_in_cost(inst, sol, storage);
  r.bid_in_profit = r.payment - r.bid_in_cost;
  r.true_cost = true_cost(inst, sol, storage, true_bid, sub_steps, grid_levels);
  r.true_profit = r.payment - r.true_cost;
  r.throughput = throughput(inst, sol, storage);
  return r;
}

}  // namespace socmarket
