#include "socmarket/robust.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "socmarket/cost.hpp"
#include "socmarket/error.hpp"

namespace socmarket::cost {

namespace {

constexpr double kTotalTol = 1e-9;  // MWh, mileage totals after snapping

double snap(double x) { return std::abs(x) < kTotalTol ? 0.0 : x; }

struct Enumerator {
  const SocBid& bid;
  double lo;
  double hi;
  double p_charge;
  double p_discharge;
  double delta;
  double base_step;  // SoC change from base power over one sub-interval
  double total_up;
  double total_down;
  std::size_t steps;
  std::size_t levels;
  const std::function<void(const Trajectory&)>& visit;

  std::vector<double> up;    // MWh per sub-interval
  std::vector<double> down;  // MWh per sub-interval
  std::vector<double> soc;

  bool in_range(double e) const { return e >= lo - kSocTol && e <= hi + kSocTol; }

  std::vector<double> candidates(double remaining, double total, double current,
                                 bool upward) const {
    std::vector<double> out;
    if (remaining <= 0.0) return out;
    for (std::size_t k = 1; k < levels; ++k) {
      const double v = total * static_cast<double>(k) / static_cast<double>(levels - 1);
      if (v <= remaining + kTotalTol) out.push_back(std::min(v, remaining));
    }
    out.push_back(remaining);
    const double eta = bid.efficiency;
    for (double e : bid.breakpoints) {
      const double v = upward ? (current + base_step - e) : (e - current - base_step) / eta;
      if (v > kTotalTol && v <= remaining + kTotalTol) out.push_back(std::min(v, remaining));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              out.end());
    return out;
  }

  void emit() {
    Trajectory traj;
    traj.sub_interval_length = delta;
    traj.mileage_up.resize(steps);
    traj.mileage_down.resize(steps);
    for (std::size_t j = 0; j < steps; ++j) {
      traj.mileage_up[j] = up[j] / delta;
      traj.mileage_down[j] = down[j] / delta;
    }
    traj.fine_soc = soc;
    visit(traj);
  }

  void step(std::size_t j, double rem_up, double rem_down) {
    const double current = soc[j];
    const double eta = bid.efficiency;
    auto descend = [&](double a, double b) {
      const double next = current + base_step + eta * b - a;
      if (!in_range(next)) return;
      up[j] = a;
      down[j] = b;
      soc[j + 1] = next;
      if (j + 1 == steps) {
        emit();
      } else {
        step(j + 1, snap(rem_up - a), snap(rem_down - b));
      }
    };

    if (j + 1 == steps) {
      if (rem_up > 0.0 && rem_down > 0.0) return;
      descend(rem_up, rem_down);
      return;
    }
    descend(0.0, 0.0);
    for (double a : candidates(rem_up, total_up, current, true)) descend(a, 0.0);
    for (double b : candidates(rem_down, total_down, current, false)) descend(0.0, b);
  }
};

bool lexicographically_smaller(const Trajectory& a, const Trajectory& b) {
  if (a.mileage_up != b.mileage_up) return a.mileage_up < b.mileage_up;
  return a.mileage_down < b.mileage_down;
}

}  // namespace

void enumerate_trajectories(const StorageAsset& asset, double p_charge, double p_discharge,
                            double r_up, double r_down, double soc, const RobustOptions& opt,
                            const std::function<void(const Trajectory&)>& visit) {
  if (opt.sub_steps == 0) throw Error(ErrorCode::InvalidInput, "sub_steps must be at least 1");
  if (opt.grid_levels < 2) throw Error(ErrorCode::InvalidInput, "grid_levels must be at least 2");
  if (!(opt.tau > 0.0)) throw Error(ErrorCode::InvalidInput, "tau must be positive");
  for (double x : {p_charge, p_discharge, r_up, r_down}) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::InvalidInput, "dispatch quantities must be finite and nonnegative");
    }
  }
  const SocBid& bid = asset.bid;
  const double delta = opt.tau / static_cast<double>(opt.sub_steps);
  Enumerator en{bid,
                asset.soc_min,
                asset.soc_max,
                p_charge,
                p_discharge,
                delta,
                (bid.efficiency * p_charge - p_discharge) * delta,
                snap(opt.gamma_up * r_up * opt.tau),
                snap(opt.gamma_down * r_down * opt.tau),
                opt.sub_steps,
                opt.grid_levels,
                visit,
                std::vector<double>(opt.sub_steps, 0.0),
                std::vector<double>(opt.sub_steps, 0.0),
                std::vector<double>(opt.sub_steps + 1, soc)};
  if (!en.in_range(soc)) return;
  en.step(0, en.total_up, en.total_down);
}

RobustResult robust_stage_cost(const StorageAsset& asset, double p_charge, double p_discharge,
                               double r_up, double r_down, double soc, const RobustOptions& opt) {
  RobustResult result;
  bool found = false;
  enumerate_trajectories(asset, p_charge, p_discharge, r_up, r_down, soc, opt,
                         [&](const Trajectory& traj) {
                           const double c = exact_trajectory_cost(asset.bid, p_charge, p_discharge, traj);
                           ++result.trajectories;
                           if (!found) {
                             found = true;
                             result.cost = c;
                             result.best_cost = c;
                             result.worst = traj;
                             return;
                           }
                           result.best_cost = std::min(result.best_cost, c);
                           const double tie = 1e-12 * (1.0 + std::abs(result.cost));
                           if (c > result.cost + tie ||
                               (c >= result.cost - tie && lexicographically_smaller(traj, result.worst))) {
                             result.cost = std::max(result.cost, c);
                             result.worst = traj;
                           }
                         });
  if (!found) {
    throw Error(ErrorCode::NoFeasibleTrajectory,
                "no mileage sequence meets the regulation totals within the SoC bounds");
  }
  return result;
}

}  // namespace socmarket::cost
