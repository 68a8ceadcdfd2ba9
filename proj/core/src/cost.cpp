#include "socmarket/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "socmarket/error.hpp"

namespace socmarket::cost {

namespace {

constexpr double kRecursionTol = 1e-8;

// Linear piece g_j(soc) of the cumulative charge value; h(soc) picks the piece
// of the segment holding soc and equals min_j g_j(soc).
double charge_value_piece(const SocBid& bid, std::size_t j, double soc) {
  const auto& e = bid.breakpoints;
  const auto& cc = bid.charge_prices;
  double v = cc[j] * (soc - e[0]);
  for (std::size_t k = 0; k < j; ++k) v += (cc[k] - cc[k + 1]) * (e[k + 1] - e[0]);
  return v / bid.efficiency;
}

void check_energy(double q, const char* what) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " must be finite and nonnegative");
  }
}

std::size_t segment_or_throw(const SocBid& bid, double soc, ErrorCode code, const char* what) {
  try {
    return segment_index(bid, soc);
  } catch (const Error& err) {
    throw Error(code, std::string(what) + ": " + err.what());
  }
}

}  // namespace

double end_soc(const SocBid& bid, const StageAction& a) noexcept {
  return a.start_soc + bid.efficiency * a.charge - a.discharge;
}

double stored_charge_value(const SocBid& bid, double soc) {
  return charge_value_piece(bid, segment_index(bid, soc), soc);
}

EpigraphCoeffs epigraph_coeffs(const SocBid& bid, double soc) {
  EpigraphCoeffs out;
  out.h_value = stored_charge_value(bid, soc);
  const std::size_t k = bid.segments();
  out.alpha.resize(k);
  for (std::size_t j = 0; j < k; ++j) out.alpha[j] = out.h_value - charge_value_piece(bid, j, soc);
  out.charge_slopes = bid.charge_prices;
  out.discharge_slopes = bid.discharge_prices;
  return out;
}

double discharge_leg_cost(const SocBid& bid, double from, double energy) {
  const auto& e = bid.breakpoints;
  const auto& cd = bid.discharge_prices;
  const std::size_t m = segment_index(bid, from);
  const std::size_t n = segment_index(bid, from - energy);
  double cost = cd[n] * energy;
  for (std::size_t k = n + 1; k <= m; ++k) cost += (cd[k - 1] - cd[k]) * (e[k] - from);
  return cost;
}

double charge_leg_benefit(const SocBid& bid, double from, double energy) {
  const auto& e = bid.breakpoints;
  const auto& cc = bid.charge_prices;
  const double eta = bid.efficiency;
  const std::size_t m = segment_index(bid, from);
  const std::size_t n = segment_index(bid, from + eta * energy);
  double benefit = cc[n] * energy;
  for (std::size_t k = m; k < n; ++k) benefit += (cc[k] - cc[k + 1]) / eta * (e[k + 1] - from);
  return benefit;
}

double exact_trajectory_cost(const SocBid& bid, double base_charge, double base_discharge,
                             const Trajectory& traj) {
  const std::size_t j_count = traj.sub_count();
  if (traj.mileage_down.size() != j_count || traj.fine_soc.size() != j_count + 1) {
    throw Error(ErrorCode::InconsistentTrajectory, "mileage and SoC vector lengths disagree");
  }
  if (!(traj.sub_interval_length > 0.0)) {
    throw Error(ErrorCode::InconsistentTrajectory, "sub_interval_length must be positive");
  }
  check_energy(base_charge, "base charge");
  check_energy(base_discharge, "base discharge");

  const double eta = bid.efficiency;
  const double delta = traj.sub_interval_length;
  const double lo = bid.soc_min();
  double cost = 0.0;
  for (std::size_t j = 0; j < j_count; ++j) {
    const double up = traj.mileage_up[j];
    const double down = traj.mileage_down[j];
    if (up < 0.0 || down < 0.0) {
      throw Error(ErrorCode::InconsistentTrajectory, "mileage must be nonnegative");
    }
    if (up > 0.0 && down > 0.0) {
      throw Error(ErrorCode::InconsistentTrajectory,
                  "regulation up and down mileage in the same sub-interval");
    }
    const double from = traj.fine_soc[j];
    const double to = traj.fine_soc[j + 1];
    segment_or_throw(bid, from, ErrorCode::InconsistentTrajectory, "fine SoC");
    segment_or_throw(bid, to, ErrorCode::InconsistentTrajectory, "fine SoC");

    const double in = (base_charge + down) * delta;
    const double out = (base_discharge + up) * delta;
    const double expected = from + eta * in - out;
    if (std::abs(expected - to) > kRecursionTol * std::max(1.0, std::abs(to))) {
      std::ostringstream os;
      os << "sub-interval " << j + 1 << " ends at " << to << ", recursion gives " << expected;
      throw Error(ErrorCode::InconsistentTrajectory, os.str());
    }

    if (out <= 0.0) {
      cost -= charge_leg_benefit(bid, from, in);
    } else if (in <= 0.0) {
      cost += discharge_leg_cost(bid, from, out);
    } else if (from - out >= lo - kSocTol) {
      cost += discharge_leg_cost(bid, from, out);
      cost -= charge_leg_benefit(bid, from - out, in);
    } else {
      cost -= charge_leg_benefit(bid, from, in);
      cost += discharge_leg_cost(bid, from + eta * in, out);
    }
  }
  return cost;
}

double stage_cost(const SocBid& bid, const StageAction& a) {
  check_energy(a.charge, "q^c");
  check_energy(a.discharge, "q^d");
  segment_index(bid, a.start_soc);
  segment_index(bid, end_soc(bid, a));
  const EpigraphCoeffs co = epigraph_coeffs(bid, a.start_soc);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bid.segments(); ++j) {
    best = std::max(best, co.alpha[j] + bid.discharge_prices[j] * a.discharge -
                              bid.charge_prices[j] * a.charge);
  }
  return best;
}

double stage_cost_threecase(const SocBid& bid, const StageAction& a) {
  check_energy(a.charge, "q^c");
  check_energy(a.discharge, "q^d");
  const auto& e = bid.breakpoints;
  const auto& cc = bid.charge_prices;
  const auto& cd = bid.discharge_prices;
  const double s = a.start_soc;
  const std::size_t m = segment_index(bid, s);
  const std::size_t n = segment_index(bid, end_soc(bid, a));

  double cost = cd[n] * a.discharge - cc[n] * a.charge;
  if (n > m) {
    for (std::size_t k = m; k < n; ++k) cost -= (cc[k] - cc[k + 1]) / bid.efficiency * (e[k + 1] - s);
  } else if (n < m) {
    for (std::size_t k = n + 1; k <= m; ++k) cost += (cd[k - 1] - cd[k]) * (e[k] - s);
  }
  return cost;
}

std::vector<double> soc_path(const SocBid& bid, std::span<const double> charge,
                             std::span<const double> discharge, double initial_soc) {
  if (charge.size() != discharge.size()) {
    throw Error(ErrorCode::DimensionMismatch, "charge and discharge series differ in length");
  }
  std::vector<double> path;
  path.reserve(charge.size() + 1);
  path.push_back(initial_soc);
  for (std::size_t t = 0; t < charge.size(); ++t) {
    check_energy(charge[t], "q^c");
    check_energy(discharge[t], "q^d");
    path.push_back(path.back() + bid.efficiency * charge[t] - discharge[t]);
  }
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (path[t] < bid.soc_min() - kSocTol || path[t] > bid.soc_max() + kSocTol) {
      std::ostringstream os;
      os << "SoC " << path[t] << " at step " << t + 1 << " leaves [" << bid.soc_min() << ", "
         << bid.soc_max() << "]";
      throw Error(ErrorCode::InfeasiblePath, os.str());
    }
  }
  return path;
}

namespace {

std::vector<double> piece_values(const SocBid& bid, std::span<const double> charge,
                                 std::span<const double> discharge, double initial_soc) {
  soc_path(bid, charge, discharge, initial_soc);
  double total_in = 0.0;
  double total_out = 0.0;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    total_in += charge[t];
    total_out += discharge[t];
  }
  const EpigraphCoeffs co = epigraph_coeffs(bid, initial_soc);
  std::vector<double> values(bid.segments());
  for (std::size_t j = 0; j < values.size(); ++j) {
    values[j] = co.alpha[j] + bid.discharge_prices[j] * total_out - bid.charge_prices[j] * total_in;
  }
  return values;
}

}  // namespace

double multi_stage_cost(const SocBid& bid, std::span<const double> charge,
                        std::span<const double> discharge, double initial_soc) {
  const auto values = piece_values(bid, charge, discharge, initial_soc);
  return *std::max_element(values.begin(), values.end());
}

std::vector<std::size_t> active_pieces(const SocBid& bid, std::span<const double> charge,
                                       std::span<const double> discharge, double initial_soc,
                                       double tol) {
  const auto values = piece_values(bid, charge, discharge, initial_soc);
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] >= best - tol * (1.0 + std::abs(best))) active.push_back(j);
  }
  return active;
}

SlopeInterval cost_subgradient(const SocBid& bid, std::span<const double> charge,
                               std::span<const double> discharge, double initial_soc,
                               std::size_t t, Side side, double tau) {
  if (t >= charge.size()) throw Error(ErrorCode::OutOfRange, "interval index beyond horizon");
  const auto active = active_pieces(bid, charge, discharge, initial_soc);
  SlopeInterval out{std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (std::size_t j : active) {
    const double slope = side == Side::Charge ? -bid.charge_prices[j] * tau
                                              : bid.discharge_prices[j] * tau;
    out.lo = std::min(out.lo, slope);
    out.hi = std::max(out.hi, slope);
  }
  return out;
}

}  // namespace socmarket::cost
