#pragma once

// SoC-dependent storage cost evaluation.
//
// Quantities q^c (net input) and q^d (net output) are energies in MWh:
// q^c = (p^c + gamma^d r^d) tau and q^d = (p^d + gamma^u r^u) tau. The SoC
// moves by eta q^c - q^d over one interval.

#include <cstddef>
#include <span>
#include <vector>

#include "socmarket/model.hpp"

namespace socmarket::cost {

struct StageAction {
  double charge = 0.0;     // q^c, MWh drawn from the grid
  double discharge = 0.0;  // q^d, MWh delivered to the grid
  double start_soc = 0.0;  // e, MWh
};

double end_soc(const SocBid& bid, const StageAction& a) noexcept;

/// Per-segment epigraph data at a given SoC. alpha[j] is the offset of the
/// j-th linear piece; the pieces share slopes (discharge_prices[j],
/// -charge_prices[j]) with the bid. max_j alpha[j] == 0 for any in-range SoC.
struct EpigraphCoeffs {
  std::vector<double> alpha;
  double h_value = 0.0;
  std::vector<double> charge_slopes;
  std::vector<double> discharge_slopes;
};

EpigraphCoeffs epigraph_coeffs(const SocBid& bid, double soc);

/// Cumulative charging value of the SoC range [E_1, soc] (h in the closed
/// form): sum of c^c_k / eta over the SoC covered in each segment.
double stored_charge_value(const SocBid& bid, double soc);

/// Exact cost of one interval along a fine-grained SoC path: discharge cost
/// minus charging benefit, summed over sub-intervals. Sub-steps that both
/// charge and discharge are evaluated as a discharge leg followed by a charge
/// leg (charge first when the discharge leg would cross the lower bound).
/// Throws InconsistentTrajectory when the path does not follow the SoC
/// recursion, mileage is negative or two-sided, or a SoC leaves the range.
double exact_trajectory_cost(const SocBid& bid, double base_charge, double base_discharge,
                             const Trajectory& traj);

/// Cost of moving the SoC down from `from` by `energy` MWh of output.
double discharge_leg_cost(const SocBid& bid, double from, double energy);

/// Benefit of drawing `energy` MWh from the grid starting at SoC `from`.
double charge_leg_benefit(const SocBid& bid, double from, double energy);

/// Single-stage bid-in cost: max_j { alpha_j(e) + c^d_j q^d - c^c_j q^c }.
/// Exact worst-case cost for EDCR bids; for other bids it is only the
/// epigraph value. Throws OutOfRange on an infeasible start or end SoC.
double stage_cost(const SocBid& bid, const StageAction& a);

/// Same quantity through the start/end segment case split (end segment above,
/// equal to, or below the start segment). Requires an EDCR bid.
double stage_cost_threecase(const SocBid& bid, const StageAction& a);

/// SoC path e_1..e_{T+1} induced by the energies. Throws InfeasiblePath when
/// any SoC leaves the bid range by more than kSocTol.
std::vector<double> soc_path(const SocBid& bid, std::span<const double> charge,
                             std::span<const double> discharge, double initial_soc);

/// Multi-interval cost: max_j { alpha_j(s) + sum_t (c^d_j q^d_t - c^c_j q^c_t) }.
double multi_stage_cost(const SocBid& bid, std::span<const double> charge,
                        std::span<const double> discharge, double initial_soc);

/// Indices of the pieces attaining the maximum in multi_stage_cost.
std::vector<std::size_t> active_pieces(const SocBid& bid, std::span<const double> charge,
                                       std::span<const double> discharge, double initial_soc,
                                       double tol = 1e-9);

enum class Side { Charge, Discharge };

struct SlopeInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double tol) const noexcept { return x >= lo - tol && x <= hi + tol; }
};

/// Subdifferential of multi_stage_cost with respect to p^c_t (Side::Charge) or
/// p^d_t (Side::Discharge), in $/MW per interval: the hull of the active
/// pieces' slopes times tau.
SlopeInterval cost_subgradient(const SocBid& bid, std::span<const double> charge,
                               std::span<const double> discharge, double initial_soc,
                               std::size_t t, Side side, double tau);

}  // namespace socmarket::cost
