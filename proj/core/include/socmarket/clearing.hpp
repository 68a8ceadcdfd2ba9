#pragma once

// Multi-interval energy / regulation co-optimization with EDCR storage bids.

#include <cstddef>
#include <optional>
#include <vector>

#include "socmarket/error.hpp"
#include "socmarket/lp.hpp"
#include "socmarket/model.hpp"

namespace socmarket {

/// Column and row positions of the clearing LP.
struct ClearingLayout {
  std::size_t horizon = 0;
  std::size_t generators = 0;
  std::size_t storages = 0;
  std::size_t line_rows = 0;

  // Columns.
  std::size_t gen_energy(std::size_t i, std::size_t t) const { return t * per_t() + 3 * i; }
  std::size_t gen_regup(std::size_t i, std::size_t t) const { return gen_energy(i, t) + 1; }
  std::size_t gen_regdown(std::size_t i, std::size_t t) const { return gen_energy(i, t) + 2; }
  std::size_t charge(std::size_t i, std::size_t t) const { return t * per_t() + 3 * generators + 7 * i; }
  std::size_t discharge(std::size_t i, std::size_t t) const { return charge(i, t) + 1; }
  std::size_t regup(std::size_t i, std::size_t t) const { return charge(i, t) + 2; }
  std::size_t regdown(std::size_t i, std::size_t t) const { return charge(i, t) + 3; }
  std::size_t charge_energy(std::size_t i, std::size_t t) const { return charge(i, t) + 4; }
  std::size_t discharge_energy(std::size_t i, std::size_t t) const { return charge(i, t) + 5; }
  /// SoC at the end of interval t (e_{t+2} in one-based notation).
  std::size_t next_soc(std::size_t i, std::size_t t) const { return charge(i, t) + 6; }
  std::size_t epigraph(std::size_t i) const { return horizon * per_t() + i; }
  std::size_t variable_count() const { return horizon * per_t() + storages; }

  // Inequality rows.
  std::vector<std::size_t> epigraph_row_start;  // per storage
  std::size_t epigraph_rows = 0;
  std::size_t line_row(std::size_t t, std::size_t l) const { return epigraph_rows + t * ub_per_t() + l; }
  std::size_t regup_row(std::size_t t) const { return line_row(t, line_rows); }
  std::size_t regdown_row(std::size_t t) const { return regup_row(t) + 1; }
  std::size_t ub_row_count() const { return epigraph_rows + horizon * ub_per_t(); }

  // Equality rows.
  std::size_t balance_row(std::size_t t) const { return t * (1 + 3 * storages); }
  std::size_t eq_row_count() const { return horizon * (1 + 3 * storages); }

 private:
  std::size_t per_t() const { return 3 * generators + 7 * storages; }
  std::size_t ub_per_t() const { return line_rows + 2 + 2 * generators + 2 * storages; }
};

struct ClearingLp {
  lp::LpProblem problem;
  ClearingLayout layout;
};

/// Throws NonEdcrBid for a storage whose bid fails the EDCR check, and the
/// validation errors of validate_instance.
ClearingLp build_clearing_lp(const MarketInstance& inst, double edcr_tol = kDefaultEdcrTol);

struct DispatchSolution {
  // [i][t]
  std::vector<std::vector<double>> gen_energy, gen_regup, gen_regdown;
  std::vector<std::vector<double>> charge, discharge, regup, regdown;
  std::vector<std::vector<double>> charge_energy, discharge_energy;  // q^c, q^d in MWh
  std::vector<std::vector<double>> soc;                              // [i][0..T], soc[i][0] = s_i
  std::vector<double> epigraph;                                      // upsilon_i
  double objective = 0.0;
};

struct PriceSolution {
  std::vector<double> lambda;                   // [t]
  std::vector<std::vector<double>> congestion;  // [t][line row], >= 0
  std::vector<std::vector<double>> lmp;         // [t][bus]
  std::vector<double> regup_price;              // [t]
  std::vector<double> regdown_price;            // [t]
};

struct ClearingResult {
  DispatchSolution dispatch;
  PriceSolution prices;
  lp::Certificate certificate;
  std::size_t iterations = 0;
};

/// Solves the clearing LP. Throws Infeasible, Unbounded or NumericalFailure
/// when the solver does not return a certified optimum.
ClearingResult clear(const MarketInstance& inst, const lp::SolverOptions& opt = {});

/// Maps an LP solution onto dispatch and prices.
ClearingResult extract_solution(const MarketInstance& inst, const ClearingLp& lp,
                                const lp::LpSolution& sol);

struct SimultaneousFlag {
  std::size_t storage = 0;
  std::size_t interval = 0;
  double product = 0.0;  // p^c p^d
};

struct SimultaneousReport {
  std::vector<SimultaneousFlag> flags;
  double min_lmp = 0.0;
};

/// Flags every (i, t) with p^c p^d > tol and reports the smallest LMP.
SimultaneousReport check_no_simultaneous_cd(const DispatchSolution& sol, const PriceSolution& prices,
                                            double tol = 1e-9);

struct RegulationCondition {
  bool holds = false;
  double spread_value = 0.0;  // (c^d_K - c^c_1 / eta) tau
  double price_value = 0.0;   // beta^u / gamma^u + beta^d / (eta gamma^d)
  std::optional<ErrorCode> error;  // DivisionByZero when a dispatch fraction is zero
};

/// Sufficient condition for one-sided regulation clearing at interval t.
RegulationCondition check_one_sided_regulation(const StorageAsset& asset, const PriceSolution& prices,
                                               double tau, std::size_t t);

struct OneSidedReport {
  bool condition_holds_everywhere = true;
  bool complementarity_ok = true;
  double max_min_regulation = 0.0;  // max over i,t of min(r^u, r^d)
  std::size_t undefined = 0;        // (i, t) pairs with a zero dispatch fraction
};

/// Evaluates the condition for every storage and interval of a solved
/// instance and whether min(r^u, r^d) <= tol wherever it holds.
OneSidedReport check_one_sided_regulation(const MarketInstance& inst, const ClearingResult& res,
                                          double tol = 1e-9);

}  // namespace socmarket
