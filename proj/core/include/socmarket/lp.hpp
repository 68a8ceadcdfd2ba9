#pragma once

// Linear programs with primal and dual solutions.
//
// Sign convention: minimize c'x subject to A_ub x <= b_ub, A_eq x = b_eq,
// lb <= x <= ub. Duals belong to the Lagrangian
//   L = c'x + y_ub'(A_ub x - b_ub) + y_eq'(A_eq x - b_eq)
// so y_ub >= 0, y_eq is free, and reduced costs are c + A_ub'y_ub + A_eq'y_eq.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace socmarket::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs = 0.0;
  std::string name;
};

struct LpProblem {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> var_names;
  std::vector<Row> ub_rows;
  std::vector<Row> eq_rows;

  std::size_t add_variable(std::string name, double cost, double lo, double hi);
  std::size_t add_le(Row row);
  std::size_t add_eq(Row row);

  std::size_t num_vars() const noexcept { return objective.size(); }
};

/// Throws DimensionMismatch / InvalidInput on inconsistent dimensions, bad
/// indices, NaN data or lb > ub.
void validate(const LpProblem& p);

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(Status s) noexcept;

struct LpSolution {
  Status status = Status::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> y_ub;
  std::vector<double> y_eq;
  std::vector<double> reduced_costs;
  std::size_t iterations = 0;
};

struct Certificate {
  double primal_residual = 0.0;  // max violation / (1 + |rhs|) over rows and bounds
  double dual_residual = 0.0;    // max sign violation of y_ub and reduced costs
  double duality_gap = 0.0;      // |primal - dual| / (1 + |primal|)

  bool ok(double primal_tol = 1e-8, double dual_tol = 1e-8, double gap_tol = 1e-7) const noexcept {
    return primal_residual <= primal_tol && dual_residual <= dual_tol && duality_gap <= gap_tol;
  }
};

/// Recomputes residuals of `sol` against `p` from scratch.
Certificate certify(const LpProblem& p, const LpSolution& sol);

struct SolverOptions {
  std::size_t max_iterations = 200000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
};

/// Bounded-variable two-phase primal simplex. Deterministic: the same problem
/// always produces the same vertex. An Optimal status is only returned when
/// the certificate passes.
LpSolution solve(const LpProblem& p, const SolverOptions& opt = {});

/// Writes the problem in CPLEX LP text format.
void write_lp_format(std::ostream& os, const LpProblem& p);

}  // namespace socmarket::lp
