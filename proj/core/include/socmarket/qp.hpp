#pragma once

// Small dense convex quadratic programs:
//   minimize 0.5 x'Hx + g'x + c0  s.t.  A_ub x <= b_ub,  A_eq x = b_eq
// with H positive semidefinite.

#include <cstddef>
#include <vector>

#include "socmarket/lp.hpp"

namespace socmarket::qp {

struct QpProblem {
  std::size_t n = 0;
  std::vector<double> hessian;  // n x n, row-major
  std::vector<double> linear;
  double constant = 0.0;
  std::vector<lp::Row> ub_rows;
  std::vector<lp::Row> eq_rows;
};

struct QpSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> y_ub;  // >= 0
  std::vector<double> y_eq;
  double stationarity = 0.0;     // |Hx + g + A_ub'y_ub + A_eq'y_eq|_inf
  double primal_residual = 0.0;  // max row violation
  double complementarity = 0.0;  // max |y_ub,i (b_i - a_i x)|
  std::size_t iterations = 0;
};

double objective(const QpProblem& p, const std::vector<double>& x);

/// Primal active-set method started from a feasible vertex of the
/// constraints. Throws InfeasibleConstraints when no feasible point exists
/// and NumericalFailure when the KKT certificate fails
/// (stationarity > 1e-7, dual or primal sign violations > 1e-8).
QpSolution solve(const QpProblem& p);

}  // namespace socmarket::qp
