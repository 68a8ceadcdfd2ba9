#include "socmarket/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "socmarket/error.hpp"

namespace socmarket::qp {

namespace {

constexpr double kActiveTol = 1e-10;
constexpr double kStepTol = 1e-12;
constexpr double kStationarityTol = 1e-7;
constexpr double kFeasTol = 1e-8;

Eigen::RowVectorXd dense_row(const lp::Row& r, std::size_t n) {
  Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& [j, v] : r.terms) a(static_cast<Eigen::Index>(j)) += v;
  return a;
}

}  // namespace

double objective(const QpProblem& p, const std::vector<double>& x) {
  double v = p.constant;
  for (std::size_t i = 0; i < p.n; ++i) {
    v += p.linear[i] * x[i];
    for (std::size_t j = 0; j < p.n; ++j) v += 0.5 * x[i] * p.hessian[i * p.n + j] * x[j];
  }
  return v;
}

QpSolution solve(const QpProblem& p) {
  const std::size_t n = p.n;
  if (p.hessian.size() != n * n || p.linear.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "QP data does not match the variable count");
  }
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd H = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      p.hessian.data(), ni, ni);
  const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(p.linear.data(), ni);

  const std::size_t m_eq = p.eq_rows.size();
  const std::size_t m_ub = p.ub_rows.size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(m_eq + m_ub), ni);
  Eigen::VectorXd b(static_cast<Eigen::Index>(m_eq + m_ub));
  for (std::size_t i = 0; i < m_eq; ++i) {
    A.row(static_cast<Eigen::Index>(i)) = dense_row(p.eq_rows[i], n);
    b(static_cast<Eigen::Index>(i)) = p.eq_rows[i].rhs;
  }
  for (std::size_t i = 0; i < m_ub; ++i) {
    A.row(static_cast<Eigen::Index>(m_eq + i)) = dense_row(p.ub_rows[i], n);
    b(static_cast<Eigen::Index>(m_eq + i)) = p.ub_rows[i].rhs;
  }

  // Feasible start from a vertex of the constraint polytope.
  lp::LpProblem feas;
  for (std::size_t j = 0; j < n; ++j) feas.add_variable("x" + std::to_string(j + 1), 0.0, -lp::kInf, lp::kInf);
  feas.ub_rows = p.ub_rows;
  feas.eq_rows = p.eq_rows;
  const lp::LpSolution start = lp::solve(feas);
  if (start.status == lp::Status::Infeasible) {
    throw Error(ErrorCode::InfeasibleConstraints, "the linear constraints admit no feasible point");
  }
  if (start.status != lp::Status::Optimal) {
    throw Error(ErrorCode::NumericalFailure, "could not find a feasible starting point");
  }
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.x.data(), ni);

  // Working set: all equalities plus linearly independent active inequalities.
  std::vector<std::size_t> work;
  auto rank_with = [&](const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), ni);
    for (std::size_t k = 0; k < rows.size(); ++k) M.row(static_cast<Eigen::Index>(k)) = A.row(static_cast<Eigen::Index>(rows[k]));
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    cod.setThreshold(1e-10);
    return static_cast<std::size_t>(cod.rank());
  };
  for (std::size_t i = 0; i < m_eq + m_ub; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const bool active = i < m_eq || std::abs(A.row(ii).dot(x) - b(ii)) <= kActiveTol * (1.0 + std::abs(b(ii)));
    if (!active) continue;
    work.push_back(i);
    if (rank_with(work) < work.size()) work.pop_back();
  }

  QpSolution sol;
  Eigen::VectorXd mult;  // multipliers of the working set
  const std::size_t max_iter = 50 * (n + m_eq + m_ub) + 100;
  bool done = false;
  for (std::size_t it = 0; it < max_iter; ++it) {
    sol.iterations = it + 1;
    const auto w = static_cast<Eigen::Index>(work.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ni + w, ni + w);
    K.topLeftCorner(ni, ni) = H;
    for (Eigen::Index k = 0; k < w; ++k) {
      K.block(0, ni + k, ni, 1) = A.row(static_cast<Eigen::Index>(work[static_cast<std::size_t>(k)])).transpose();
      K.block(ni + k, 0, 1, ni) = A.row(static_cast<Eigen::Index>(work[static_cast<std::size_t>(k)]));
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni + w);
    rhs.head(ni) = -(H * x + g);
    const Eigen::VectorXd z = K.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd step = z.head(ni);
    mult = z.tail(w);

    if (step.lpNorm<Eigen::Infinity>() <= kStepTol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      // Stationary on the working set; drop the most negative inequality multiplier.
      Eigen::Index drop = -1;
      double worst = -1e-12;
      for (Eigen::Index k = 0; k < w; ++k) {
        if (work[static_cast<std::size_t>(k)] < m_eq) continue;
        if (mult(k) < worst) {
          worst = mult(k);
          drop = k;
        }
      }
      if (drop < 0) {
        done = true;
        break;
      }
      work.erase(work.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    std::size_t blocking = m_eq + m_ub;
    for (std::size_t i = m_eq; i < m_eq + m_ub; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const double ap = A.row(ii).dot(step);
      if (ap <= 1e-14) continue;
      const double limit = std::max(0.0, (b(ii) - A.row(ii).dot(x)) / ap);
      if (limit < alpha) {
        alpha = limit;
        blocking = i;
      }
    }
    x += alpha * step;
    if (blocking < m_eq + m_ub) work.push_back(blocking);
  }
  if (!done) throw Error(ErrorCode::NumericalFailure, "active-set iteration limit reached");

  sol.x.assign(x.data(), x.data() + n);
  sol.y_eq.assign(m_eq, 0.0);
  sol.y_ub.assign(m_ub, 0.0);
  for (std::size_t k = 0; k < work.size(); ++k) {
    const std::size_t i = work[k];
    if (i < m_eq) {
      sol.y_eq[i] = mult(static_cast<Eigen::Index>(k));
    } else {
      sol.y_ub[i - m_eq] = mult(static_cast<Eigen::Index>(k));
    }
  }
  sol.objective = objective(p, sol.x);

  Eigen::VectorXd grad = H * x + g;
  for (std::size_t i = 0; i < m_eq; ++i) grad += sol.y_eq[i] * A.row(static_cast<Eigen::Index>(i)).transpose();
  for (std::size_t i = 0; i < m_ub; ++i) grad += sol.y_ub[i] * A.row(static_cast<Eigen::Index>(m_eq + i)).transpose();
  sol.stationarity = grad.lpNorm<Eigen::Infinity>();
  double dual_viol = 0.0;
  for (std::size_t i = 0; i < m_eq + m_ub; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double r = A.row(ii).dot(x) - b(ii);
    if (i < m_eq) {
      sol.primal_residual = std::max(sol.primal_residual, std::abs(r));
    } else {
      sol.primal_residual = std::max(sol.primal_residual, r);
      const double y = sol.y_ub[i - m_eq];
      dual_viol = std::max(dual_viol, -y);
      sol.complementarity = std::max(sol.complementarity, std::abs(y * r));
    }
  }
  if (sol.stationarity > kStationarityTol || sol.primal_residual > kFeasTol || dual_viol > kFeasTol ||
      sol.complementarity > kFeasTol) {
    throw Error(ErrorCode::NumericalFailure, "QP solution failed the KKT certificate");
  }
  return sol;
}

}  // namespace socmarket::qp
