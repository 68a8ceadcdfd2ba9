#include "socmarket/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "socmarket/error.hpp"

namespace socmarket::lp {

std::size_t LpProblem::add_variable(std::string name, double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  var_names.push_back(std::move(name));
  return objective.size() - 1;
}

std::size_t LpProblem::add_le(Row row) {
  ub_rows.push_back(std::move(row));
  return ub_rows.size() - 1;
}

std::size_t LpProblem::add_eq(Row row) {
  eq_rows.push_back(std::move(row));
  return eq_rows.size() - 1;
}

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void validate(const LpProblem& p) {
  const std::size_t n = p.num_vars();
  if (p.lower.size() != n || p.upper.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "bound vectors do not match the variable count");
  }
  if (!p.var_names.empty() && p.var_names.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "name vector does not match the variable count");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(p.objective[j]) || std::isnan(p.lower[j]) || std::isnan(p.upper[j]) ||
        p.lower[j] > p.upper[j] || p.lower[j] == kInf || p.upper[j] == -kInf) {
      std::ostringstream os;
      os << "variable " << j << " has invalid cost or bounds";
      throw Error(ErrorCode::InvalidInput, os.str());
    }
  }
  auto check_rows = [&](const std::vector<Row>& rows) {
    for (const Row& r : rows) {
      if (!std::isfinite(r.rhs)) throw Error(ErrorCode::InvalidInput, "non-finite right-hand side");
      for (const auto& [j, a] : r.terms) {
        if (j >= n) throw Error(ErrorCode::DimensionMismatch, "row references an unknown variable");
        if (!std::isfinite(a)) throw Error(ErrorCode::InvalidInput, "non-finite coefficient");
      }
    }
  };
  check_rows(p.ub_rows);
  check_rows(p.eq_rows);
}

namespace {

double row_activity(const Row& r, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& [j, a] : r.terms) s += a * x[j];
  return s;
}

// Dense tableau over structural, slack and artificial columns. Every column
// carries its own bounds; nonbasic columns sit at a bound (or at zero when
// free) and basic values are tracked in x.
class Simplex {
 public:
  Simplex(const LpProblem& p, const SolverOptions& opt) : p_(p), opt_(opt) { build(); }

  LpSolution run();

 private:
  enum class Outcome { Optimal, Unbounded, IterationLimit };

  const LpProblem& p_;
  const SolverOptions& opt_;
  std::size_t n_ = 0;     // structural
  std::size_t m_ = 0;     // rows
  std::size_t cols_ = 0;  // all columns
  std::size_t first_art_ = 0;
  Eigen::MatrixXd a_;    // original constraint matrix, m x cols
  Eigen::VectorXd b_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tab_;  // B^{-1} A
  std::vector<double> lo_, hi_, cost_, x_, d_;
  std::vector<std::size_t> basis_;
  std::vector<long> row_of_;  // -1 when nonbasic
  std::size_t iterations_ = 0;

  void build();
  void set_costs(bool phase_one);
  void refactor();
  void compute_reduced_costs();
  bool is_basic(std::size_t j) const { return row_of_[j] >= 0; }
  int entering_direction(std::size_t j) const;
  Outcome iterate();
  void pivot(std::size_t r, std::size_t q);
  void drive_out_artificials();
  double primal_infeasibility() const;
};

void Simplex::build() {
  n_ = p_.num_vars();
  const std::size_t m_ub = p_.ub_rows.size();
  m_ = m_ub + p_.eq_rows.size();

  lo_.assign(p_.lower.begin(), p_.lower.end());
  hi_.assign(p_.upper.begin(), p_.upper.end());
  x_.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    x_[j] = std::isfinite(lo_[j]) ? lo_[j] : (std::isfinite(hi_[j]) ? hi_[j] : 0.0);
  }

  Eigen::MatrixXd structural = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_),
                                                     static_cast<Eigen::Index>(n_));
  b_.resize(static_cast<Eigen::Index>(m_));
  for (std::size_t i = 0; i < m_; ++i) {
    const Row& r = i < m_ub ? p_.ub_rows[i] : p_.eq_rows[i - m_ub];
    for (const auto& [j, a] : r.terms) structural(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += a;
    b_(static_cast<Eigen::Index>(i)) = r.rhs;
  }
  Eigen::VectorXd xs = Eigen::Map<Eigen::VectorXd>(x_.data(), static_cast<Eigen::Index>(n_));
  const Eigen::VectorXd residual = b_ - structural * xs;

  // Slack for every inequality row; artificial only where the slack alone
  // cannot start feasible.
  std::vector<std::pair<std::size_t, double>> artificials;
  basis_.assign(m_, 0);
  for (std::size_t i = 0; i < m_; ++i) {
    const double r = residual(static_cast<Eigen::Index>(i));
    if (i < m_ub && r >= 0.0) continue;
    artificials.emplace_back(i, r >= 0.0 ? 1.0 : -1.0);
  }
  first_art_ = n_ + m_ub;
  cols_ = first_art_ + artificials.size();
  a_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(cols_));
  a_.leftCols(static_cast<Eigen::Index>(n_)) = structural;
  for (std::size_t i = 0; i < m_ub; ++i) {
    a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n_ + i)) = 1.0;
    lo_.push_back(0.0);
    hi_.push_back(kInf);
    x_.push_back(0.0);
  }
  row_of_.assign(cols_, -1);
  for (std::size_t i = 0; i < m_ub; ++i) {
    const double r = residual(static_cast<Eigen::Index>(i));
    if (r >= 0.0) {
      basis_[i] = n_ + i;
      x_[n_ + i] = r;
    }
  }
  for (std::size_t k = 0; k < artificials.size(); ++k) {
    const auto [i, sign] = artificials[k];
    const std::size_t col = first_art_ + k;
    a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = sign;
    lo_.push_back(0.0);
    hi_.push_back(kInf);
    x_.push_back(std::abs(residual(static_cast<Eigen::Index>(i))));
    basis_[i] = col;
  }
  for (std::size_t i = 0; i < m_; ++i) row_of_[basis_[i]] = static_cast<long>(i);

  // Initial basis is diagonal with +-1 entries.
  tab_ = a_;
  for (std::size_t i = 0; i < m_; ++i) {
    const double s = a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(basis_[i]));
    if (s < 0.0) tab_.row(static_cast<Eigen::Index>(i)) *= -1.0;
  }
}

void Simplex::set_costs(bool phase_one) {
  cost_.assign(cols_, 0.0);
  if (phase_one) {
    for (std::size_t j = first_art_; j < cols_; ++j) cost_[j] = 1.0;
  } else {
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = p_.objective[j];
  }
  compute_reduced_costs();
}

void Simplex::compute_reduced_costs() {
  d_ = cost_;
  for (std::size_t i = 0; i < m_; ++i) {
    const double cb = cost_[basis_[i]];
    if (cb == 0.0) continue;
    const auto row = tab_.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row(static_cast<Eigen::Index>(j));
  }
  for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
}

void Simplex::refactor() {
  if (m_ == 0) return;
  const auto mi = static_cast<Eigen::Index>(m_);
  Eigen::MatrixXd basis(mi, mi);
  for (std::size_t i = 0; i < m_; ++i) basis.col(static_cast<Eigen::Index>(i)) = a_.col(static_cast<Eigen::Index>(basis_[i]));
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
  tab_ = lu.solve(a_);
  Eigen::VectorXd rhs = b_;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (!is_basic(j) && x_[j] != 0.0) rhs -= a_.col(static_cast<Eigen::Index>(j)) * x_[j];
  }
  const Eigen::VectorXd xb = lu.solve(rhs);
  for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb(static_cast<Eigen::Index>(i));
  compute_reduced_costs();
}

// +1 to increase, -1 to decrease, 0 when the column cannot improve.
int Simplex::entering_direction(std::size_t j) const {
  if (is_basic(j) || lo_[j] == hi_[j]) return 0;
  const double dj = d_[j];
  const double tol = opt_.optimality_tol * (1.0 + std::abs(cost_[j]));
  const bool can_up = x_[j] < hi_[j];
  const bool can_down = x_[j] > lo_[j];
  if (dj < -tol && can_up) return 1;
  if (dj > tol && can_down) return -1;
  return 0;
}

void Simplex::pivot(std::size_t r, std::size_t q) {
  const auto ri = static_cast<Eigen::Index>(r);
  const auto qi = static_cast<Eigen::Index>(q);
  tab_.row(ri) /= tab_(ri, qi);
  std::vector<Eigen::Index> nz;
  for (Eigen::Index j = 0; j < tab_.cols(); ++j) {
    if (tab_(ri, j) != 0.0) nz.push_back(j);
  }
  for (Eigen::Index i = 0; i < tab_.rows(); ++i) {
    if (i == ri) continue;
    const double f = tab_(i, qi);
    if (f == 0.0) continue;
    for (Eigen::Index j : nz) tab_(i, j) -= f * tab_(ri, j);
    tab_(i, qi) = 0.0;
  }
  const double dq = d_[q];
  if (dq != 0.0) {
    for (Eigen::Index j : nz) d_[static_cast<std::size_t>(j)] -= dq * tab_(ri, j);
    d_[q] = 0.0;
  }
  row_of_[basis_[r]] = -1;
  basis_[r] = q;
  row_of_[q] = static_cast<long>(r);
}

Simplex::Outcome Simplex::iterate() {
  constexpr std::size_t kRefactorEvery = 200;
  constexpr std::size_t kDegenerateLimit = 50;
  std::size_t degenerate = 0;
  std::size_t since_refactor = 0;
  bool verified = false;

  while (true) {
    if (iterations_ >= opt_.max_iterations) return Outcome::IterationLimit;
    if (since_refactor >= kRefactorEvery) {
      refactor();
      since_refactor = 0;
    }

    const bool bland = degenerate >= kDegenerateLimit;
    std::size_t q = cols_;
    int dir = 0;
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      const int dj = entering_direction(j);
      if (dj == 0) continue;
      if (bland) {
        q = j;
        dir = dj;
        break;
      }
      const double score = std::abs(d_[j]);
      if (score > best) {
        best = score;
        q = j;
        dir = dj;
      }
    }
    if (q == cols_) {
      // Confirm optimality on a fresh factorization before stopping.
      if (verified) return Outcome::Optimal;
      refactor();
      since_refactor = 0;
      verified = true;
      continue;
    }
    verified = false;

    // Ratio test. theta is the step of x_q in direction dir.
    const auto qi = static_cast<Eigen::Index>(q);
    double theta = hi_[q] - lo_[q];
    std::size_t leave = m_;
    double leave_pivot = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = tab_(static_cast<Eigen::Index>(i), qi) * dir;
      if (std::abs(alpha) <= opt_.pivot_tol) continue;
      const std::size_t bj = basis_[i];
      double limit = kInf;
      if (alpha > 0.0 && std::isfinite(lo_[bj])) {
        limit = std::max(0.0, (x_[bj] - lo_[bj]) / alpha);
      } else if (alpha < 0.0 && std::isfinite(hi_[bj])) {
        limit = std::max(0.0, (hi_[bj] - x_[bj]) / -alpha);
      }
      if (!std::isfinite(limit)) continue;
      const double slack = 1e-12 * (1.0 + limit);
      bool take = false;
      if (limit < theta - slack) {
        take = true;
      } else if (limit <= theta + slack && leave < m_) {
        take = bland ? bj < basis_[leave] : std::abs(alpha) > leave_pivot;
      }
      if (take) {
        theta = std::min(theta, limit);
        leave = i;
        leave_pivot = std::abs(alpha);
      }
    }
    if (!std::isfinite(theta)) return Outcome::Unbounded;

    ++iterations_;
    ++since_refactor;
    degenerate = theta <= 1e-12 ? degenerate + 1 : 0;

    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = tab_(static_cast<Eigen::Index>(i), qi);
      if (alpha != 0.0) x_[basis_[i]] -= theta * dir * alpha;
    }
    x_[q] += theta * dir;

    if (leave == m_) {
      // Bound flip.
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
      continue;
    }
    const std::size_t out = basis_[leave];
    const double alpha = tab_(static_cast<Eigen::Index>(leave), qi) * dir;
    x_[out] = alpha > 0.0 ? lo_[out] : hi_[out];
    pivot(leave, q);
  }
}

void Simplex::drive_out_artificials() {
  for (std::size_t i = 0; i < m_; ++i) {
    if (basis_[i] < first_art_) continue;
    const auto ri = static_cast<Eigen::Index>(i);
    std::size_t best = cols_;
    double mag = 1e-9;
    for (std::size_t j = 0; j < first_art_; ++j) {
      if (is_basic(j)) continue;
      const double v = std::abs(tab_(ri, static_cast<Eigen::Index>(j)));
      if (v > mag) {
        mag = v;
        best = j;
      }
    }
    if (best == cols_) continue;  // redundant row
    x_[basis_[i]] = 0.0;
    pivot(i, best);
  }
  for (std::size_t j = first_art_; j < cols_; ++j) {
    hi_[j] = 0.0;
    if (!is_basic(j)) x_[j] = 0.0;
  }
}

double Simplex::primal_infeasibility() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    const std::size_t j = basis_[i];
    worst = std::max({worst, lo_[j] - x_[j], x_[j] - hi_[j]});
  }
  return worst;
}

LpSolution Simplex::run() {
  LpSolution sol;
  const double bscale = 1.0 + (m_ > 0 ? b_.cwiseAbs().maxCoeff() : 0.0);

  if (cols_ > first_art_) {
    set_costs(true);
    const Outcome o = iterate();
    if (o == Outcome::IterationLimit) {
      sol.status = Status::NumericalFailure;
      sol.iterations = iterations_;
      return sol;
    }
    double art = 0.0;
    for (std::size_t j = first_art_; j < cols_; ++j) art += x_[j];
    if (art > 1e-8 * bscale) {
      sol.status = Status::Infeasible;
      sol.iterations = iterations_;
      return sol;
    }
    drive_out_artificials();
    refactor();
  }

  set_costs(false);
  const Outcome o = iterate();
  sol.iterations = iterations_;
  if (o == Outcome::IterationLimit) {
    sol.status = Status::NumericalFailure;
    return sol;
  }
  if (o == Outcome::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }
  if (primal_infeasibility() > 1e-7 * bscale) {
    sol.status = Status::NumericalFailure;
    return sol;
  }

  sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  for (std::size_t j = 0; j < n_; ++j) {
    if (std::isfinite(lo_[j])) sol.x[j] = std::max(sol.x[j], lo_[j]);
    if (std::isfinite(hi_[j])) sol.x[j] = std::min(sol.x[j], hi_[j]);
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n_; ++j) sol.objective += p_.objective[j] * sol.x[j];

  // Simplex multipliers of the standard form, B'w = c_B; the Lagrangian
  // duals are their negation.
  const std::size_t m_ub = p_.ub_rows.size();
  sol.y_ub.assign(m_ub, 0.0);
  sol.y_eq.assign(p_.eq_rows.size(), 0.0);
  if (m_ > 0) {
    const auto mi = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd basis(mi, mi);
    Eigen::VectorXd cb(mi);
    for (std::size_t i = 0; i < m_; ++i) {
      basis.col(static_cast<Eigen::Index>(i)) = a_.col(static_cast<Eigen::Index>(basis_[i]));
      cb(static_cast<Eigen::Index>(i)) = cost_[basis_[i]];
    }
    const Eigen::VectorXd w = basis.transpose().partialPivLu().solve(cb);
    for (std::size_t i = 0; i < m_; ++i) {
      const double y = -w(static_cast<Eigen::Index>(i));
      if (i < m_ub) {
        sol.y_ub[i] = y;
      } else {
        sol.y_eq[i - m_ub] = y;
      }
    }
  }
  sol.reduced_costs.assign(p_.objective.begin(), p_.objective.end());
  for (std::size_t i = 0; i < m_ub; ++i) {
    for (const auto& [j, a] : p_.ub_rows[i].terms) sol.reduced_costs[j] += a * sol.y_ub[i];
  }
  for (std::size_t i = 0; i < p_.eq_rows.size(); ++i) {
    for (const auto& [j, a] : p_.eq_rows[i].terms) sol.reduced_costs[j] += a * sol.y_eq[i];
  }
  sol.status = Status::Optimal;
  return sol;
}

}  // namespace

Certificate certify(const LpProblem& p, const LpSolution& sol) {
  const std::size_t n = p.num_vars();
  if (sol.x.size() != n || sol.y_ub.size() != p.ub_rows.size() ||
      sol.y_eq.size() != p.eq_rows.size()) {
    throw Error(ErrorCode::DimensionMismatch, "solution does not match the problem dimensions");
  }
  Certificate c;
  for (const Row& r : p.ub_rows) {
    c.primal_residual = std::max(c.primal_residual,
                                 (row_activity(r, sol.x) - r.rhs) / (1.0 + std::abs(r.rhs)));
  }
  for (const Row& r : p.eq_rows) {
    c.primal_residual = std::max(c.primal_residual,
                                 std::abs(row_activity(r, sol.x) - r.rhs) / (1.0 + std::abs(r.rhs)));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(p.lower[j])) {
      c.primal_residual = std::max(c.primal_residual, (p.lower[j] - sol.x[j]) / (1.0 + std::abs(p.lower[j])));
    }
    if (std::isfinite(p.upper[j])) {
      c.primal_residual = std::max(c.primal_residual, (sol.x[j] - p.upper[j]) / (1.0 + std::abs(p.upper[j])));
    }
  }

  std::vector<double> d(p.objective.begin(), p.objective.end());
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < p.ub_rows.size(); ++i) {
    c.dual_residual = std::max(c.dual_residual, -sol.y_ub[i]);
    for (const auto& [j, a] : p.ub_rows[i].terms) d[j] += a * sol.y_ub[i];
    dual_obj -= p.ub_rows[i].rhs * sol.y_ub[i];
  }
  for (std::size_t i = 0; i < p.eq_rows.size(); ++i) {
    for (const auto& [j, a] : p.eq_rows[i].terms) d[j] += a * sol.y_eq[i];
    dual_obj -= p.eq_rows[i].rhs * sol.y_eq[i];
  }
  constexpr double kAtBound = 1e-9;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = p.lower[j];
    const double hi = p.upper[j];
    const double x = sol.x[j];
    const double scale = 1.0 + std::abs(p.objective[j]);
    const bool at_lo = std::isfinite(lo) && x <= lo + kAtBound * (1.0 + std::abs(lo));
    const bool at_hi = std::isfinite(hi) && x >= hi - kAtBound * (1.0 + std::abs(hi));
    double viol = 0.0;
    if (at_lo && at_hi) {
      viol = 0.0;
    } else if (at_lo) {
      viol = std::max(0.0, -d[j]);
    } else if (at_hi) {
      viol = std::max(0.0, d[j]);
    } else {
      viol = std::abs(d[j]);
    }
    c.dual_residual = std::max(c.dual_residual, viol / scale);

    // Bound term of the dual objective; the bound is the one the reduced
    // cost prices.
    double bound = x;
    if (d[j] > 0.0 && std::isfinite(lo)) bound = lo;
    if (d[j] < 0.0 && std::isfinite(hi)) bound = hi;
    dual_obj += d[j] * bound;
  }
  double primal_obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal_obj += p.objective[j] * sol.x[j];
  c.duality_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
  return c;
}

LpSolution solve(const LpProblem& p, const SolverOptions& opt) {
  validate(p);
  Simplex simplex(p, opt);
  LpSolution sol = simplex.run();
  if (sol.status == Status::Optimal && !certify(p, sol).ok()) {
    sol.status = Status::NumericalFailure;
  }
  return sol;
}

}  // namespace socmarket::lp
