#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "socmarket/lp.hpp"

using namespace socmarket;
using lp::LpProblem;
using lp::Status;

namespace {

using Terms = std::vector<std::pair<std::size_t, double>>;

void le(LpProblem& p, Terms t, double rhs, std::string name = "") {
  p.add_le(lp::Row{std::move(t), rhs, std::move(name)});
}

void eq(LpProblem& p, Terms t, double rhs, std::string name = "") {
  p.add_eq(lp::Row{std::move(t), rhs, std::move(name)});
}

}  // namespace

TEST(LpSolve, LowerBoundRowDual) {
  LpProblem p;
  p.add_variable("x", 1.0, 0.0, 10.0);
  le(p, {{0, -1.0}}, -3.0, "atleast3");
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[0], 3.0, 1e-12);
  EXPECT_NEAR(s.y_ub[0], 1.0, 1e-12);
}

TEST(LpSolve, UpperRowDual) {
  LpProblem p;
  p.add_variable("x", -1.0, 0.0, lp::kInf);
  le(p, {{0, 1.0}}, 5.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[0], 5.0, 1e-12);
  EXPECT_NEAR(s.y_ub[0], 1.0, 1e-12);
}

TEST(LpSolve, ContradictoryEqualities) {
  LpProblem p;
  p.add_variable("x", 0.0, -lp::kInf, lp::kInf);
  eq(p, {{0, 1.0}}, 1.0);
  eq(p, {{0, 1.0}}, 2.0);
  EXPECT_EQ(lp::solve(p).status, Status::Infeasible);
}

TEST(LpSolve, Unbounded) {
  LpProblem p;
  p.add_variable("x", -1.0, 0.0, lp::kInf);
  p.add_variable("y", 0.0, 0.0, lp::kInf);
  le(p, {{0, 1.0}, {1, -1.0}}, 1.0);
  EXPECT_EQ(lp::solve(p).status, Status::Unbounded);
}

TEST(LpSolve, EqualityDualSign) {
  // min 2x + 3y, x + y = 4, x <= 1: y_eq = -3 so that c + A'y has zero on y.
  LpProblem p;
  p.add_variable("x", 2.0, 0.0, 1.0);
  p.add_variable("y", 3.0, 0.0, lp::kInf);
  eq(p, {{0, 1.0}, {1, 1.0}}, 4.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
  EXPECT_NEAR(s.x[1], 3.0, 1e-12);
  EXPECT_NEAR(s.y_eq[0], -3.0, 1e-12);
  EXPECT_NEAR(s.reduced_costs[0], -1.0, 1e-12);
  EXPECT_NEAR(s.reduced_costs[1], 0.0, 1e-12);
  EXPECT_NEAR(s.objective, 11.0, 1e-12);
}

TEST(LpSolve, FreeVariablesAndNegativeBounds) {
  LpProblem p;
  p.add_variable("x", 1.0, -lp::kInf, lp::kInf);
  p.add_variable("y", -2.0, -5.0, -1.0);
  le(p, {{0, -1.0}, {1, 1.0}}, 2.0);  // x >= y - 2
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[1], -1.0, 1e-12);
  EXPECT_NEAR(s.x[0], -3.0, 1e-12);
}

TEST(LpSolve, FixedVariable) {
  LpProblem p;
  p.add_variable("x", 1.0, 2.0, 2.0);
  p.add_variable("y", 1.0, 0.0, lp::kInf);
  le(p, {{0, -1.0}, {1, -1.0}}, -5.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[0], 2.0, 1e-12);
  EXPECT_NEAR(s.x[1], 3.0, 1e-12);
}

TEST(LpSolve, EmptyProblem) {
  LpProblem p;
  const auto s = lp::solve(p);
  EXPECT_EQ(s.status, Status::Optimal);
  EXPECT_EQ(s.objective, 0.0);
}

TEST(LpSolve, InvalidBoundsRejected) {
  LpProblem p;
  p.add_variable("x", 1.0, 3.0, 2.0);
  EXPECT_THROW(lp::validate(p), std::exception);
}

TEST(LpSolve, MatchesVertexEnumerationInTwoDimensions) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int optimal = 0;
  int infeasible = 0;
  for (int n = 0; n < 400; ++n) {
    oracle::Lp2 o;
    o.c[0] = u(rng);
    o.c[1] = u(rng);
    o.lo[0] = -3 + u(rng);
    o.lo[1] = -3 + u(rng);
    o.hi[0] = 3 + u(rng);
    o.hi[1] = 3 + u(rng);
    LpProblem p;
    p.add_variable("x0", o.c[0], o.lo[0], o.hi[0]);
    p.add_variable("x1", o.c[1], o.lo[1], o.hi[1]);
    const int rows = 1 + n % 5;
    for (int r = 0; r < rows; ++r) {
      const std::array<double, 3> row{u(rng), u(rng), 2.0 * u(rng)};
      o.rows.push_back(row);
      le(p, {{0, row[0]}, {1, row[1]}}, row[2]);
    }
    double best = 0;
    double x[2];
    const bool feasible = oracle::solve_lp2(o, best, x);
    const auto s = lp::solve(p);
    if (!feasible) {
      EXPECT_EQ(s.status, Status::Infeasible);
      ++infeasible;
      continue;
    }
    ASSERT_EQ(s.status, Status::Optimal) << "case " << n;
    EXPECT_NEAR(s.objective, best, 1e-8 * (1 + std::abs(best)));
    const auto c = lp::certify(p, s);
    EXPECT_TRUE(c.ok());
    for (double y : s.y_ub) EXPECT_GE(y, -1e-12);
    ++optimal;
  }
  EXPECT_GT(optimal, 200);
}

TEST(LpSolve, StrongDualityOnRandomTransportation) {
  // Supplies at sources, demands at sinks, random unit costs.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 30; ++n) {
    const int S = 2 + n % 4;
    const int D = 2 + (n / 4) % 4;
    LpProblem p;
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < D; ++j) p.add_variable("f", 1 + 9 * u(rng), 0.0, lp::kInf);
    }
    double total = 0;
    std::vector<double> dem(D);
    for (int j = 0; j < D; ++j) total += dem[j] = 1 + 10 * u(rng);
    for (int i = 0; i < S; ++i) {
      lp::Row r;
      for (int j = 0; j < D; ++j) r.terms.emplace_back(i * D + j, 1.0);
      le(p, r.terms, total / S + 2.0);
    }
    for (int j = 0; j < D; ++j) {
      lp::Row r;
      for (int i = 0; i < S; ++i) r.terms.emplace_back(i * D + j, 1.0);
      eq(p, r.terms, dem[j]);
    }
    const auto s = lp::solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    double dual = 0;
    for (std::size_t k = 0; k < p.ub_rows.size(); ++k) dual -= p.ub_rows[k].rhs * s.y_ub[k];
    for (std::size_t k = 0; k < p.eq_rows.size(); ++k) dual -= p.eq_rows[k].rhs * s.y_eq[k];
    EXPECT_NEAR(dual, s.objective, 1e-7 * (1 + std::abs(s.objective)));
  }
}

TEST(LpSolve, DegenerateCycleProne) {
  // A classic degenerate instance; Bland's fallback must terminate.
  LpProblem p;
  p.add_variable("x1", -0.75, 0.0, lp::kInf);
  p.add_variable("x2", 150.0, 0.0, lp::kInf);
  p.add_variable("x3", -0.02, 0.0, lp::kInf);
  p.add_variable("x4", 6.0, 0.0, lp::kInf);
  le(p, {{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, 0.0);
  le(p, {{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, 0.0);
  le(p, {{2, 1.0}}, 1.0);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, -0.05, 1e-10);
}

TEST(LpSolve, Deterministic) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpProblem p;
  for (int i = 0; i < 12; ++i) p.add_variable("x", u(rng) - 0.5, 0.0, 1.0 + u(rng));
  for (int r = 0; r < 8; ++r) {
    std::vector<std::pair<std::size_t, double>> t;
    for (int i = 0; i < 12; ++i) t.emplace_back(i, u(rng));
    le(p, t, 2.0 + u(rng));
  }
  const auto a = lp::solve(p);
  const auto b = lp::solve(p);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y_ub, b.y_ub);
}

TEST(LpCertify, DetectsBadPrimal) {
  LpProblem p;
  p.add_variable("x", 1.0, 0.0, 10.0);
  le(p, {{0, -1.0}}, -3.0);
  auto s = lp::solve(p);
  s.x[0] = 2.0;
  EXPECT_FALSE(lp::certify(p, s).ok());
}

TEST(LpFormat, WritesSections) {
  LpProblem p;
  p.add_variable("x", 1.0, 0.0, 10.0);
  p.add_variable("y", -2.0, -lp::kInf, lp::kInf);
  le(p, {{0, 1.0}, {1, 1.0}}, 4.0, "cap");
  eq(p, {{0, 1.0}, {1, -1.0}}, 0.0);
  std::ostringstream os;
  lp::write_lp_format(os, p);
  const std::string s = os.str();
  EXPECT_NE(s.find("Minimize"), std::string::npos);
  EXPECT_NE(s.find("Subject To"), std::string::npos);
  EXPECT_NE(s.find("cap:"), std::string::npos);
  EXPECT_NE(s.find("y free"), std::string::npos);
  EXPECT_NE(s.find("End"), std::string::npos);
}
