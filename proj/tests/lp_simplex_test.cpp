#include <gtest/gtest.h>

#include "logmeasure/lp_simplex.hpp"

using namespace logmeasure;

TEST(LpSimplex, SolvesSmallProgram) {
  // min -x1 - x2  s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
  Matrix a(2, 4);
  a << 1, 2, 1, 0, 3, 1, 0, 1;
  Vector b(2);
  b << 4, 6;
  Vector c(4);
  c << -1, -1, 0, 0;
  const auto r = lp::minimize(a, b, c);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  // Vertex (8/5, 6/5) by hand.
  EXPECT_NEAR(r.value, -14.0 / 5.0, 1e-14);
  EXPECT_NEAR(r.x(0), 8.0 / 5.0, 1e-14);
  EXPECT_NEAR(r.x(1), 6.0 / 5.0, 1e-14);
}

TEST(LpSimplex, DetectsInfeasibility) {
  Matrix a(1, 2);
  a << 1, 1;
  Vector b(1);
  b << -1;
  EXPECT_FALSE(lp::feasible(a, b));
  EXPECT_EQ(lp::minimize(a, b, Vector::Ones(2)).status, lp::Status::Infeasible);
}

TEST(LpSimplex, NegativeRightHandSideAndRedundantRows) {
  // x1 - x2 = -1 written twice; min x1 + x2 -> x = (0, 1)
  Matrix a(2, 2);
  a << 1, -1, 2, -2;
  Vector b(2);
  b << -1, -2;
  const auto r = lp::minimize(a, b, Vector::Ones(2));
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.value, 1.0, 1e-14);
}

TEST(LpSimplex, DetectsUnboundedness) {
  Matrix a(1, 2);
  a << 1, -1;
  Vector b(1);
  b << 0;
  Vector c(2);
  c << -1, 0;
  EXPECT_EQ(lp::minimize(a, b, c).status, lp::Status::Unbounded);
}

TEST(LpSimplex, DegenerateCrossPolytopeGauge) {
  // Gauge of the 3-d cross-polytope is the l1 norm.
  Matrix v(3, 6);
  v << 1, -1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 1, -1;
  Vector x(3);
  x << 0.3, -1.2, 2.0;
  const auto r = lp::minimize(v, x, Vector::Ones(6));
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.value, 3.5, 1e-14);
}
