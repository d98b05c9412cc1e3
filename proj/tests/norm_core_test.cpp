#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "logmeasure/gallery.hpp"
#include "logmeasure/norm_core.hpp"

using namespace logmeasure;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Test-side oracle: gauge of a centrally symmetric polygon by intersecting the
// ray t*x with every edge; independent of the facet-normal formula in the library.
double ray_edge_gauge(const std::vector<Vector>& ccw, const Vector& x) {
  double best = 0.0;
  for (std::size_t k = 0; k < ccw.size(); ++k) {
    const Vector& p = ccw[k];
    const Vector& q = ccw[(k + 1) % ccw.size()];
    // Solve t*x = p + s*(q - p) for (t, s).
    Eigen::Matrix2d m;
    m << x(0), -(q(0) - p(0)), x(1), -(q(1) - p(1));
    if (std::abs(m.determinant()) < 1e-14) continue;
    const Eigen::Vector2d ts = m.inverse() * Eigen::Vector2d(p(0), p(1));
    if (ts(0) > 0 && ts(1) >= -1e-12 && ts(1) <= 1 + 1e-12) best = std::max(best, 1.0 / ts(0));
  }
  return best;
}

bool contains_point(const std::vector<Vector>& pts, const Vector& v) {
  return std::any_of(pts.begin(), pts.end(), [&](const Vector& p) { return (p - v).cwiseAbs().maxCoeff() < 1e-9; });
}

double example2_closed_form(const Vector& x) {
  return x(0) * x(1) >= 0 ? x.cwiseAbs().maxCoeff() : x.cwiseAbs().sum();
}

}  // namespace

TEST(ValidateNormSpec, CrossPolytopeIsValid) {
  auto n = validate_norm_spec(polyhedral_spec({vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})}));
  EXPECT_EQ(n.dim(), 2);
  EXPECT_EQ(n.kind(), ValidatedNorm::Kind::Polyhedral);
  EXPECT_DOUBLE_EQ(eval_norm(vec({0.25, -0.5}), n), 0.75);
}

TEST(ValidateNormSpec, MissingNegationIsRejected) {
  try {
    validate_norm_spec(polyhedral_spec({vec({1, 0}), vec({0, 1}), vec({0, -1})}));
    FAIL() << "expected NotCentrallySymmetric";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCentrallySymmetric);
  }
}

TEST(ValidateNormSpec, FlatBallIsDegenerate) {
  try {
    validate_norm_spec(polyhedral_spec({vec({1, 1}), vec({-1, -1})}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateBall);
  }
}

TEST(ValidateNormSpec, SingularScalingIsRejected) {
  Matrix t(2, 2);
  t << 1, 2, 2, 4;
  try {
    validate_norm_spec(scaled_spec(t, lp_spec(2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularScaling);
  }
}

TEST(ValidateNormSpec, NonConvexPiecewiseIsRejected) {
  // Pieces agree on the axes but the l_0.5-like mix (l1 on ++, l_inf scaled up
  // on +-) breaks midpoint convexity across orthants.
  Matrix t = 3.0 * Matrix::Identity(2, 2);
  auto bad = piecewise_orthant_spec({{"++", lp_spec(kInf)},
                                     {"--", lp_spec(kInf)},
                                     {"+-", scaled_spec(t, lp_spec(1.0))},
                                     {"-+", scaled_spec(t, lp_spec(1.0))}});
  try {
    validate_norm_spec(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConvex);
  }
}

TEST(ValidateNormSpec, AsymmetricPiecewiseIsRejected) {
  auto bad = piecewise_orthant_spec(
      {{"++", lp_spec(kInf)}, {"--", lp_spec(1.0)}, {"+-", lp_spec(1.0)}, {"-+", lp_spec(1.0)}});
  try {
    validate_norm_spec(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCentrallySymmetric);
  }
}

TEST(ValidateNormSpec, DimensionRules) {
  EXPECT_THROW(validate_norm_spec(lp_spec(2)), Error);  // not deducible
  EXPECT_EQ(validate_norm_spec(lp_spec(2), 4).dim(), 4);
  EXPECT_THROW(validate_norm_spec(polyhedral_spec({vec({1, 0}), vec({-1, 0, 0})})), Error);
  EXPECT_THROW(validate_norm_spec(gallery::parallelogram_spec(), 3), Error);
  EXPECT_THROW(validate_norm_spec(lp_spec(0.5), 2), Error);
  auto missing = piecewise_orthant_spec({{"++", lp_spec(kInf)}, {"--", lp_spec(kInf)}});
  EXPECT_THROW(validate_norm_spec(missing), Error);
}

TEST(ValidateNormSpec, RedundantVerticesArePruned) {
  // Square plus an edge midpoint and its negation, plus duplicates.
  auto n = validate_norm_spec(polyhedral_spec({vec({1, 1}), vec({-1, -1}), vec({1, -1}), vec({-1, 1}), vec({1, 0}),
                                               vec({-1, 0}), vec({1, 1 + 1e-12})}));
  EXPECT_EQ(n.polytope_vertices().size(), 4u);
  auto cube = validate_norm_spec(polyhedral_spec({vec({1, 1, 1}), vec({-1, -1, -1}), vec({1, -1, 1}),
                                                  vec({-1, 1, -1}), vec({1, 1, -1}), vec({-1, -1, 1}),
                                                  vec({-1, 1, 1}), vec({1, -1, -1}), vec({0.5, 0.5, 0.5}),
                                                  vec({-0.5, -0.5, -0.5})}));
  EXPECT_EQ(cube.polytope_vertices().size(), 8u);
}

TEST(EvalNorm, PaperValuesForOrthantMonotonicExample) {
  auto n = validate_norm_spec(gallery::orthant_monotonic_example_spec());
  EXPECT_EQ(eval_norm(vec({1, -1}), n), 2.0);
  EXPECT_EQ(eval_norm(vec({1, 1}), n), 1.0);
}

TEST(EvalNorm, PythagoreanTriple) {
  EXPECT_EQ(eval_norm(vec({3, 4}), validate_norm_spec(lp_spec(2), 2)), 5.0);
}

TEST(EvalNorm, ParallelogramGaugeMatchesRayOracle) {
  auto n = validate_norm_spec(gallery::parallelogram_spec());
  // Counter-clockwise order for the oracle.
  const std::vector<Vector> ccw{vec({1, -1}), vec({2, 2}), vec({-1, 1}), vec({-2, -2})};
  const double oracle = ray_edge_gauge(ccw, vec({2, 0}));
  EXPECT_NEAR(oracle, 1.5, 1e-15);
  EXPECT_NEAR(eval_norm(vec({2, 0}), n), oracle, 1e-14);
  Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    const Vector x = uniform_vector(rng, 2, -3, 3);
    EXPECT_NEAR(eval_norm(x, n), ray_edge_gauge(ccw, x), 1e-12);
  }
}

TEST(EvalNorm, DimensionMismatch) {
  auto n = validate_norm_spec(lp_spec(1), 3);
  try {
    eval_norm(vec({1, 2}), n);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(EvalNorm, GeneralPAndScaled) {
  auto n3 = validate_norm_spec(lp_spec(3), 2);
  EXPECT_NEAR(eval_norm(vec({1, 2}), n3), std::cbrt(9.0), 1e-15);
  auto li = validate_norm_spec(gallery::li_wang_spec());
  EXPECT_EQ(eval_norm(vec({2, -1}), li), 1.0);
  EXPECT_EQ(eval_norm(vec({2, 0}), li), 2.0);
}

TEST(EvalNorm, LpGaugeInThreeDimensionsMatchesClosedForm) {
  // Cube and cross-polytope in R^3 go through the LP gauge.
  std::vector<Vector> cube, cross;
  for (int m = 0; m < 8; ++m) cube.push_back(sign_diagonal(3, static_cast<std::uint64_t>(m)).diagonal());
  for (int i = 0; i < 3; ++i) {
    cross.push_back(Vector::Unit(3, i));
    cross.push_back(-Vector::Unit(3, i));
  }
  auto ncube = validate_norm_spec(polyhedral_spec(cube));
  auto ncross = validate_norm_spec(polyhedral_spec(cross));
  Rng rng(11);
  for (int k = 0; k < 300; ++k) {
    const Vector x = uniform_vector(rng, 3, -5, 5);
    EXPECT_NEAR(eval_norm(x, ncube), x.cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(eval_norm(x, ncross), x.cwiseAbs().sum(), 1e-13);
  }
}

TEST(UnitBallVertices, OrthantMonotonicExampleHexagon) {
  auto verts = unit_ball_vertices(validate_norm_spec(gallery::orthant_monotonic_example_spec()));
  const std::vector<Vector> expected{vec({0, 1}), vec({1, 1}), vec({1, 0}), vec({0, -1}), vec({-1, -1}), vec({-1, 0})};
  ASSERT_EQ(verts.size(), expected.size());
  for (const auto& e : expected) EXPECT_TRUE(contains_point(verts, e));
}

TEST(UnitBallVertices, CubeAndCrossPolytope) {
  auto sq = unit_ball_vertices(validate_norm_spec(lp_spec(kInf), 2));
  EXPECT_EQ(sq.size(), 4u);
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) EXPECT_TRUE(contains_point(sq, vec({a, b})));
  auto cr = unit_ball_vertices(validate_norm_spec(lp_spec(1), 3));
  EXPECT_EQ(cr.size(), 6u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(contains_point(cr, Vector::Unit(3, i)));
    EXPECT_TRUE(contains_point(cr, -Vector::Unit(3, i)));
  }
}

TEST(UnitBallVertices, ScaledAndErrors) {
  auto li = validate_norm_spec(gallery::li_wang_spec());
  auto verts = unit_ball_vertices(li);
  ASSERT_EQ(verts.size(), 4u);
  for (const auto& v : verts) EXPECT_NEAR(eval_norm(v, li), 1.0, 1e-14);
  EXPECT_TRUE(contains_point(verts, vec({5, -2})));
  try {
    unit_ball_vertices(validate_norm_spec(lp_spec(2), 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPolyhedral);
  }
  std::vector<std::pair<std::string, NormSpec>> cases;
  for (std::uint64_t m = 0; m < 16; ++m) {
    std::string s(4, '+');
    for (int i = 0; i < 4; ++i)
      if (m >> i & 1u) s[static_cast<std::size_t>(i)] = '-';
    cases.emplace_back(s, lp_spec(kInf));
  }
  try {
    unit_ball_vertices(validate_norm_spec(piecewise_orthant_spec(cases)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedDimension);
  }
}

TEST(UnitBallVertices, ThreeDimensionalPiecewise) {
  // max(example-2 norm of (x1, x2), |x3|): l_inf where x1 x2 >= 0, otherwise the
  // polyhedral ball with vertices (+-1, 0, +-1), (0, +-1, +-1).
  std::vector<Vector> mixed;
  for (double a : {-1.0, 1.0})
    for (double c : {-1.0, 1.0}) {
      mixed.push_back(vec({a, 0, c}));
      mixed.push_back(vec({0, a, c}));
    }
  std::vector<std::pair<std::string, NormSpec>> cases;
  for (std::uint64_t m = 0; m < 8; ++m) {
    std::string s(3, '+');
    for (int i = 0; i < 3; ++i)
      if (m >> i & 1u) s[static_cast<std::size_t>(i)] = '-';
    const bool same = s[0] == s[1];
    cases.emplace_back(s, same ? lp_spec(kInf) : polyhedral_spec(mixed));
  }
  auto n = validate_norm_spec(piecewise_orthant_spec(cases));
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const Vector x = uniform_vector(rng, 3, -2, 2);
    EXPECT_NEAR(n(x), std::max(example2_closed_form(x.head(2)), std::abs(x(2))), 1e-12);
  }
  auto verts = unit_ball_vertices(n);
  for (const auto& v : verts) {
    EXPECT_NEAR(eval_norm(v, n), 1.0, 1e-12);
    EXPECT_TRUE(contains_point(verts, -v));
  }
  // Prism over the hexagon: 6 x 2 vertices.
  EXPECT_EQ(verts.size(), 12u);
  EXPECT_TRUE(contains_point(verts, vec({1, 1, 1})));
  EXPECT_TRUE(contains_point(verts, vec({0, -1, 1})));
}

// ---- properties ---------------------------------------------------------------

namespace {

std::vector<ValidatedNorm> property_norms() {
  std::vector<ValidatedNorm> out;
  for (const auto& m : gallery::norm_battery()) out.push_back(m.norm);
  out.push_back(validate_norm_spec(lp_spec(3.5), 2));
  Matrix t(3, 3);
  t << 2, 1, 0, 0, 1, -1, 1, 0, 3;
  out.push_back(validate_norm_spec(scaled_spec(t, lp_spec(2)), 3));
  out.push_back(validate_norm_spec(scaled_spec(t, lp_spec(1)), 3));
  std::vector<Vector> oct;
  for (int m = 0; m < 8; ++m) oct.push_back(sign_diagonal(3, static_cast<std::uint64_t>(m)).diagonal());
  for (int i = 0; i < 3; ++i) {
    oct.push_back(1.5 * Vector::Unit(3, i));
    oct.push_back(-1.5 * Vector::Unit(3, i));
  }
  out.push_back(validate_norm_spec(polyhedral_spec(oct)));
  return out;
}

}  // namespace

TEST(NormProperties, HomogeneityTriangleDefiniteness) {
  Rng rng(2024);
  std::uniform_real_distribution<double> alpha(-4.0, 4.0);
  for (const auto& n : property_norms()) {
    for (int k = 0; k < 300; ++k) {
      const Vector x = uniform_vector(rng, n.dim(), -2, 2);
      const Vector y = uniform_vector(rng, n.dim(), -2, 2);
      const double a = alpha(rng);
      const double nx = n(x), ny = n(y);
      EXPECT_NEAR(n(a * x), std::abs(a) * nx, 1e-12 * (1 + std::abs(a) * nx)) << n.describe();
      EXPECT_LE(n(x + y), (nx + ny) * (1 + 1e-12)) << n.describe();
      EXPECT_GT(nx, 0.0);
    }
    EXPECT_EQ(n(Vector::Zero(n.dim())), 0.0);
  }
}

TEST(NormProperties, PolyhedralVerticesHaveUnitNorm) {
  for (const auto& n : property_norms()) {
    if (!has_ball_vertices(n)) continue;
    for (const auto& v : unit_ball_vertices(n)) EXPECT_NEAR(n(v), 1.0, 1e-12) << n.describe();
  }
}

TEST(NormProperties, Example2MatchesClosedFormOnGrid) {
  auto n = validate_norm_spec(gallery::orthant_monotonic_example_spec());
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const Vector x = vec({-3.0 + 6.0 * i / 99.0, -3.0 + 6.0 * j / 99.0});
      ASSERT_DOUBLE_EQ(n(x), example2_closed_form(x));
    }
}
