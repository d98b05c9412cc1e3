#include <gtest/gtest.h>

#include "logmeasure/gallery.hpp"
#include "logmeasure/norm_classifier.hpp"

using namespace logmeasure;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Re-verification of a failed verdict with a single norm evaluation pair.
void expect_absolute_witness(const ValidatedNorm& n, const Verdict& v) {
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.witness_vector.has_value());
  const Vector& x = *v.witness_vector;
  EXPECT_GT(std::abs(n(x) - n(x.cwiseAbs())), 1e-9);
}

void expect_projection_witness(const ValidatedNorm& n, const Verdict& v) {
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.witness_vector && v.witness_matrix);
  const Vector& x = *v.witness_vector;
  EXPECT_GT(n(*v.witness_matrix * x), n(x) * (1 + 1e-9));
}

}  // namespace

TEST(IsAbsolute, SpecExamples) {
  auto l1 = validate_norm_spec(lp_spec(1), 3);
  auto a = is_absolute(l1);
  EXPECT_TRUE(a.holds);
  EXPECT_TRUE(a.exact);

  auto ex2 = validate_norm_spec(gallery::orthant_monotonic_example_spec());
  auto b = is_absolute(ex2);
  EXPECT_TRUE(b.exact);
  expect_absolute_witness(ex2, b);
  EXPECT_TRUE(b.witness_vector->isApprox(vec({1, -1})));

  auto li = validate_norm_spec(gallery::li_wang_spec());
  auto c = is_absolute(li);
  EXPECT_TRUE(c.exact);
  expect_absolute_witness(li, c);
  ASSERT_TRUE(c.witness_matrix.has_value());
  Matrix s = Matrix::Identity(2, 2);
  s(1, 1) = -1;
  EXPECT_EQ(*c.witness_matrix, s);
  // Oracle: ||S|| under the scaled max norm from the closed form on T S T^-1.
  const Matrix t = gallery::li_wang_scaling();
  EXPECT_GT(closed_form::norm_inf(t * s * t.inverse()), 1.0);
}

TEST(IsAbsolute, ScaledTwoNormUsesClosedForm) {
  Matrix t(2, 2);
  t << 1, 1, 0, 1;
  auto n = validate_norm_spec(scaled_spec(t, lp_spec(2)));
  auto v = is_absolute(n);
  EXPECT_TRUE(v.exact);
  expect_absolute_witness(n, v);
}

TEST(IsAbsolute, SampledPathOnHighDimensionalPiecewise) {
  std::vector<std::pair<std::string, NormSpec>> cases;
  for (std::uint64_t m = 0; m < 16; ++m) {
    std::string s(4, '+');
    for (int i = 0; i < 4; ++i)
      if (m >> i & 1u) s[static_cast<std::size_t>(i)] = '-';
    cases.emplace_back(s, lp_spec(kInf));
  }
  auto n = validate_norm_spec(piecewise_orthant_spec(cases));
  auto v = is_absolute(n);
  EXPECT_TRUE(v.holds);
  EXPECT_FALSE(v.exact);
  EXPECT_EQ(v.checks_run, static_cast<std::size_t>(kClassifierSamples));
  auto o = is_orthant_monotonic(n);
  EXPECT_TRUE(o.holds);
  EXPECT_FALSE(o.exact);
}

TEST(IsOrthantMonotonic, SpecExamples) {
  auto ex2 = validate_norm_spec(gallery::orthant_monotonic_example_spec());
  auto a = is_orthant_monotonic(ex2);
  EXPECT_TRUE(a.holds);
  EXPECT_TRUE(a.exact);

  auto par = validate_norm_spec(gallery::parallelogram_spec());
  auto b = is_orthant_monotonic(par);
  EXPECT_TRUE(b.exact);
  expect_projection_witness(par, b);
  EXPECT_TRUE(b.witness_vector->isApprox(vec({2, 2})));
  EXPECT_NEAR(par(*b.witness_matrix * vec({2, 2})), 1.5, 1e-14);
  // P_2 on the same point also gives 1.5.
  EXPECT_NEAR(par(coordinate_projection(2, 1) * vec({2, 2})), 1.5, 1e-14);

  EXPECT_TRUE(is_orthant_monotonic(validate_norm_spec(lp_spec(2), 2)).holds);

  auto li = validate_norm_spec(gallery::li_wang_spec());
  auto c = is_orthant_monotonic(li);
  EXPECT_TRUE(c.exact);
  expect_projection_witness(li, c);
  // (2, -1) is a second witness: P_2 doubles its norm.
  EXPECT_EQ(li(vec({2, -1})), 1.0);
  EXPECT_EQ(li(coordinate_projection(2, 1) * vec({2, -1})), 2.0);
}

TEST(DiagIdentity, SpecExamples) {
  auto ex2 = validate_norm_spec(gallery::orthant_monotonic_example_spec());
  auto a = diag_norm_identity_check(ex2, 200);
  EXPECT_TRUE(a.holds);
  EXPECT_EQ(a.checks_run, 202u);

  auto li = validate_norm_spec(gallery::li_wang_spec());
  auto b = diag_norm_identity_check(li, 50);
  ASSERT_FALSE(b.holds);
  ASSERT_TRUE(b.witness_matrix.has_value());
  EXPECT_EQ(*b.witness_matrix, gallery::li_wang_diagonal());
  const Matrix t = gallery::li_wang_scaling();
  EXPECT_NEAR(closed_form::norm_inf(t * gallery::li_wang_diagonal() * t.inverse()), 7.0, 1e-12);
  EXPECT_NEAR(induced_matrix_norm(*b.witness_matrix, li).value, 7.0, 1e-12);

  EXPECT_TRUE(diag_norm_identity_check(validate_norm_spec(lp_spec(kInf), 3), 500).holds);

  try {
    diag_norm_identity_check(validate_norm_spec(lp_spec(3), 2), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoExactPath);
  }
}

// ---- battery invariants ---------------------------------------------------------

TEST(ClassifierProperties, BatteryMatchesExpectationsAndHierarchy) {
  auto battery = gallery::norm_battery();
  for (const auto& e : gallery::extra_diagonal_scalings()) battery.push_back(e);
  for (const auto& m : battery) {
    const auto om = is_orthant_monotonic(m.norm);
    const auto ab = is_absolute(m.norm);
    EXPECT_TRUE(om.exact) << m.name;
    EXPECT_TRUE(ab.exact) << m.name;
    EXPECT_EQ(om.holds, m.expected_orthant_monotonic) << m.name;
    if (ab.holds) {
      EXPECT_TRUE(om.holds) << m.name;
    }
    if (!om.holds) expect_projection_witness(m.norm, om);
    if (!ab.holds) expect_absolute_witness(m.norm, ab);
  }
}

TEST(ClassifierProperties, ExactAgreesWithSampledProjections) {
  for (const auto& m : gallery::norm_battery()) {
    const auto exact = is_orthant_monotonic(m.norm);
    const auto sampled = sampled_orthant_monotonic(m.norm, 10000, 0xC0FFEE);
    EXPECT_EQ(exact.holds, sampled.holds) << m.name;
    if (!sampled.holds) expect_projection_witness(m.norm, sampled);
  }
}

TEST(ClassifierProperties, DiagonalIdentityIffOrthantMonotonic) {
  auto battery = gallery::norm_battery();
  for (const auto& e : gallery::extra_diagonal_scalings()) battery.push_back(e);
  for (const auto& m : battery) {
    const bool om = is_orthant_monotonic(m.norm).holds;
    const auto d = diag_norm_identity_check(m.norm, 300, 77);
    EXPECT_EQ(om, d.holds) << m.name;
    if (!d.holds) {
      const Matrix& w = *d.witness_matrix;
      EXPECT_GT(std::abs(induced_matrix_norm(w, m.norm).value - w.diagonal().maxCoeff()), 1e-9);
    }
  }
}
