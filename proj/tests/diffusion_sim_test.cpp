#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "logmeasure/diffusion_sim.hpp"
#include "logmeasure/gallery.hpp"

using namespace logmeasure;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix random_hurwitz(Rng& rng, Eigen::Index n) {
  Matrix a = uniform_matrix(rng, n, n, -2, 2);
  const double s = spectral_abscissa(a);
  std::uniform_real_distribution<double> margin(0.05, 1.0);
  return a - (s + margin(rng)) * Matrix::Identity(n, n);
}

// Brute-force oracle for small matchings: best bottleneck over all permutations.
double brute_force_split(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  std::vector<int> perm(static_cast<std::size_t>(a.size()));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  double best = 1e300;
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      worst = std::max(worst, std::abs(a(static_cast<Eigen::Index>(i)) - b(perm[i])));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(BuildCoupled, SpecExamples) {
  const Matrix a = gallery::intro_matrix();
  auto s0 = build_coupled(a, Matrix::Zero(2, 2));
  Matrix expected = Matrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = a;
  expected.bottomRightCorner(2, 2) = a;
  EXPECT_EQ(s0.block, expected);
  auto [b1, b2] = decoupled_blocks(build_coupled(a, Matrix::Identity(2, 2)));
  EXPECT_EQ(b1, a);
  EXPECT_EQ(b2, a - 2 * Matrix::Identity(2, 2));

  Matrix sa(1, 1), sd(1, 1);
  sa << -1;
  sd << 3;
  auto s = build_coupled(sa, sd);
  const Vector ev = eigenvalues(s.block).real();
  std::vector<double> sorted(ev.data(), ev.data() + ev.size());
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NEAR(sorted[0], -7.0, 1e-14);
  EXPECT_NEAR(sorted[1], -1.0, 1e-14);
}

TEST(BuildCoupled, Errors) {
  try {
    build_coupled(gallery::intro_matrix(), mat2(1, 0, 0, -1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNonnegativeDiagonal);
  }
  EXPECT_THROW(build_coupled(gallery::intro_matrix(), mat2(1, 1, 0, 1)), Error);
  EXPECT_THROW(build_coupled(gallery::intro_matrix(), Matrix::Identity(3, 3)), Error);
}

TEST(SyncVerdict, SpecExamples) {
  const Matrix a = gallery::intro_matrix();
  EXPECT_FALSE(sync_verdict(a, mat2(0, 0, 0, 1)));
  EXPECT_EQ((a - 2 * mat2(0, 0, 0, 1)).determinant(), -1.0);
  EXPECT_TRUE(sync_verdict(a, Matrix::Identity(2, 2)));
  const Matrix b = a - 2 * Matrix::Identity(2, 2);
  EXPECT_EQ(b.trace(), -5.0);
  EXPECT_NEAR(b.determinant(), 7.0, 1e-14);
  EXPECT_TRUE(sync_verdict(gallery::stable_intro_matrix(), Matrix::Zero(2, 2)));
  try {
    sync_verdict(mat2(1, 0, 0, -1), Matrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BaseNotHurwitz);
  }
}

TEST(Simulate, SpecExamples) {
  const Matrix a = gallery::intro_matrix();
  auto decay = simulate(a, Matrix::Identity(2, 2), vec2(1, 0), vec2(0, 1), 30, 0.01);
  EXPECT_FALSE(decay.diverged);
  EXPECT_LT(decay.sync_metric.back(), 1e-6);
  EXPECT_EQ(decay.times.back(), 30.0);
  EXPECT_EQ(decay.times.size(), decay.sync_metric.size());
  for (std::size_t k = 1; k < decay.times.size(); ++k) ASSERT_GT(decay.times[k], decay.times[k - 1]);

  auto grow = simulate(a, mat2(0, 0, 0, 2), vec2(1, 0), vec2(0, 1), 30, 0.01);
  EXPECT_GT(*std::max_element(grow.sync_metric.begin(), grow.sync_metric.end()), 1e3);

  auto same = simulate(a, Matrix::Identity(2, 2), vec2(0.3, -0.7), vec2(0.3, -0.7), 30, 0.01);
  EXPECT_LE(*std::max_element(same.sync_metric.begin(), same.sync_metric.end()), 1e-12);
}

TEST(Simulate, Guards) {
  const Matrix a = gallery::intro_matrix();
  try {
    simulate(a, Matrix::Identity(2, 2), vec2(1, 0), vec2(0, 1), 30, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
  }
  EXPECT_THROW(simulate(a, Matrix::Identity(2, 2), vec2(1, 0), vec2(0, 1), 0.001, 0.01), Error);
  EXPECT_THROW(simulate(a, Matrix::Identity(2, 2), vec2(1, 0), vec2(0, 1), -1, 0.01), Error);
}

TEST(Simulate, MatchesMatrixExponential) {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = random_hurwitz(rng, 3);
    const Matrix d = diag(uniform_vector(rng, 3, 0, 2));
    const Vector x0 = uniform_vector(rng, 3, -1, 1), z0 = uniform_vector(rng, 3, -1, 1);
    auto sys = build_coupled(a, d);
    const double dt = 0.02 / std::max(1.0, closed_form::norm_inf(sys.block));
    auto tr = simulate(a, d, x0, z0, 2.0, dt);
    Vector y0(6);
    y0 << x0, z0;
    const Vector ref = (2.0 * sys.block).exp() * y0;
    EXPECT_LT((tr.states.back() - ref).norm(), 1e-8);
  }
}

TEST(Simulate, FourthOrderConvergence) {
  Rng rng(12);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index n = 2 + k % 3;
    const Matrix a = random_hurwitz(rng, n);
    const Matrix d = diag(uniform_vector(rng, n, 0, 1));
    const Vector x0 = uniform_vector(rng, n, -1, 1), z0 = uniform_vector(rng, n, -1, 1);
    auto sys = build_coupled(a, d);
    Vector y0(2 * n);
    y0 << x0, z0;
    const double horizon = 1.0;
    const Vector ref = (horizon * sys.block).exp() * y0;
    const double dt = 0.1 / closed_form::norm_inf(sys.block);
    const double e1 = (simulate(a, d, x0, z0, horizon, dt).states.back() - ref).norm();
    const double e2 = (simulate(a, d, x0, z0, horizon, dt / 2).states.back() - ref).norm();
    const double ratio = e1 / e2;
    EXPECT_GE(ratio, 12.0) << "e1=" << e1 << " e2=" << e2;
    EXPECT_LE(ratio, 20.0) << "e1=" << e1 << " e2=" << e2;
  }
}

TEST(Simulate, CriterionAgreesWithSimulation) {
  Rng rng(13);
  int checked = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 2 + k % 3;
    const Matrix a = random_hurwitz(rng, n);
    const Matrix d = diag(uniform_vector(rng, n, 0, 3));
    const double s = spectral_abscissa(a - 2 * d);
    if (std::abs(s) < 1e-3) continue;
    ++checked;
    const bool verdict = sync_verdict(a, d);
    const Vector v = uniform_vector(rng, n, -1, 1);
    auto sys = build_coupled(a, d);
    const double horizon = std::clamp(30.0 / std::abs(s), 10.0, 3000.0);
    const double dt = 0.1 / closed_form::norm_inf(sys.block);
    // x0 = v, z0 = -v keeps the trajectory on the difference subspace.
    auto tr = simulate(a, d, v, -v, horizon, dt);
    const double slope = terminal_log_slope(tr);
    EXPECT_EQ(slope < 0.0, verdict) << "s=" << s << " slope=" << slope;
  }
  EXPECT_GT(checked, 80);
}

TEST(EigenSplit, RandomInstances) {
  Rng rng(14);
  std::uniform_int_distribution<int> dim(2, 5);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index n = dim(rng);
    auto sys = build_coupled(uniform_matrix(rng, n, n, -3, 3), diag(uniform_vector(rng, n, 0, 3)));
    EXPECT_LT(eigen_split_error(sys), 1e-8);
  }
}

TEST(EigenSplit, HungarianMatchesBruteForce) {
  Rng rng(15);
  for (int k = 0; k < 50; ++k) {
    const Matrix a = uniform_matrix(rng, 3, 3, -2, 2);
    const Matrix d = diag(uniform_vector(rng, 3, 0, 2));
    auto sys = build_coupled(a, d);
    const Eigen::VectorXcd big = eigenvalues(sys.block);
    Eigen::VectorXcd small(6);
    small << eigenvalues(a), eigenvalues(a - 2 * d);
    // Minimum-sum and bottleneck matchings coincide here because the errors are
    // rounding-sized and eigenvalues are well separated.
    EXPECT_NEAR(eigen_split_error(sys), brute_force_split(big, small), 1e-9);
  }
}
