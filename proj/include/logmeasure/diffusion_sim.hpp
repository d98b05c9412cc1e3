#pragma once

// Two copies of x' = Ax coupled through a diagonal diffusion term:
//   x' = Ax + D(z - x),  z' = Az + D(x - z).
// With p = [x + z; z - x] the system splits into p1' = A p1 and p2' = (A - 2D) p2,
// so the copies synchronize exactly when A - 2D is Hurwitz.

#include <complex>
#include <limits>
#include <vector>

#include "logmeasure/stability_lab.hpp"

namespace logmeasure {

struct CoupledSystem {
  Matrix A;
  Matrix D;
  Matrix block;  // [[A - D, D], [D, A - D]]
};

inline constexpr double kSimilarityTol = 1e-10;
inline constexpr double kDivergenceCutoff = 1e6;
inline constexpr double kStepGuard = 0.1;

/// T = [[I, I], [-I, I]] and its inverse 0.5 [[I, -I], [I, I]].
inline std::pair<Matrix, Matrix> decoupling_transform(Eigen::Index n) {
  const Matrix id = Matrix::Identity(n, n);
  Matrix t(2 * n, 2 * n), ti(2 * n, 2 * n);
  t << id, id, -id, id;
  ti << 0.5 * id, -0.5 * id, 0.5 * id, 0.5 * id;
  return {t, ti};
}

inline CoupledSystem build_coupled(const Matrix& a, const Matrix& d) {
  require_square(a, "A");
  require_finite(a, "A");
  require_finite(d, "D");
  if (d.rows() != a.rows() || d.cols() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "A and D differ in size");
  if (!is_nonnegative_diagonal(d))
    throw Error(ErrorCode::NotNonnegativeDiagonal, "coupling matrix must be diagonal with nonnegative entries");
  const Eigen::Index n = a.rows();
  CoupledSystem s{a, d, Matrix(2 * n, 2 * n)};
  s.block << a - d, d, d, a - d;

  const auto [t, ti] = decoupling_transform(n);
  const Matrix p = t * s.block * ti;
  Matrix expected = Matrix::Zero(2 * n, 2 * n);
  expected.topLeftCorner(n, n) = a;
  expected.bottomRightCorner(n, n) = a - 2.0 * d;
  const double scale = std::max(1.0, s.block.cwiseAbs().maxCoeff());
  if ((p - expected).cwiseAbs().maxCoeff() > kSimilarityTol * scale)
    throw Error(ErrorCode::InconsistentOracles, "similarity transform did not decouple the block system");
  return s;
}

/// The two diagonal blocks (A, A - 2D) of the decoupled system.
inline std::pair<Matrix, Matrix> decoupled_blocks(const CoupledSystem& s) { return {s.A, s.A - 2.0 * s.D}; }

/// Synchronization criterion: A - 2D Hurwitz. A itself must be Hurwitz.
inline bool sync_verdict(const Matrix& a, const Matrix& d, double tol = kHurwitzTol) {
  build_coupled(a, d);
  bool base = false;
  try {
    base = is_hurwitz(a, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Marginal) throw;
  }
  if (!base) throw Error(ErrorCode::BaseNotHurwitz, "the synchronization criterion assumes a Hurwitz A");
  return is_hurwitz(a - 2.0 * d, tol);
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;  // [x; z]
  std::vector<double> sync_metric;
  bool diverged = false;  // stopped early at the divergence cutoff
};

inline Vector rk4_step(const Matrix& m, const Vector& y, double h) {
  const Vector k1 = m * y;
  const Vector k2 = m * (y + 0.5 * h * k1);
  const Vector k3 = m * (y + 0.5 * h * k2);
  const Vector k4 = m * (y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step classical RK4 on the 2n-dimensional block system. The horizon is
/// split into ceil(horizon / dt) equal steps.
inline Trajectory simulate(const Matrix& a, const Matrix& d, const Vector& x0, const Vector& z0, double horizon,
                           double dt) {
  const auto sys = build_coupled(a, d);
  const Eigen::Index n = a.rows();
  if (x0.size() != n || z0.size() != n) throw Error(ErrorCode::DimensionMismatch, "initial state has wrong size");
  if (!(horizon > 0.0) || !(dt > 0.0) || !std::isfinite(horizon) || !std::isfinite(dt))
    throw Error(ErrorCode::InvalidSpec, "horizon and dt must be positive");
  if (dt > horizon) throw Error(ErrorCode::InvalidSpec, "dt exceeds the horizon");
  const double guard = dt * closed_form::norm_inf(sys.block);
  if (guard > kStepGuard * (1.0 + 1e-12))
    throw Error(ErrorCode::StepTooLarge,
                "dt * ||block||_inf = " + std::to_string(guard) + " exceeds " + std::to_string(kStepGuard));

  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / static_cast<double>(steps);
  Trajectory tr;
  tr.times.reserve(static_cast<std::size_t>(steps) + 1);
  tr.states.reserve(static_cast<std::size_t>(steps) + 1);
  tr.sync_metric.reserve(static_cast<std::size_t>(steps) + 1);
  Vector y(2 * n);
  y << x0, z0;
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.states.push_back(y);
    tr.sync_metric.push_back((y.head(n) - y.tail(n)).norm());
  };
  record(0.0);
  for (long k = 1; k <= steps; ++k) {
    y = rk4_step(sys.block, y, h);
    record(k == steps ? horizon : static_cast<double>(k) * h);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kDivergenceCutoff) {
      tr.diverged = true;
      break;
    }
  }
  return tr;
}

/// Average slope of log(sync_metric) over the second half of the recorded run.
inline double terminal_log_slope(const Trajectory& tr) {
  if (tr.times.size() < 3) throw Error(ErrorCode::InvalidSpec, "trajectory too short");
  const double t_end = tr.times.back();
  std::size_t mid = 0;
  while (tr.times[mid] < 0.5 * t_end) ++mid;
  const double a = std::max(tr.sync_metric[mid], std::numeric_limits<double>::min());
  const double b = std::max(tr.sync_metric.back(), std::numeric_limits<double>::min());
  return (std::log(b) - std::log(a)) / (t_end - tr.times[mid]);
}

// --------------------------------------------------------------------------
// Eigenvalue split
// --------------------------------------------------------------------------

namespace detail {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
inline std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

}  // namespace detail

/// Largest distance between matched eigenvalues of the block and of
/// diag(A, A - 2D), using a minimum-total-distance assignment.
inline double eigen_split_error(const CoupledSystem& s) {
  const Eigen::VectorXcd big = eigenvalues(s.block);
  const auto [b1, b2] = decoupled_blocks(s);
  const Eigen::VectorXcd e1 = eigenvalues(b1), e2 = eigenvalues(b2);
  Eigen::VectorXcd small(e1.size() + e2.size());
  small << e1, e2;
  const Eigen::Index m = big.size();
  Matrix cost(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = std::abs(big(i) - small(j));
  const auto assign = detail::hungarian(cost);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) worst = std::max(worst, cost(i, assign[static_cast<std::size_t>(i)]));
  return worst;
}

}  // namespace logmeasure
