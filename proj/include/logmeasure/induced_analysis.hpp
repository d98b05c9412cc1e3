#pragma once

// Induced matrix norms ||A|| = max_{|x|=1} |Ax| and matrix measures
// mu(A) = lim_{h->0+} (||I + hA|| - 1) / h for validated vector norms.
//
// Each result carries the method used:
//   closed_form         lp(1), lp(2), lp(inf) via the classical row/column/eigen formulas
//   scaled_closed_form  |x| = |Tx|_p with p in {1, 2, inf}: formula applied to T A T^-1
//   exact_polyhedral    unit ball is a polytope with known vertices (see below)
//   estimated           anything else; error_bound > 0 and the value is never claimed exact

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "logmeasure/norm_core.hpp"

namespace logmeasure {

enum class Method { ClosedForm, ExactPolyhedral, ScaledClosedForm, Estimated };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed_form";
    case Method::ExactPolyhedral: return "exact_polyhedral";
    case Method::ScaledClosedForm: return "scaled_closed_form";
    case Method::Estimated: return "estimated";
  }
  return "?";
}

struct MeasureResult {
  double value = 0.0;
  Method method = Method::ClosedForm;
  double error_bound = 0.0;        // zero exactly when method != Estimated
  std::optional<double> h_used;    // finite-difference step that settled the value

  bool exact() const { return method != Method::Estimated; }
};

// --------------------------------------------------------------------------
// Classical closed forms for lp(1), lp(2), lp(inf).
// --------------------------------------------------------------------------
namespace closed_form {

inline double norm_1(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }
inline double norm_inf(const Matrix& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

inline double norm_2(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline double measure_1(const Matrix& a) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    double s = a(j, j);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

inline double measure_inf(const Matrix& a) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double s = a(i, i);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

/// Largest eigenvalue of the symmetric part.
inline double measure_2(const Matrix& a) {
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
  return es.eigenvalues().maxCoeff();
}

inline double norm(const Matrix& a, double p) {
  if (p == 1.0) return norm_1(a);
  if (p == 2.0) return norm_2(a);
  return norm_inf(a);
}

inline double measure(const Matrix& a, double p) {
  if (p == 1.0) return measure_1(a);
  if (p == 2.0) return measure_2(a);
  return measure_inf(a);
}

/// A unit vector attaining ||a||_p.
inline Vector norm_maximizer(const Matrix& a, double p) {
  const Eigen::Index n = a.cols();
  if (p == 1.0) {
    Eigen::Index j = 0;
    a.cwiseAbs().colwise().sum().maxCoeff(&j);
    return Vector::Unit(n, j);
  }
  if (p == 2.0) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    return svd.matrixV().col(0);
  }
  Eigen::Index i = 0;
  a.cwiseAbs().rowwise().sum().maxCoeff(&i);
  Vector x(n);
  for (Eigen::Index j = 0; j < n; ++j) x(j) = a(i, j) < 0.0 ? -1.0 : 1.0;
  return x;
}

inline bool has_closed_form(double p) { return p == 1.0 || p == 2.0 || std::isinf(p); }

}  // namespace closed_form

// --------------------------------------------------------------------------
// Multi-start ascent for norms without an exact route.
// --------------------------------------------------------------------------

struct EstimatorOptions {
  int starts = 24;
  std::uint64_t seed = kDefaultSeed;
  bool nonnegative_only = false;  // restrict the search to the nonnegative orthant
  double min_step = 1e-10;
  int max_evals_per_start = 20000;
};

struct NormEstimate {
  double value = 0.0;     // best ratio found; a lower bound on ||A||
  Vector maximizer;       // normalized to |x| = 1
  double spread = 0.0;    // best minus worst local optimum over the starts
};

/// Maximizes |Ax| / |x| by coordinate pattern search from several starts.
/// The returned value is always attained, so it never exceeds ||A||.
inline NormEstimate estimate_induced_norm(const Matrix& a, const ValidatedNorm& norm,
                                          const EstimatorOptions& opts = {},
                                          const std::vector<Vector>& warm_starts = {}) {
  const Eigen::Index n = norm.dim();
  Rng rng(opts.seed);
  auto project = [&](Vector x) {
    if (opts.nonnegative_only) x = x.cwiseMax(0.0);
    return x;
  };
  auto ratio = [&](const Vector& x) {
    const double d = norm(x);
    return d > 0.0 ? norm(a * x) / d : -1.0;
  };

  std::vector<Vector> starts = warm_starts;
  for (Eigen::Index i = 0; i < n; ++i) starts.push_back(Vector::Unit(n, i));
  starts.push_back(Vector::Ones(n));
  while (static_cast<int>(starts.size()) < opts.starts + static_cast<int>(warm_starts.size()))
    starts.push_back(uniform_vector(rng, n, opts.nonnegative_only ? 0.0 : -1.0, 1.0));

  NormEstimate best;
  best.value = -1.0;
  double worst = std::numeric_limits<double>::infinity();
  std::normal_distribution<double> gauss;
  for (const auto& s0 : starts) {
    Vector x = project(s0);
    if (norm(x) == 0.0) continue;
    x /= norm(x);
    double fx = ratio(x);
    double step = 0.25;
    int evals = 0;
    while (step > opts.min_step && evals < opts.max_evals_per_start) {
      bool moved = false;
      auto try_move = [&](const Vector& dir) {
        Vector y = project(x + step * dir);
        const double fy = ratio(y);
        ++evals;
        if (fy > fx) {
          x = y / norm(y);
          fx = fy;
          moved = true;
        }
      };
      for (Eigen::Index i = 0; i < n; ++i) {
        try_move(Vector::Unit(n, i));
        try_move(-Vector::Unit(n, i));
      }
      if (!moved) {
        for (Eigen::Index k = 0; k < 2 * n; ++k) {
          Vector dir(n);
          for (Eigen::Index i = 0; i < n; ++i) dir(i) = gauss(rng);
          try_move(dir / dir.norm());
        }
      }
      if (!moved) step *= 0.5;
    }
    worst = std::min(worst, fx);
    if (fx > best.value) {
      best.value = fx;
      best.maximizer = x;
    }
  }
  best.spread = best.value - worst;
  return best;
}

// --------------------------------------------------------------------------
// Induced matrix norm
// --------------------------------------------------------------------------

namespace detail {

inline void check_square_for(const Matrix& a, const ValidatedNorm& norm) {
  if (a.rows() != a.cols() || a.rows() != norm.dim())
    throw Error(ErrorCode::DimensionMismatch, "matrix is " + std::to_string(a.rows()) + "x" +
                                                  std::to_string(a.cols()) + ", norm has dimension " +
                                                  std::to_string(norm.dim()));
  if (!a.allFinite()) throw Error(ErrorCode::InvalidSpec, "matrix has non-finite entries");
}

struct ScaledLp {
  Matrix t, t_inv;
  double p;
  bool identity;
};

inline std::optional<ScaledLp> closed_form_route(const ValidatedNorm& norm) {
  auto s = norm.as_scaled_lp();
  if (!s || !closed_form::has_closed_form(s->second)) return std::nullopt;
  const bool identity = norm.kind() == ValidatedNorm::Kind::Lp;
  Matrix t_inv = identity ? s->first : accurate_inverse(s->first);
  return ScaledLp{std::move(s->first), std::move(t_inv), s->second, identity};
}

inline double riesz_thorin_bound(const Matrix& m, double p) {
  return std::pow(closed_form::norm_1(m), 1.0 / p) * std::pow(closed_form::norm_inf(m), 1.0 - 1.0 / p);
}

/// max over unit-ball vertices v of |M v|.
inline double vertex_max(const Matrix& m, const ValidatedNorm& norm, const std::vector<Vector>& verts,
                         Vector* argmax = nullptr) {
  double best = 0.0;
  for (const auto& v : verts) {
    const double val = norm(m * v);
    if (val > best || (argmax && argmax->size() == 0)) {
      best = std::max(best, val);
      if (argmax) *argmax = v;
    }
  }
  return best;
}

}  // namespace detail

struct NormWithMaximizer {
  MeasureResult result;
  Vector maximizer;  // |x| = 1 and |A x| = result.value (up to the method's accuracy)
};

inline NormWithMaximizer induced_matrix_norm_with_maximizer(const Matrix& a, const ValidatedNorm& norm,
                                                            const EstimatorOptions& opts = {}) {
  detail::check_square_for(a, norm);
  if (auto cf = detail::closed_form_route(norm)) {
    const Matrix m = cf->identity ? a : Matrix(cf->t * a * cf->t_inv);
    Vector y = closed_form::norm_maximizer(m, cf->p);
    Vector x = cf->identity ? y : Vector(cf->t_inv * y);
    x /= norm(x);
    return {{closed_form::norm(m, cf->p), cf->identity ? Method::ClosedForm : Method::ScaledClosedForm, 0.0, {}}, x};
  }
  if (has_ball_vertices(norm)) {
    Vector arg;
    const double v = detail::vertex_max(a, norm, unit_ball_vertices(norm), &arg);
    return {{v, Method::ExactPolyhedral, 0.0, {}}, arg};
  }
  auto est = estimate_induced_norm(a, norm, opts);
  double bound = 0.0;
  if (auto s = norm.as_scaled_lp()) {
    // Certified gap from the Riesz-Thorin interpolation bound.
    const Matrix m = s->first * a * accurate_inverse(s->first);
    bound = std::max(0.0, detail::riesz_thorin_bound(m, s->second) - est.value);
  } else {
    bound = std::max(est.spread, 1e-6 * (1.0 + est.value));
  }
  bound = std::max(bound, std::numeric_limits<double>::epsilon() * (1.0 + est.value));
  return {{est.value, Method::Estimated, bound, {}}, est.maximizer};
}

inline MeasureResult induced_matrix_norm(const Matrix& a, const ValidatedNorm& norm,
                                         const EstimatorOptions& opts = {}) {
  return induced_matrix_norm_with_maximizer(a, norm, opts).result;
}

/// Forces the vertex route: ||A|| = max over unit-ball vertices of |Av|. Exact
/// because |Ax| is convex in x and the ball is the hull of its vertices.
inline MeasureResult induced_norm_by_vertices(const Matrix& a, const ValidatedNorm& norm) {
  detail::check_square_for(a, norm);
  return {detail::vertex_max(a, norm, unit_ball_vertices(norm)), Method::ExactPolyhedral, 0.0, {}};
}

// --------------------------------------------------------------------------
// Matrix measure
// --------------------------------------------------------------------------

/// (||I + hA|| - 1) / h. Nonincreasing as h decreases, so an upper bound on mu(A).
inline double measure_quotient(const Matrix& a, const ValidatedNorm& norm, double h,
                               const EstimatorOptions& opts = {}) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidSpec, "quotient step must be positive");
  detail::check_square_for(a, norm);
  const Matrix m = Matrix::Identity(a.rows(), a.cols()) + h * a;
  return (induced_matrix_norm(m, norm, opts).value - 1.0) / h;
}

struct QuotientOptions {
  double h_start = 1e-3;
  double h_min = 1e-10;
  double tolerance = 1e-7;  // stop once consecutive quotients differ by at most this (relative to 1+|q|)
};

/// Decreasing-h quotient estimate of mu(A). Reports the quotient at the smallest
/// step reached and, as error bound, the difference of the last two quotients.
inline MeasureResult quotient_estimate(const Matrix& a, const ValidatedNorm& norm, const QuotientOptions& q = {},
                                       const EstimatorOptions& opts = {}) {
  detail::check_square_for(a, norm);
  const Eigen::Index n = a.rows();
  const bool exact_norm = detail::closed_form_route(norm) || has_ball_vertices(norm);
  std::vector<Vector> warm;
  auto quotient = [&](double h) {
    const Matrix m = Matrix::Identity(n, n) + h * a;
    if (exact_norm) return (induced_matrix_norm(m, norm).value - 1.0) / h;
    EstimatorOptions o = opts;
    if (!warm.empty()) o.starts = 4;
    auto est = estimate_induced_norm(m, norm, o, warm);
    warm = {est.maximizer};
    return (est.value - 1.0) / h;
  };
  double h = q.h_start;
  double prev = quotient(h);
  double diff = std::numeric_limits<double>::infinity();
  double cur = prev;
  while (h / 2.0 >= q.h_min) {
    h /= 2.0;
    cur = quotient(h);
    diff = std::abs(prev - cur);
    if (diff <= q.tolerance * (1.0 + std::abs(cur))) break;
    prev = cur;
  }
  const double floor = std::numeric_limits<double>::epsilon() * (1.0 + std::abs(cur));
  return {cur, Method::Estimated, std::max(diff, floor), h};
}

namespace detail {

/// h -> ||I + hA|| = max_v |v + h A v| is convex and piecewise linear with value 1
/// at h = 0, so the quotient is constant below the first breakpoint. Halve h until
/// two consecutive quotients agree; agreement pins the linear piece through
/// (0, 1), whose slope is mu(A).
inline MeasureResult polyhedral_measure(const Matrix& a, const ValidatedNorm& norm, const std::vector<Vector>& verts) {
  std::vector<Vector> av;
  av.reserve(verts.size());
  for (const auto& v : verts) av.push_back(a * v);
  auto quotient = [&](double h) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < verts.size(); ++k) best = std::max(best, norm(verts[k] + h * av[k]));
    return (best - 1.0) / h;
  };
  double h = 1e-3;
  double prev = quotient(h);
  double cur = prev;
  for (int k = 0; k < 40; ++k) {
    cur = quotient(h / 2.0);
    if (std::abs(prev - cur) <= 1e-12 * (1.0 + std::abs(cur))) return {cur, Method::ExactPolyhedral, 0.0, h / 2.0};
    h /= 2.0;
    prev = cur;
  }
  // No linear piece resolved within the step budget; report honestly.
  return {cur, Method::Estimated, std::max(std::abs(prev - cur), 1e-15), h};
}

}  // namespace detail

inline MeasureResult matrix_measure(const Matrix& a, const ValidatedNorm& norm, const EstimatorOptions& opts = {}) {
  detail::check_square_for(a, norm);
  if (auto cf = detail::closed_form_route(norm)) {
    if (cf->identity) return {closed_form::measure(a, cf->p), Method::ClosedForm, 0.0, {}};
    return {closed_form::measure(cf->t * a * cf->t_inv, cf->p), Method::ScaledClosedForm, 0.0, {}};
  }
  if (has_ball_vertices(norm)) return detail::polyhedral_measure(a, norm, unit_ball_vertices(norm));
  return quotient_estimate(a, norm, {.h_start = 1e-2, .h_min = 1e-8, .tolerance = 1e-7}, opts);
}

/// Forces the breakpoint finite-difference route on the unit-ball vertices.
inline MeasureResult measure_by_vertices(const Matrix& a, const ValidatedNorm& norm) {
  detail::check_square_for(a, norm);
  return detail::polyhedral_measure(a, norm, unit_ball_vertices(norm));
}

// --------------------------------------------------------------------------
// Spectrum
// --------------------------------------------------------------------------

inline Eigen::VectorXcd eigenvalues(const Matrix& a) {
  require_square(a, "matrix");
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver did not converge");
  return es.eigenvalues();
}

/// Largest real part over the eigenvalues of A.
inline double spectral_abscissa(const Matrix& a) {
  if (!a.allFinite()) throw Error(ErrorCode::InvalidSpec, "matrix has non-finite entries");
  return eigenvalues(a).real().maxCoeff();
}

struct SandwichReport {
  double abscissa = 0.0;
  double measure = 0.0;
  double norm = 0.0;
  bool pass = false;
};

inline constexpr double kSandwichTol = 1e-9;

/// Checks s(A) <= mu(A) <= ||A||; both quantities must come from exact routes.
inline SandwichReport check_measure_sandwich(const Matrix& a, const ValidatedNorm& norm) {
  const auto mu = matrix_measure(a, norm);
  const auto nm = induced_matrix_norm(a, norm);
  if (!mu.exact() || !nm.exact())
    throw Error(ErrorCode::NoExactPath, "sandwich check needs exact measure and norm for " + norm.describe());
  SandwichReport r;
  r.abscissa = spectral_abscissa(a);
  r.measure = mu.value;
  r.norm = nm.value;
  r.pass = r.abscissa <= r.measure + kSandwichTol && r.measure <= r.norm + kSandwichTol;
  return r;
}

}  // namespace logmeasure
