#pragma once

// Absolute and orthant-monotonic classification of validated norms.
// Polyhedral balls and scaled lp norms with a closed form are decided exactly;
// everything else falls back to seeded sampling and says so.

#include <cstdio>
#include <optional>
#include <string>

#include "logmeasure/induced_analysis.hpp"

namespace logmeasure {

struct Verdict {
  bool holds = false;
  bool exact = false;
  std::optional<Vector> witness_vector;
  std::optional<Matrix> witness_matrix;
  std::size_t checks_run = 0;
  std::string note;
};

inline constexpr int kClassifierSamples = 10000;
inline constexpr double kClassifierTol = 1e-9;

namespace detail {

/// Picks the representative of {x, -x} whose first nonzero entry is positive.
inline Vector canonical_sign(Vector x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) > 0.0) return x;
    if (x(i) < 0.0) return -x;
  }
  return x;
}

inline bool is_diagonal_scaled_lp(const ValidatedNorm& norm) {
  auto s = norm.as_scaled_lp();
  return s && is_diagonal(s->first);
}

inline std::string fmt_vec(const Vector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v(i));
    out += buf;
  }
  return out + ")";
}

}  // namespace detail

/// Sampled test of |x| = |abs(x)|.
inline Verdict sampled_absolute(const ValidatedNorm& norm, int samples = kClassifierSamples,
                                std::uint64_t seed = kDefaultSeed) {
  Rng rng(seed);
  Verdict v{true, false, {}, {}, 0, "sampled |x| = |abs(x)|"};
  for (int k = 0; k < samples; ++k) {
    const Vector x = sample_probe(rng, norm.dim());
    const double a = norm(x), b = norm(x.cwiseAbs());
    ++v.checks_run;
    if (std::abs(a - b) > kClassifierTol * std::max(1.0, std::max(a, b))) {
      v.holds = false;
      v.witness_vector = x;
      v.note = "|x| = " + std::to_string(a) + " but |abs(x)| = " + std::to_string(b);
      return v;
    }
  }
  return v;
}

/// Sampled projection test |P_j x| <= |x|, plus partial shrinking of one coordinate.
inline Verdict sampled_orthant_monotonic(const ValidatedNorm& norm, int samples = kClassifierSamples,
                                         std::uint64_t seed = kDefaultSeed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> shrink(0.0, 1.0);
  const Eigen::Index n = norm.dim();
  Verdict v{true, false, {}, {}, 0, "sampled coordinate projections"};
  for (int k = 0; k < samples; ++k) {
    const Vector x = sample_probe(rng, n);
    const double nx = norm(x);
    for (Eigen::Index j = 0; j < n; ++j) {
      Matrix p = Matrix::Identity(n, n);
      p(j, j) = shrink(rng);
      for (double t : {0.0, p(j, j)}) {
        Vector y = x;
        y(j) *= t;
        ++v.checks_run;
        if (norm(y) > nx * (1.0 + kClassifierTol)) {
          v.holds = false;
          v.witness_vector = x;
          p(j, j) = t;
          v.witness_matrix = p;
          v.note = "|P x| = " + std::to_string(norm(y)) + " > " + std::to_string(nx) + " = |x|";
          return v;
        }
      }
    }
  }
  return v;
}

/// Absolute (equivalently monotonic): |Sx| = |x| for every sign diagonal S.
inline Verdict is_absolute(const ValidatedNorm& norm, std::uint64_t seed = kDefaultSeed) {
  const Eigen::Index n = norm.dim();
  if (norm.kind() == ValidatedNorm::Kind::Lp) return {true, true, {}, {}, 0, "lp norms are absolute"};
  if (detail::is_diagonal_scaled_lp(norm))
    return {true, true, {}, {}, 0, "diagonal scaling of an lp norm is absolute"};

  if (has_ball_vertices(norm)) {
    require_enumerable(n);
    const auto verts = unit_ball_vertices(norm);
    Verdict v{true, true, {}, {}, 0, "all sign flips map unit-ball vertices to the unit sphere"};
    // S and -S act identically on a symmetric ball, so fix S_11 = +1.
    for (std::uint64_t mask = 2; mask < (std::uint64_t{1} << n); mask += 2) {
      const Matrix s = sign_diagonal(n, mask);
      double worst = 0.0;
      std::size_t at = 0;
      for (std::size_t k = 0; k < verts.size(); ++k) {
        const double dev = std::abs(norm(s * verts[k]) - 1.0);
        ++v.checks_run;
        if (dev > worst) {
          worst = dev;
          at = k;
        }
      }
      if (worst > kClassifierTol) {
        const Vector a = verts[at], b = s * verts[at];
        const Vector x = std::abs(norm(b) - norm(b.cwiseAbs())) > kClassifierTol ? b : a;
        v.holds = false;
        v.witness_vector = detail::canonical_sign(x);
        v.witness_matrix = s;
        v.note = "|x| = " + std::to_string(norm(x)) + " but |abs(x)| = " + std::to_string(norm(x.cwiseAbs()));
        return v;
      }
    }
    return v;
  }

  if (auto cf = detail::closed_form_route(norm)) {
    require_enumerable(n);
    Verdict v{true, true, {}, {}, 0, "closed-form ||S|| = 1 for every sign diagonal S"};
    for (std::uint64_t mask = 2; mask < (std::uint64_t{1} << n); mask += 2) {
      const Matrix s = sign_diagonal(n, mask);
      auto r = induced_matrix_norm_with_maximizer(s, norm);
      ++v.checks_run;
      if (r.result.value > 1.0 + kClassifierTol) {
        const Vector a = r.maximizer, b = s * r.maximizer;
        const Vector x = std::abs(norm(b) - norm(b.cwiseAbs())) > kClassifierTol ? b : a;
        v.holds = false;
        v.witness_vector = detail::canonical_sign(x);
        v.witness_matrix = s;
        v.note = "||S|| = " + std::to_string(r.result.value) + " > 1";
        return v;
      }
    }
    return v;
  }

  return sampled_absolute(norm, kClassifierSamples, seed);
}

/// Orthant-monotonic: every coordinate projection P_j is nonexpansive.
inline Verdict is_orthant_monotonic(const ValidatedNorm& norm, std::uint64_t seed = kDefaultSeed) {
  const Eigen::Index n = norm.dim();
  if (norm.kind() == ValidatedNorm::Kind::Lp) return {true, true, {}, {}, 0, "lp norms are absolute"};
  if (detail::is_diagonal_scaled_lp(norm))
    return {true, true, {}, {}, 0, "diagonal scaling of an lp norm is absolute"};

  const bool vertices = has_ball_vertices(norm);
  if (!vertices && !detail::closed_form_route(norm)) return sampled_orthant_monotonic(norm, kClassifierSamples, seed);

  Verdict v{true, true, {}, {}, 0, "||P_j|| <= 1 for every coordinate projection"};
  std::vector<Vector> verts;
  if (vertices) verts = unit_ball_vertices(norm);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Matrix p = coordinate_projection(n, j);
    double value = 0.0;
    Vector arg;
    if (vertices) {
      value = detail::vertex_max(p, norm, verts, &arg);
    } else {
      auto r = induced_matrix_norm_with_maximizer(p, norm);
      value = r.result.value;
      arg = r.maximizer;
    }
    ++v.checks_run;
    if (value > 1.0 + kClassifierTol) {
      const Vector x = detail::canonical_sign(arg);
      v.holds = false;
      v.witness_vector = x;
      v.witness_matrix = p;
      v.note = "|P_" + std::to_string(j + 1) + " x| = " + std::to_string(norm(p * x)) + " > " +
               std::to_string(norm(x)) + " = |x| at x = " + detail::fmt_vec(x);
      return v;
    }
  }
  return v;
}

/// Checks ||D|| = max_i d_ii on diag(1..n), I and `sample_count` random
/// nonnegative diagonals. Needs an exact induced-norm route.
inline Verdict diag_norm_identity_check(const ValidatedNorm& norm, int sample_count = 1000,
                                        std::uint64_t seed = kDefaultSeed) {
  const Eigen::Index n = norm.dim();
  Rng rng(seed);
  std::vector<Matrix> candidates;
  candidates.push_back(diag(Vector::LinSpaced(n, 1.0, static_cast<double>(n))));
  candidates.push_back(Matrix::Identity(n, n));
  for (int k = 0; k < sample_count; ++k) candidates.push_back(random_nonnegative_diagonal(rng, n));

  Verdict v{true, true, {}, {}, 0, "||D|| = max d_ii on every tested nonnegative diagonal"};
  for (const auto& d : candidates) {
    auto r = induced_matrix_norm_with_maximizer(d, norm);
    if (!r.result.exact())
      throw Error(ErrorCode::NoExactPath, "diagonal identity check needs an exact induced norm for " + norm.describe());
    ++v.checks_run;
    const double expected = d.diagonal().maxCoeff();
    if (std::abs(r.result.value - expected) > kClassifierTol * std::max(1.0, expected)) {
      v.holds = false;
      v.witness_matrix = d;
      v.witness_vector = detail::canonical_sign(r.maximizer);
      v.note = "||D|| = " + std::to_string(r.result.value) + " but max d_ii = " + std::to_string(expected);
      return v;
    }
  }
  return v;
}

}  // namespace logmeasure
