#pragma once

// Admissible matrix measures and additive D-stability.
//
// A measure is admissible when mu(-D) <= 0 for every nonnegative diagonal D.
// mu(-D) is convex and positively homogeneous in D, so it is nonpositive on the
// whole cone as soon as it is nonpositive on the 0/1 diagonals; with an exact
// measure that makes the admissibility check below a complete procedure.

#include <optional>
#include <string>
#include <vector>

#include "logmeasure/norm_classifier.hpp"

namespace logmeasure {

inline constexpr double kHurwitzTol = 1e-9;
inline constexpr double kAdmissibilityTol = 1e-9;
inline constexpr double kCertificateMargin = 1e-9;
inline constexpr double kFalsifierThreshold = 1e-6;

/// True iff every eigenvalue has real part below -tol. Throws Marginal when
/// the spectral abscissa lies in [-tol, tol].
inline bool is_hurwitz(const Matrix& a, double tol = kHurwitzTol) {
  const double s = spectral_abscissa(a);
  if (std::abs(s) <= tol)
    throw Error(ErrorCode::Marginal, "spectral abscissa " + std::to_string(s) + " is within " + std::to_string(tol) +
                                         " of zero");
  return s < -tol;
}

// --------------------------------------------------------------------------
// Admissibility
// --------------------------------------------------------------------------

struct ConditionResult {
  int index = 0;
  std::string statement;
  bool holds = false;
  bool exact = false;
  std::size_t checks = 0;
  std::optional<Matrix> witness;  // failing diagonal D
  double witness_value = 0.0;     // the offending measure value
  std::string note;
};

struct AdmissibilityVerdict {
  bool admissible = false;
  bool exact = false;
  std::optional<Matrix> counterexample_D;
  double counterexample_value = 0.0;  // mu(-counterexample_D)
  std::vector<ConditionResult> equivalence_trace;
};

namespace detail {

struct DiagonalCandidates {
  std::vector<Matrix> list;
  bool covers_unit_cube = false;  // every 0/1 diagonal is present
};

/// diag(1..n) first, then every 0/1 diagonal (when enumerable), then `budget`
/// random log-uniform nonnegative diagonals.
inline DiagonalCandidates admissibility_candidates(Eigen::Index n, int budget, Rng& rng) {
  DiagonalCandidates c;
  c.list.push_back(diag(Vector::LinSpaced(n, 1.0, static_cast<double>(n))));
  if (n <= 12) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) c.list.push_back(subset_diagonal(n, mask));
    c.covers_unit_cube = true;
  }
  for (int k = 0; k < budget; ++k) c.list.push_back(random_nonnegative_diagonal(rng, n));
  return c;
}

inline ConditionResult condition1(const ValidatedNorm& norm, std::uint64_t seed) {
  const Verdict v = is_orthant_monotonic(norm, seed);
  ConditionResult r{1, "norm is orthant-monotonic", v.holds, v.exact, v.checks_run, v.witness_matrix, 0.0, v.note};
  return r;
}

}  // namespace detail

/// Decides admissibility through orthant-monotonicity and cross-checks the
/// three equivalent conditions on diagonal matrices:
///   2. mu(-D) <= 0,  3. mu(D) = max d_ii,  4. mu(-I - D) < 0.
/// Any disagreement throws InconsistentOracles.
inline AdmissibilityVerdict is_admissible_measure(const ValidatedNorm& norm, int budget = 1000,
                                                  std::uint64_t seed = kDefaultSeed) {
  const Eigen::Index n = norm.dim();
  const Matrix id = Matrix::Identity(n, n);
  Rng rng(seed);
  const auto cand = detail::admissibility_candidates(n, budget, rng);

  AdmissibilityVerdict out;
  auto c1 = detail::condition1(norm, seed);

  ConditionResult c2{2, "mu(-D) <= 0 for every nonnegative diagonal D", true, true, 0, {}, 0.0, ""};
  ConditionResult c3{3, "mu(D) = max_i d_ii for every nonnegative diagonal D", true, true, 0, {}, 0.0, ""};
  ConditionResult c4{4, "some A has mu(A - D) < 0 for every D (tested with A = -I)", true, true, 0, {}, 0.0, ""};

  auto mark = [](ConditionResult& c, const Matrix& d, double value) {
    if (!c.holds) return;
    c.holds = false;
    c.witness = d;
    c.witness_value = value;
  };

  for (const auto& d : cand.list) {
    const auto neg = matrix_measure(-d, norm);
    c2.exact = c2.exact && neg.exact();
    ++c2.checks;
    if (neg.value - neg.error_bound > kAdmissibilityTol) mark(c2, d, neg.value);

    // Condition 3 on D and on its complement max(D) I - D.
    const double top = d.diagonal().maxCoeff();
    for (const Matrix& e : {d, Matrix(top * id - d)}) {
      const auto pos = matrix_measure(e, norm);
      c3.exact = c3.exact && pos.exact();
      ++c3.checks;
      const double want = e.diagonal().maxCoeff();
      if (std::abs(pos.value - want) - pos.error_bound > kAdmissibilityTol * std::max(1.0, std::abs(want)))
        mark(c3, e, pos.value);
    }

    // Condition 4 with A = -I on D and a few magnified copies.
    for (double scale : {1.0, 10.0, 100.0, 1e3, 1e4}) {
      const Matrix e = scale * d;
      const auto m = matrix_measure(-id - e, norm);
      c4.exact = c4.exact && m.exact();
      ++c4.checks;
      if (m.value - m.error_bound >= 0.0) mark(c4, e, m.value);
    }
  }
  // Without the full 0/1 enumeration the diagonal conditions are only sampled.
  if (!cand.covers_unit_cube) c2.exact = c3.exact = c4.exact = false;
  c2.note = c2.exact ? "complete: every 0/1 diagonal checked with an exact measure" : "sampled";
  c3.note = c4.note = c2.exact ? "exact measure on candidate diagonals" : "sampled";

  out.admissible = c1.holds;
  out.exact = c1.exact && c2.exact;
  if (!c2.holds) {
    out.counterexample_D = c2.witness;
    out.counterexample_value = c2.witness_value;
  }
  out.equivalence_trace = {c1, c2, c3, c4};

  const bool agree = c1.holds == c2.holds && c2.holds == c3.holds && c3.holds == c4.holds;
  if (!agree) {
    std::string msg = "admissibility conditions disagree for " + norm.describe() + ":";
    for (const auto& c : out.equivalence_trace)
      msg += " [" + std::to_string(c.index) + "]=" + (c.holds ? "true" : "false");
    throw Error(ErrorCode::InconsistentOracles, msg);
  }
  return out;
}

struct DiagonalMeasure {
  double value = 0.0;     // mu(D)
  double negated = 0.0;   // mu(-D)
  bool admissible = false;
  bool identity_ok = false;  // mu(D) = max d_ii and mu(-D) = -min d_ii to 1e-9
  std::string warning;
};

/// mu(D) for a diagonal D (entries of any sign). For non-admissible norms the
/// value is still returned, with a warning instead of an exception.
inline DiagonalMeasure measure_of_diagonal(const ValidatedNorm& norm, const Matrix& d) {
  if (!is_diagonal(d)) throw Error(ErrorCode::InvalidSpec, "measure_of_diagonal expects a diagonal matrix");
  DiagonalMeasure r;
  r.value = matrix_measure(d, norm).value;
  r.negated = matrix_measure(-d, norm).value;
  r.admissible = is_orthant_monotonic(norm).holds;
  const double hi = d.diagonal().maxCoeff(), lo = d.diagonal().minCoeff();
  const double scale = std::max({1.0, std::abs(hi), std::abs(lo)});
  r.identity_ok = std::abs(r.value - hi) <= kAdmissibilityTol * scale && std::abs(r.negated + lo) <= kAdmissibilityTol * scale;
  if (!r.admissible) r.warning = "NotAdmissible: the identity mu(D) = max d_ii is not guaranteed for " + norm.describe();
  if (r.admissible && !r.identity_ok)
    throw Error(ErrorCode::InconsistentOracles, "admissible norm violates mu(D) = max d_ii");
  return r;
}

struct PerturbationBounds {
  double lo = 0.0;        // mu(A) - max d_ii
  double hi = 0.0;        // mu(A) - min d_ii
  double mu_exact = 0.0;  // mu(A - D)
};

inline constexpr double kBoundsTol = 1e-9;

/// mu(A) - max d_ii <= mu(A - D) <= mu(A) - min d_ii for orthant-monotonic norms.
inline PerturbationBounds perturbation_bounds(const Matrix& a, const Matrix& d, const ValidatedNorm& norm) {
  if (!is_diagonal(d)) throw Error(ErrorCode::InvalidSpec, "perturbation_bounds expects a diagonal D");
  if (d.rows() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "A and D differ in size");
  if (!is_orthant_monotonic(norm).holds)
    throw Error(ErrorCode::NotOrthantMonotonic, norm.describe() + " is not orthant-monotonic");
  const auto mu_a = matrix_measure(a, norm);
  const auto mu_ad = matrix_measure(a - d, norm);
  if (!mu_a.exact() || !mu_ad.exact())
    throw Error(ErrorCode::NoExactPath, "perturbation bounds need an exact measure for " + norm.describe());
  PerturbationBounds b{mu_a.value - d.diagonal().maxCoeff(), mu_a.value - d.diagonal().minCoeff(), mu_ad.value};
  if (b.mu_exact < b.lo - kBoundsTol || b.mu_exact > b.hi + kBoundsTol)
    throw Error(ErrorCode::InconsistentOracles, "mu(A - D) = " + std::to_string(b.mu_exact) + " outside [" +
                                                    std::to_string(b.lo) + ", " + std::to_string(b.hi) + "]");
  return b;
}

struct DiagonalNegativityReport {
  double mu = 0.0;
  bool applies = false;  // mu(A) < 0
  bool diag_ok = true;   // every a_ii < 0 whenever mu(A) < 0
};

/// Under an orthant-monotonic norm, mu(A) < 0 forces every a_ii < 0.
inline DiagonalNegativityReport diagonal_negativity_check(const Matrix& a, const ValidatedNorm& norm) {
  if (!is_orthant_monotonic(norm).holds)
    throw Error(ErrorCode::NotOrthantMonotonic, norm.describe() + " is not orthant-monotonic");
  const auto mu = matrix_measure(a, norm);
  if (!mu.exact()) throw Error(ErrorCode::NoExactPath, "diagonal negativity needs an exact measure");
  DiagonalNegativityReport r;
  r.mu = mu.value;
  r.applies = mu.value < 0.0;
  if (r.applies) r.diag_ok = (a.diagonal().array() < 0.0).all();
  return r;
}

// --------------------------------------------------------------------------
// Additive D-stability
// --------------------------------------------------------------------------

/// Exact test for 2x2: tr < 0, det > 0 and both diagonal entries <= 0.
inline bool additive_d_stable_2x2(const Matrix& a) {
  if (a.rows() != 2 || a.cols() != 2)
    throw Error(ErrorCode::WrongDimension, "additive_d_stable_2x2 needs a 2x2 matrix");
  require_finite(a, "matrix");
  const double tr = a(0, 0) + a(1, 1);
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return tr < 0.0 && det > 0.0 && a(0, 0) <= 0.0 && a(1, 1) <= 0.0;
}

/// For Metzler A, additive D-stability is plain Hurwitz stability.
inline bool additive_d_stable_metzler(const Matrix& a, double tol = kHurwitzTol) {
  require_square(a, "matrix");
  if (!is_metzler(a)) throw Error(ErrorCode::NotMetzler, "matrix has a negative off-diagonal entry");
  return is_hurwitz(a, tol);
}

struct NamedNorm {
  std::string name;
  ValidatedNorm norm;
};

/// l1, l2, l_inf and `scalings` random positive diagonal scalings of each.
inline std::vector<NamedNorm> default_certificate_family(Eigen::Index n, int scalings = 16,
                                                         std::uint64_t seed = kDefaultSeed) {
  std::vector<NamedNorm> fam;
  const std::pair<const char*, double> bases[] = {{"l1", 1.0}, {"l2", 2.0}, {"linf", kInf}};
  for (const auto& [name, p] : bases) fam.push_back({name, validate_norm_spec(lp_spec(p), n, seed)});
  Rng rng(seed);
  std::uniform_real_distribution<double> logt(std::log(0.1), std::log(10.0));
  for (int k = 0; k < scalings; ++k) {
    Vector t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = std::exp(logt(rng));
    for (const auto& [name, p] : bases)
      fam.push_back({std::string(name) + "_diag#" + std::to_string(k), validate_norm_spec(scaled_spec(diag(t), lp_spec(p)), n, seed)});
  }
  return fam;
}

enum class StabilityVerdict { Stable, Unstable, Unknown };
enum class StabilityMethod { Exact2x2, Metzler, AdmissibleCertificate, Falsified, BudgetExhausted };

constexpr std::string_view to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::Unstable: return "unstable";
    case StabilityVerdict::Unknown: return "unknown";
  }
  return "?";
}

constexpr std::string_view to_string(StabilityMethod m) {
  switch (m) {
    case StabilityMethod::Exact2x2: return "exact_2x2";
    case StabilityMethod::Metzler: return "metzler";
    case StabilityMethod::AdmissibleCertificate: return "admissible_certificate";
    case StabilityMethod::Falsified: return "falsified";
    case StabilityMethod::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

struct Certificate {
  std::string name;
  NormSpec spec;
  double mu = 0.0;  // mu(A) under the certificate norm, < 0
};

struct Counterexample {
  Matrix D;
  double abscissa = 0.0;  // spectral abscissa of A - D
};

struct DStabilityReport {
  StabilityVerdict verdict = StabilityVerdict::Unknown;
  StabilityMethod method = StabilityMethod::BudgetExhausted;
  std::optional<Certificate> certificate;
  std::optional<Counterexample> counterexample;
  std::string note;
};

/// Looks for an admissible member with mu(A) < 0; mu(A - D) <= mu(A) + mu(-D) <= mu(A)
/// then proves A - D Hurwitz for every nonnegative diagonal D.
inline DStabilityReport certify_additive_d_stability(const Matrix& a, const std::vector<NamedNorm>& family,
                                                     int admissibility_budget = 16,
                                                     std::uint64_t seed = kDefaultSeed) {
  require_square(a, "matrix");
  require_finite(a, "matrix");
  DStabilityReport r;
  for (const auto& m : family) {
    const auto mu = matrix_measure(a, m.norm);
    if (!mu.exact() || mu.value >= -kCertificateMargin) continue;
    if (!is_admissible_measure(m.norm, admissibility_budget, seed).admissible) continue;
    r.verdict = StabilityVerdict::Stable;
    r.method = StabilityMethod::AdmissibleCertificate;
    r.certificate = Certificate{m.name, m.norm.spec(), mu.value};
    return r;
  }
  r.note = "no admissible family member has mu(A) < 0";
  return r;
}

inline DStabilityReport certify_additive_d_stability(const Matrix& a, int scalings = 16,
                                                     std::uint64_t seed = kDefaultSeed) {
  return certify_additive_d_stability(a, default_certificate_family(a.rows(), scalings, seed), 16, seed);
}

/// Pattern search for a nonnegative diagonal D making A - D unstable. Starts
/// from D = 0 and scaled coordinate diagonals, then random points in
/// [0, d_max]^n with d_max = 10 (1 + ||A||_inf). `budget` counts abscissa
/// evaluations. Returns the first D with abscissa above 1e-6.
inline std::optional<Counterexample> falsify_additive_d_stability(const Matrix& a, long budget = 10000,
                                                                  std::uint64_t seed = kDefaultSeed) {
  require_square(a, "matrix");
  require_finite(a, "matrix");
  const Eigen::Index n = a.rows();
  const double d_max = 10.0 * (1.0 + closed_form::norm_inf(a));
  long evals = 0;
  auto f = [&](const Vector& d) {
    ++evals;
    return spectral_abscissa(a - diag(d));
  };

  std::vector<Vector> starts{Vector::Zero(n)};
  for (double s : {2.0, 0.2 * d_max, d_max})
    for (Eigen::Index i = 0; i < n; ++i) starts.push_back(s * Vector::Unit(n, i));
  Rng rng(seed);

  for (std::size_t k = 0; evals < budget; ++k) {
    Vector d = k < starts.size() ? starts[k] : uniform_vector(rng, n, 0.0, d_max);
    double fd = f(d);
    if (fd > kFalsifierThreshold) return Counterexample{diag(d), fd};
    double step = 0.25 * d_max;
    const long cap = evals + 100 * n;
    while (step > 1e-6 * d_max && evals < budget && evals < cap) {
      bool moved = false;
      for (Eigen::Index i = 0; i < n && evals < budget; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vector e = d;
          e(i) = std::clamp(e(i) + sgn * step, 0.0, d_max);
          if (e(i) == d(i)) continue;
          const double fe = f(e);
          if (fe > fd) {
            d = e;
            fd = fe;
            moved = true;
            if (fd > kFalsifierThreshold) return Counterexample{diag(d), fd};
          }
        }
      }
      if (!moved) step *= 0.5;
    }
  }
  return std::nullopt;
}

/// 2x2 grid search: a grid x grid lattice on [0, extent]^2 plus random points.
inline std::optional<Counterexample> falsify_by_grid(const Matrix& a, int grid = 50, double extent = 10.0,
                                                     int random_points = 1000, std::uint64_t seed = kDefaultSeed) {
  if (a.rows() != 2 || a.cols() != 2) throw Error(ErrorCode::WrongDimension, "grid falsifier needs a 2x2 matrix");
  auto check = [&](double d1, double d2) -> std::optional<Counterexample> {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = d1;
    d(1, 1) = d2;
    const double s = spectral_abscissa(a - d);
    if (s > kFalsifierThreshold) return Counterexample{d, s};
    return std::nullopt;
  };
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      if (auto c = check(extent * i / (grid - 1), extent * j / (grid - 1))) return c;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, extent);
  for (int k = 0; k < random_points; ++k) {
    const double d1 = u(rng);
    if (auto c = check(d1, u(rng))) return c;
  }
  return std::nullopt;
}

struct DStabilityOptions {
  long falsifier_budget = 10000;
  int family_scalings = 16;
  int admissibility_budget = 16;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::vector<NamedNorm>> family;
};

namespace detail {

inline Counterexample zero_counterexample(const Matrix& a) {
  return {Matrix::Zero(a.rows(), a.cols()), spectral_abscissa(a)};
}

inline void attach_certificate(DStabilityReport& r, const Matrix& a, const DStabilityOptions& o) {
  const auto fam = o.family ? *o.family : default_certificate_family(a.rows(), o.family_scalings, o.seed);
  auto c = certify_additive_d_stability(a, fam, o.admissibility_budget, o.seed);
  if (c.certificate) r.certificate = c.certificate;
}

}  // namespace detail

/// Full additive D-stability analysis: the exact 2x2 test, the Metzler reduction,
/// admissible-measure certificates and finally the falsifier.
inline DStabilityReport analyze_additive_d_stability(const Matrix& a, const DStabilityOptions& o = {}) {
  require_square(a, "matrix");
  require_finite(a, "matrix");
  DStabilityReport r;
  const Eigen::Index n = a.rows();

  if (n == 2) {
    r.method = StabilityMethod::Exact2x2;
    const double tr = a.trace(), det = a.determinant();
    if (additive_d_stable_2x2(a)) {
      r.verdict = StabilityVerdict::Stable;
      detail::attach_certificate(r, a, o);
      if (a(0, 0) == 0.0 || a(1, 1) == 0.0)
        r.note = "zero diagonal entry: no admissible-measure certificate can exist";
      return r;
    }
    r.verdict = StabilityVerdict::Unstable;
    if (tr >= 0.0 || det <= 0.0) {
      r.counterexample = detail::zero_counterexample(a);
      if (r.counterexample->abscissa <= kFalsifierThreshold) r.note = "marginal: A itself is not Hurwitz, D = 0";
      return r;
    }
    // tr < 0, det > 0 and one positive diagonal entry: damp the other coordinate
    // until the determinant turns negative.
    Matrix d = Matrix::Zero(2, 2);
    if (a(0, 0) > 0.0) d(1, 1) = det / a(0, 0) + 1.0;
    else d(0, 0) = det / a(1, 1) + 1.0;
    r.counterexample = Counterexample{d, spectral_abscissa(a - d)};
    return r;
  }

  if (is_metzler(a)) {
    r.method = StabilityMethod::Metzler;
    bool stable = false;
    try {
      stable = additive_d_stable_metzler(a);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Marginal) throw;
      r.note = "marginal: A itself is not Hurwitz, D = 0";
    }
    if (stable) {
      r.verdict = StabilityVerdict::Stable;
      detail::attach_certificate(r, a, o);
    } else {
      r.verdict = StabilityVerdict::Unstable;
      r.counterexample = detail::zero_counterexample(a);
    }
    return r;
  }

  const auto fam = o.family ? *o.family : default_certificate_family(n, o.family_scalings, o.seed);
  auto cert = certify_additive_d_stability(a, fam, o.admissibility_budget, o.seed);
  if (cert.verdict == StabilityVerdict::Stable) return cert;

  if (auto c = falsify_additive_d_stability(a, o.falsifier_budget, o.seed)) {
    r.verdict = StabilityVerdict::Unstable;
    r.method = StabilityMethod::Falsified;
    r.counterexample = c;
    return r;
  }
  r.verdict = StabilityVerdict::Unknown;
  r.method = StabilityMethod::BudgetExhausted;
  r.note = "no certificate and no counterexample within budget";
  return r;
}

}  // namespace logmeasure
