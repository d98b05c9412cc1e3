#pragma once

// Worked objects that ship with the library: the motivating 2x2 matrix, the
// orthant-monotonic but non-absolute norm, the parallelogram norm and the
// non-admissible scaled max norm, plus the norm battery built from them.

#include <string>
#include <vector>

#include "logmeasure/norm_core.hpp"

namespace logmeasure::gallery {

/// Hurwitz (tr < 0, det > 0) yet A - diag(0, d) is unstable for d > 1.
inline Matrix intro_matrix() {
  Matrix a(2, 2);
  a << 1, -3, 1, -2;
  return a;
}

/// Same off-diagonal pattern with a negative (1,1) entry: additively D-stable.
inline Matrix stable_intro_matrix() {
  Matrix a(2, 2);
  a << -1, -3, 1, -2;
  return a;
}

/// |x| = |x|_inf when x1 x2 >= 0 and |x|_1 otherwise.
inline NormSpec orthant_monotonic_example_spec() {
  return piecewise_orthant_spec({{"++", lp_spec(kInf)},
                                 {"--", lp_spec(kInf)},
                                 {"+-", lp_spec(1.0)},
                                 {"-+", lp_spec(1.0)}});
}

inline NormSpec parallelogram_spec() {
  std::vector<Vector> v(4, Vector(2));
  v[0] << 2, 2;
  v[1] << -2, -2;
  v[2] << 1, -1;
  v[3] << -1, 1;
  return polyhedral_spec(v);
}

inline Matrix li_wang_scaling() {
  Matrix t(2, 2);
  t << 1, 2, 1, 3;
  return t;
}

/// |x| = |T x|_inf with T = [[1, 2], [1, 3]].
inline NormSpec li_wang_spec() { return scaled_spec(li_wang_scaling(), lp_spec(kInf)); }

inline Matrix li_wang_diagonal() {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 2;
  return d;
}

struct BatteryMember {
  std::string name;
  ValidatedNorm norm;
  bool expected_orthant_monotonic;
};

/// Nine two-dimensional norms: l1, l2, l_inf, one positive diagonal scaling of
/// each, and the three worked examples. Only the parallelogram and the scaled
/// max norm with T = [[1,2],[1,3]] fail orthant-monotonicity.
inline std::vector<BatteryMember> norm_battery(std::uint64_t seed = kDefaultSeed) {
  auto v = [&](const NormSpec& s) { return validate_norm_spec(s, 2, seed); };
  auto dscale = [](double a, double b) {
    Matrix t = Matrix::Zero(2, 2);
    t(0, 0) = a;
    t(1, 1) = b;
    return t;
  };
  return {
      {"l1", v(lp_spec(1.0)), true},
      {"l2", v(lp_spec(2.0)), true},
      {"linf", v(lp_spec(kInf)), true},
      {"l1_diag(1,3)", v(scaled_spec(dscale(1.0, 3.0), lp_spec(1.0))), true},
      {"l2_diag(2,0.5)", v(scaled_spec(dscale(2.0, 0.5), lp_spec(2.0))), true},
      {"linf_diag(0.25,4)", v(scaled_spec(dscale(0.25, 4.0), lp_spec(kInf))), true},
      {"orthant_monotonic_example", v(orthant_monotonic_example_spec()), true},
      {"parallelogram", v(parallelogram_spec()), false},
      {"li_wang_scaled_inf", v(li_wang_spec()), false},
  };
}

/// Extra diagonal scalings, so every lp base appears with two different scalings.
inline std::vector<BatteryMember> extra_diagonal_scalings(std::uint64_t seed = kDefaultSeed) {
  auto dscale = [](double a, double b) {
    Matrix t = Matrix::Zero(2, 2);
    t(0, 0) = a;
    t(1, 1) = b;
    return t;
  };
  auto v = [&](const NormSpec& s) { return validate_norm_spec(s, 2, seed); };
  return {
      {"l1_diag(5,0.2)", v(scaled_spec(dscale(5.0, 0.2), lp_spec(1.0))), true},
      {"l2_diag(0.3,7)", v(scaled_spec(dscale(0.3, 7.0), lp_spec(2.0))), true},
      {"linf_diag(3,1.5)", v(scaled_spec(dscale(3.0, 1.5), lp_spec(kInf))), true},
  };
}

}  // namespace logmeasure::gallery
