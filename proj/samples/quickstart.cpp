// Computes a few measures of the intro matrix and runs the D-stability analysis.

#include <iostream>

#include "logmeasure/gallery.hpp"
#include "logmeasure/stability_lab.hpp"

int main() {
  using namespace logmeasure;
  const Matrix a = gallery::intro_matrix();
  for (double p : {1.0, 2.0, kInf}) {
    const auto norm = validate_norm_spec(lp_spec(p), 2);
    std::cout << norm.describe() << ": mu(A) = " << matrix_measure(a, norm).value << '\n';
  }
  std::cout << "s(A) = " << spectral_abscissa(a) << '\n';

  const auto report = analyze_additive_d_stability(a);
  std::cout << "additive D-stability: " << to_string(report.verdict) << " (" << to_string(report.method) << ")\n";
  if (report.counterexample)
    std::cout << "destabilizing D = diag(" << report.counterexample->D(0, 0) << ", " << report.counterexample->D(1, 1)
              << ")\n";
}
