#pragma once

#include <functional>

namespace tiltkde::quadrature {

// Adaptive Simpson integration of f over [a, b] to an absolute tolerance.
// Throws QuadratureFailure when the refinement budget is exhausted or the
// integrand produces non-finite values.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 52);

// Integral over the whole real line for integrands that decay in the tails:
// integrates [-L, L] with doubling L until two consecutive windows agree
// within abs_tol. Throws QuadratureFailure if no agreement by L = max_halfwidth.
double adaptive_simpson_real_line(const std::function<double(double)>& f,
                                  double abs_tol, double initial_halfwidth = 8.0,
                                  double max_halfwidth = 64.0);

} // namespace tiltkde::quadrature
