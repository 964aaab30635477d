#pragma once

#include <cmath>
#include <stdexcept>

namespace fractime {

// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0, by the
// classic series / continued-fraction hybrid split at x = a + 1.
double regularized_gamma_p(double a, double x);

// Upper incomplete gamma Gamma(a, x) for x > 0. Supports negative
// non-integer a in (-1, 0) through one step of the recurrence
// Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a.
double upper_incomplete_gamma(double a, double x);

}  // namespace fractime
