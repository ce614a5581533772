#pragma once

namespace ugr {

// Upper incomplete gamma integral over [x, inf) of t^(a-1) e^(-t) dt,
// unnormalized, for any finite real order a (including a <= 0) and x > 0.
// Relative accuracy ~1e-12 over a in [-20, 50], x in (0, 100].
double upper_incomplete_gamma(double a, double x);

// log of the binomial coefficient; exact integer arithmetic for n <= 20
double binomial_coefficient(int n, int k);

double log_factorial(int n);

}  // namespace ugr
