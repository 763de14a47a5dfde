#pragma once

namespace mspec {

// Real gamma function for 0 < x < ~170 (Lanczos, g = 7).
double gamma_fn(double x);
double log_gamma(double x);

// Upper incomplete gamma Γ(s, x) for s > 0, x >= 0.
double upper_incomplete_gamma(double s, double x);

// Bessel functions of the first kind, orders 0 and 1, for x >= 0.
double bessel_j0(double x);
double bessel_j1(double x);

// n-th positive zero of J0 (n >= 1).
double bessel_j0_zero(int n);

}  // namespace mspec
