#include "mspec/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mspec/double_double.hpp"
#include "mspec/error.hpp"

namespace mspec {
namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Regularized P(s, x) by series, valid for x < s + 1.
double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
}

// Regularized Q(s, x) by modified Lentz continued fraction, x >= s + 1.
double gamma_q_fraction(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
}

// Power series evaluated in double-double; the alternating terms reach
// ~1e9 near x = 25, which plain doubles cannot absorb.
double bessel_series(int order, double x) {
  const dd_real q = dd_real(x) * dd_real(x) / dd_real(4.0);
  dd_real term = order == 0 ? dd_real(1.0) : dd_real(x) / dd_real(2.0);
  dd_real sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q;
    term /= dd_real(static_cast<double>(k)) * dd_real(static_cast<double>(k + order));
    sum += term;
    if (std::fabs(term.hi) < 1e-34 * std::fabs(sum.hi) + 1e-300) break;
  }
  return static_cast<double>(sum);
}

double bessel_asymptotic(int order, double x) {
  const double mu = 4.0 * order * order;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::fabs(term) > last) break;
    last = std::fabs(term);
    // a_k / x^k alternates between the Q and P series with sign (-1)^floor(k/2).
    const double signed_term = ((k / 2) % 2 == 0) ? term : -term;
    if (k % 2 == 1) {
      q += signed_term;
    } else {
      p += signed_term;
    }
    if (last < 1e-17) break;
  }
  const double chi = x - (0.5 * order + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

constexpr double kSeriesLimit = 25.0;

}  // namespace

double log_gamma(double x) {
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::fabs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
  }
  x -= 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
  const double t = x + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

double gamma_fn(double x) {
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  x -= 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
  const double t = x + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double upper_incomplete_gamma(double s, double x) {
  if (!(s > 0.0) || x < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "upper_incomplete_gamma requires s > 0, x >= 0");
  }
  if (x == 0.0) return gamma_fn(s);
  const double regularized = x < s + 1.0 ? 1.0 - gamma_p_series(s, x) : gamma_q_fraction(s, x);
  return regularized * gamma_fn(s);
}

double bessel_j0(double x) {
  x = std::fabs(x);
  return x <= kSeriesLimit ? bessel_series(0, x) : bessel_asymptotic(0, x);
}

double bessel_j1(double x) {
  const double sign = x < 0.0 ? -1.0 : 1.0;
  x = std::fabs(x);
  return sign * (x <= kSeriesLimit ? bessel_series(1, x) : bessel_asymptotic(1, x));
}

double bessel_j0_zero(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Bessel zero index must be >= 1");
  const double beta = (n - 0.25) * std::numbers::pi;
  const double b2 = beta * beta;
  double x = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta * b2) +
             3779.0 / (15360.0 * beta * b2 * b2);
  for (int it = 0; it < 20; ++it) {
    const double step = bessel_j0(x) / bessel_j1(x);
    x += step;
    if (std::fabs(step) < 1e-15 * x) break;
  }
  return x;
}

}  // namespace mspec
