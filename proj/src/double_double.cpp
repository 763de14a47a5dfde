#include "mspec/double_double.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

#include "mspec/error.hpp"

namespace mspec {
namespace {

inline void two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  const double bb = s - a;
  err = (a - (s - bb)) + (b - bb);
}

inline void quick_two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  err = b - (s - a);
}

inline void two_prod(double a, double b, double& p, double& err) {
  p = a * b;
  err = std::fma(a, b, -p);
}

dd_real mul_dd_d(const dd_real& a, double b) {
  double p1, p2;
  two_prod(a.hi, b, p1, p2);
  p2 += a.lo * b;
  double s, e;
  quick_two_sum(p1, p2, s, e);
  return {s, e};
}

}  // namespace

DoubleDouble& DoubleDouble::operator+=(const DoubleDouble& o) {
  double s1, s2, t1, t2;
  two_sum(hi, o.hi, s1, s2);
  two_sum(lo, o.lo, t1, t2);
  s2 += t1;
  quick_two_sum(s1, s2, s1, s2);
  s2 += t2;
  quick_two_sum(s1, s2, hi, lo);
  return *this;
}

DoubleDouble& DoubleDouble::operator-=(const DoubleDouble& o) { return *this += -o; }

DoubleDouble& DoubleDouble::operator*=(const DoubleDouble& o) {
  double p1, p2;
  two_prod(hi, o.hi, p1, p2);
  p2 += hi * o.lo + lo * o.hi;
  quick_two_sum(p1, p2, hi, lo);
  return *this;
}

DoubleDouble& DoubleDouble::operator/=(const DoubleDouble& o) {
  const DoubleDouble a = *this;
  const double q1 = a.hi / o.hi;
  DoubleDouble r = a - mul_dd_d(o, q1);
  const double q2 = r.hi / o.hi;
  r -= mul_dd_d(o, q2);
  const double q3 = r.hi / o.hi;
  double s, e;
  quick_two_sum(q1, q2, s, e);
  *this = DoubleDouble(s, e) + DoubleDouble(q3);
  return *this;
}

dd_real sqrt(const dd_real& a) {
  if (a.hi == 0.0) return {0.0};
  if (a.hi < 0.0) return {std::nan(""), 0.0};
  const double x = 1.0 / std::sqrt(a.hi);
  const double ax = a.hi * x;
  double p, e;
  two_prod(ax, ax, p, e);
  const dd_real diff = a - dd_real(p, e);
  double s, err;
  two_sum(ax, diff.hi * x * 0.5, s, err);
  return {s, err};
}

dd_real abs(const dd_real& a) { return a.hi < 0.0 ? -a : a; }

dd_real pow(const dd_real& a, int n) {
  if (n == 0) return {1.0};
  dd_real base = a;
  dd_real result(1.0);
  unsigned m = static_cast<unsigned>(n < 0 ? -n : n);
  while (m != 0) {
    if (m & 1U) result *= base;
    base *= base;
    m >>= 1U;
  }
  return n < 0 ? dd_real(1.0) / result : result;
}

dd_real dd_from_ratio(long long num, long long den) {
  // Both operands are exact in double only below 2^53; split larger ones.
  auto exact = [](long long v) {
    const double hi = static_cast<double>(v);
    const double lo = static_cast<double>(v - static_cast<long long>(hi));
    return dd_real(hi) + dd_real(lo);
  };
  return exact(num) / exact(den);
}

dd_real dd_pi() { return {3.141592653589793116e+00, 1.224646799147353207e-16}; }

std::string to_string(const dd_real& a, int digits) {
  if (!isfinite(a)) return a.hi != a.hi ? "nan" : (a.hi > 0 ? "inf" : "-inf");
  if (a.hi == 0.0) return "0";
  digits = std::max(1, std::min(digits, 34));
  std::string out;
  dd_real x = a;
  if (x.hi < 0.0) {
    out.push_back('-');
    x = -x;
  }
  int exponent = static_cast<int>(std::floor(std::log10(x.hi)));
  x *= pow(dd_real(10.0), -exponent);
  if (x.hi >= 10.0) {
    x /= dd_real(10.0);
    ++exponent;
  } else if (x.hi < 1.0) {
    x *= dd_real(10.0);
    --exponent;
  }
  std::string mantissa;
  for (int i = 0; i <= digits; ++i) {
    int d = static_cast<int>(std::floor(x.hi));
    if (d > 9) d = 9;
    if (d < 0) d = 0;
    mantissa.push_back(static_cast<char>('0' + d));
    x = (x - dd_real(static_cast<double>(d))) * dd_real(10.0);
    if (x.hi < 0.0) x = dd_real(0.0);
  }
  // Round half up on the guard digit.
  const bool round_up = mantissa.back() >= '5';
  mantissa.pop_back();
  if (round_up) {
    int i = static_cast<int>(mantissa.size()) - 1;
    while (i >= 0 && mantissa[static_cast<std::size_t>(i)] == '9') {
      mantissa[static_cast<std::size_t>(i)] = '0';
      --i;
    }
    if (i < 0) {
      mantissa.insert(mantissa.begin(), '1');
      mantissa.pop_back();
      ++exponent;
    } else {
      ++mantissa[static_cast<std::size_t>(i)];
    }
  }
  while (mantissa.size() > 1 && mantissa.back() == '0') mantissa.pop_back();
  out.push_back(mantissa[0]);
  if (mantissa.size() > 1) {
    out.push_back('.');
    out.append(mantissa, 1, std::string::npos);
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "e%+03d", exponent);
  out += buf;
  return out;
}

dd_real dd_from_string(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  dd_real value(0.0);
  int scale = 0;
  bool any_digit = false;
  bool after_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      value = value * dd_real(10.0) + dd_real(static_cast<double>(c - '0'));
      if (after_point) --scale;
      any_digit = true;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw Error(ErrorCode::Parse, "not a number: '" + std::string(text) + "'");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    std::string exp_text(text.substr(i));
    std::size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(exp_text, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad exponent in '" + std::string(text) + "'");
    }
    i += used;
    scale += e;
  }
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i != text.size()) throw Error(ErrorCode::Parse, "trailing characters in '" + std::string(text) + "'");
  if (scale != 0) value *= pow(dd_real(10.0), scale);
  return negative ? -value : value;
}

}  // namespace mspec
