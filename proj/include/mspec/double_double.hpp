#pragma once

#include <cmath>
#include <compare>
#include <string>
#include <string_view>

namespace mspec {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2, roughly 31 significant
// digits. Only the operations needed by the Hankel kernels are provided.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double x) : hi(x), lo(0.0) {}  // NOLINT(implicit)
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi + lo; }

  DoubleDouble& operator+=(const DoubleDouble& o);
  DoubleDouble& operator-=(const DoubleDouble& o);
  DoubleDouble& operator*=(const DoubleDouble& o);
  DoubleDouble& operator/=(const DoubleDouble& o);

  DoubleDouble operator-() const { return {-hi, -lo}; }

  friend DoubleDouble operator+(DoubleDouble a, const DoubleDouble& b) { return a += b; }
  friend DoubleDouble operator-(DoubleDouble a, const DoubleDouble& b) { return a -= b; }
  friend DoubleDouble operator*(DoubleDouble a, const DoubleDouble& b) { return a *= b; }
  friend DoubleDouble operator/(DoubleDouble a, const DoubleDouble& b) { return a /= b; }

  friend bool operator==(const DoubleDouble& a, const DoubleDouble& b) {
    return a.hi == b.hi && a.lo == b.lo;
  }
  friend std::partial_ordering operator<=>(const DoubleDouble& a, const DoubleDouble& b) {
    if (auto c = a.hi <=> b.hi; c != 0) return c;
    return a.lo <=> b.lo;
  }
};

using dd_real = DoubleDouble;

dd_real sqrt(const dd_real& a);
dd_real abs(const dd_real& a);
dd_real pow(const dd_real& a, int n);
dd_real dd_from_ratio(long long num, long long den);
dd_real dd_pi();

// Decimal conversion with up to 32 significant digits.
std::string to_string(const dd_real& a, int digits = 32);
dd_real dd_from_string(std::string_view text);

inline bool isfinite(const dd_real& a) { return std::isfinite(a.hi); }

}  // namespace mspec
