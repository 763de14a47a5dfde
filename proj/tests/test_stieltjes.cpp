#include <doctest.h>

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mspec/error.hpp"
#include "mspec/stieltjes.hpp"

using namespace mspec;
using std::numbers::pi;
using boost::multiprecision::cpp_rational;
using bf50 = boost::multiprecision::cpp_bin_float_50;

namespace {

MomentSequence from_mu(const std::vector<double>& mu, double noise) {
  std::vector<dd_real> A;
  double fact = 1.0;
  for (std::size_t n = 0; n < mu.size(); ++n) {
    if (n > 1) fact *= static_cast<double>(n);
    A.emplace_back(dd_real(mu[n]) * dd_real(fact));
  }
  return make_moment_sequence(std::move(A), Provenance::Analytic, noise);
}

// mu_n of (0,1) as exact rationals through u_k'' = -2k u_{k-1}.
std::vector<cpp_rational> exact_interval_mu(int n_max) {
  std::vector<cpp_rational> u{1}, mu{1};
  cpp_rational fact = 1;
  for (int k = 1; k <= n_max; ++k) {
    std::vector<cpp_rational> next(u.size() + 2, 0);
    for (std::size_t j = 0; j < u.size(); ++j) next[j + 2] = -2 * k * u[j] / cpp_rational((j + 1) * (j + 2));
    cpp_rational at_one = 0;
    for (const auto& c : next) at_one += c;
    next[1] = -at_one;
    u = next;
    cpp_rational integral = 0;
    for (std::size_t j = 0; j < u.size(); ++j) integral += u[j] / cpp_rational(j + 1);
    fact *= k;
    mu.push_back(integral / fact);
  }
  return mu;
}

bf50 pencil_det(const std::vector<bf50>& mu, int p, const bf50& x) {
  std::vector<std::vector<bf50>> m(p, std::vector<bf50>(p));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m[i][j] = mu[i + j + 1] - x * mu[i + j];
  bf50 det = 1;
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int r = c + 1; r < p; ++r)
      if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    if (m[c][c] == 0) return 0;
    for (int r = c + 1; r < p; ++r) {
      const bf50 f = m[r][c] / m[c][c];
      for (int k = c; k < p; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

// Gauss nodes as the sign changes of det(H1 - x H0), refined by bisection.
std::vector<bf50> oracle_nodes(const std::vector<bf50>& mu, int p) {
  std::vector<bf50> roots;
  bf50 lo = 1e-7;
  bf50 f_lo = pencil_det(mu, p, lo);
  for (int s = 1; s <= 4000; ++s) {
    const bf50 hi = bf50(1e-7) * pow(bf50(10), bf50(7) * s / 4000);
    const bf50 f_hi = pencil_det(mu, p, hi);
    if ((f_lo < 0) != (f_hi < 0)) {
      bf50 a = lo, b = hi, fa = f_lo;
      for (int it = 0; it < 200; ++it) {
        const bf50 mid = (a + b) / 2;
        const bf50 fm = pencil_det(mu, p, mid);
        if ((fm < 0) == (fa < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back((a + b) / 2);
    }
    lo = hi;
    f_lo = f_hi;
  }
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

}  // namespace

TEST_CASE("three-moment sequence that is not Stieltjes") {
  const MomentSequence ms = from_mu({1, 2, 1}, 1e-16);
  const HankelReport r = hankel_psd_check(ms, 2);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.pass_unshifted);
  CHECK(r.min_eig < 0);
  CHECK(r.shifted_size == 1);
  CHECK(r.message.find("H_2") != std::string::npos);
  CHECK(r.message.find("not positive semidefinite") != std::string::npos);
  CHECK_THROWS_AS(invert_moments(ms, 2), Error);
}

TEST_CASE("Hankel sections of the interval are PSD") {
  const MomentSequence ms = analytic_moments(DomainSpec::interval(0, 1), 9);
  for (int p = 1; p <= 5; ++p) {
    const HankelReport r = hankel_psd_check(ms, p);
    CAPTURE(p);
    CHECK(r.pass);
    CHECK(r.min_eig > 0);
    CHECK(r.min_eig_shifted > 0);
  }
}

TEST_CASE("two-atom measure is recovered") {
  const double x[] = {0.3, 0.1}, w[] = {0.6, 0.4};
  std::vector<double> mu;
  for (int n = 0; n <= 5; ++n) mu.push_back(w[0] * std::pow(x[0], n) + w[1] * std::pow(x[1], n));
  const MomentSequence ms = from_mu(mu, 1e-16);
  for (Precision prec : {Precision::Standard, Precision::Extended}) {
    const AtomicMeasure am = invert_moments(ms, 2, prec);
    REQUIRE(am.atoms.size() == 2);
    CHECK(am.used_p == 2);
    for (int i = 0; i < 2; ++i) {
      CHECK(am.atoms[i].x == doctest::Approx(x[i]).epsilon(1e-12));
      CHECK(am.atoms[i].w == doctest::Approx(w[i]).epsilon(1e-12));
    }
    CHECK(am.max_residual < 1e-12);
  }
  // a third atom is not resolvable from a two-point measure
  const AtomicMeasure capped = invert_moments(ms, 3);
  CHECK(capped.cap_p <= 2);
  CHECK(capped.used_p == 2);
  CHECK(capped.atoms.size() == 2);
  CHECK(hankel_rank_cap(ms, 3, Precision::Extended) == 2);
}

TEST_CASE("too few moments for p") {
  const MomentSequence ms = analytic_moments(DomainSpec::interval(0, 1), 5);
  CHECK_THROWS_AS(invert_moments(ms, 4), Error);
  try {
    invert_moments(ms, 4);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("round trip on the interval") {
  const MomentSequence ms = analytic_moments(DomainSpec::interval(0, 1), 9);
  for (int p = 3; p <= 5; ++p) {
    const AtomicMeasure am = invert_moments(ms, p, Precision::Extended);
    CAPTURE(p);
    REQUIRE(am.used_p == p);
    const SpectralData sd = measure_to_spectrum(am);
    REQUIRE(sd.size() == static_cast<std::size_t>(p));
    CHECK(std::fabs(sd.entries[0].lambda / (pi * pi) - 1) < 1e-3);
    CHECK(std::fabs(sd.entries[0].a2 / (8 / (pi * pi)) - 1) < 1e-3);
    CHECK(std::fabs(sd.entries[1].lambda / (9 * pi * pi) - 1) < 5e-2);
    CHECK(sd.source == SpectrumSource::Inverted);
    for (std::size_t i = 1; i < sd.size(); ++i) CHECK(sd.entries[i].lambda > sd.entries[i - 1].lambda);
  }
  const AtomicMeasure am5 = invert_moments(ms, 5);
  CHECK(measure_to_spectrum(am5).entries[0].lambda == doctest::Approx(9.869604401089374).epsilon(1e-12));
}

TEST_CASE("Gauss nodes agree with a 50-digit pencil oracle") {
  const auto exact = exact_interval_mu(7);
  std::vector<bf50> mu;
  for (const auto& q : exact) mu.emplace_back(q);
  const auto roots = oracle_nodes(mu, 4);
  REQUIRE(roots.size() == 4);
  CHECK(static_cast<double>(roots[0]) == doctest::Approx(2 / (pi * pi)).epsilon(1e-6));

  const AtomicMeasure am = invert_moments(analytic_moments(DomainSpec::interval(0, 1), 7), 4, Precision::Extended);
  REQUIRE(am.atoms.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const bf50 got = bf50(am.atoms[i].x_dd.hi) + bf50(am.atoms[i].x_dd.lo);
    CAPTURE(i);
    CHECK(static_cast<double>(abs(got / roots[i] - 1)) < 1e-18);
  }
}

TEST_CASE("double-precision PDE moments cap the atom count") {
  const auto g = build_grid(DomainSpec::interval(0, 1), 1.0 / 128);
  const MomentSequence ms = moment_sequence(exit_moment_fields(g, 9));
  std::vector<double> eigs;
  const int cap = hankel_rank_cap(ms, 5, Precision::Extended, &eigs);
  CHECK(cap >= 2);
  CHECK(cap < 5);
  CHECK(eigs.size() >= static_cast<std::size_t>(cap));
  const AtomicMeasure am = invert_moments(ms, 5);
  CHECK(am.used_p == cap);
  CHECK(am.requested_p == 5);
  CHECK(measure_to_spectrum(am).entries[0].lambda == doctest::Approx(pi * pi).epsilon(1e-3));
}

TEST_CASE("reconstructed heat content") {
  AtomicMeasure am;
  am.atoms = {{0.2, 0.7, dd_real(0.2), dd_real(0.7)}, {0.05, 0.3, dd_real(0.05), dd_real(0.3)}};
  am.mu0 = 1.0;
  const HeatContentCurve c = reconstruct_heat_content(am, {1e-12, 0.1, 1.0});
  CHECK(c.provenance == CurveProvenance::Reconstructed);
  CHECK(c.q[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(reconstruct_heat_content(am, {0.0}), Error);
  CHECK(c.q[1] == doctest::Approx(0.7 * std::exp(-0.5) + 0.3 * std::exp(-2.0)));
  CHECK(c.q[2] == doctest::Approx(0.7 * std::exp(-5.0) + 0.3 * std::exp(-20.0)));
  const SpectralData sd = measure_to_spectrum(am);
  CHECK(sd.entries[0].lambda == doctest::Approx(10.0));
  CHECK(sd.entries[1].lambda == doctest::Approx(40.0));
  CHECK(sd.entries[0].multiplicity == 0);
}

TEST_CASE("precision names") {
  CHECK(precision_from_name(precision_name(Precision::Standard)) == Precision::Standard);
  CHECK(precision_from_name(precision_name(Precision::Extended)) == Precision::Extended);
  CHECK_THROWS_AS(precision_from_name("quad"), Error);
}
