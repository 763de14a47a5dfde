#include <doctest.h>

#include <cmath>

#include "mspec/special_functions.hpp"

using namespace mspec;

TEST_CASE("gamma") {
  CHECK(gamma_fn(4.5) == doctest::Approx(11.6317283965674489).epsilon(1e-13));
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(6.0) == doctest::Approx(120.0).epsilon(1e-13));
  CHECK(log_gamma(50.5) == doctest::Approx(146.519255490720627).epsilon(1e-13));
}

TEST_CASE("upper incomplete gamma") {
  CHECK(upper_incomplete_gamma(2.5, 3.0) == doctest::Approx(0.407069175871302998).epsilon(1e-12));
  CHECK(upper_incomplete_gamma(1.0, 0.5) == doctest::Approx(0.606530659712633424).epsilon(1e-13));
  CHECK(upper_incomplete_gamma(3.0, 10.0) == doctest::Approx(0.00553879143102315189).epsilon(1e-12));
  CHECK(upper_incomplete_gamma(2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Bessel J0 and J1") {
  struct Row {
    double x, j0, j1;
  };
  const Row rows[] = {{0.5, 0.938469807240812904, 0.242268457674873886},
                      {2.5, -0.0483837764681979963, 0.497094102464274038},
                      {10.0, -0.245935764451348335, 0.0434727461688614367},
                      {30.0, -0.0863679835810402113, -0.118751062616622937},
                      {60.3, -0.101129576948180084, 0.0173276922977745514}};
  for (const auto& r : rows) {
    CAPTURE(r.x);
    CHECK(std::fabs(bessel_j0(r.x) - r.j0) < 1e-13);
    CHECK(std::fabs(bessel_j1(r.x) - r.j1) < 1e-13);
  }
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j1(0.0) == 0.0);
}

TEST_CASE("zeros of J0") {
  CHECK(bessel_j0_zero(1) == doctest::Approx(2.40482555769577277).epsilon(1e-14));
  CHECK(bessel_j0_zero(2) == doctest::Approx(5.52007811028631065).epsilon(1e-14));
  CHECK(bessel_j0_zero(3) == doctest::Approx(8.65372791291101222).epsilon(1e-14));
  CHECK(bessel_j0_zero(10) == doctest::Approx(30.6346064684319751).epsilon(1e-14));
}
