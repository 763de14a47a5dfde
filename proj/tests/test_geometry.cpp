#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mspec/error.hpp"
#include "mspec/geometry.hpp"

using namespace mspec;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("domain validation") {
  CHECK(code_of([] { DomainSpec::interval(1.0, 1.0); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { DomainSpec::rectangle(-1.0, 1.0); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { DomainSpec::disk(0.0); }) == ErrorCode::InvalidDomain);
  // bow tie
  CHECK(code_of([] { DomainSpec::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { DomainSpec::polygon({{0, 0}, {1, 0}}); }) == ErrorCode::InvalidDomain);
}

TEST_CASE("clockwise polygons are reoriented with vertex 0 kept") {
  const auto p = DomainSpec::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  const auto& v = std::get<Polygon>(p.shape()).vertices;
  CHECK(v.front() == Point{0, 0});
  CHECK(signed_area(v) > 0);
}

TEST_CASE("volume and boundary measure") {
  CHECK(volume(DomainSpec::interval(-1, 2)) == 3.0);
  CHECK(boundary_measure(DomainSpec::interval(-1, 2)) == 2.0);
  CHECK(volume(DomainSpec::rectangle(2, 3)) == 6.0);
  CHECK(boundary_measure(DomainSpec::rectangle(2, 3)) == 10.0);
  CHECK(volume(DomainSpec::disk(2)) == doctest::Approx(4 * std::numbers::pi));
  CHECK(boundary_measure(DomainSpec::disk(2)) == doctest::Approx(4 * std::numbers::pi));
  const auto tri = DomainSpec::polygon({{0, 0}, {4, 0}, {0, 3}});
  CHECK(volume(tri) == doctest::Approx(6.0));
  CHECK(boundary_measure(tri) == doctest::Approx(12.0));
}

TEST_CASE("contains excludes the boundary") {
  const auto sq = DomainSpec::rectangle(1, 1);
  CHECK(sq.contains({0.5, 0.5}));
  CHECK_FALSE(sq.contains({0.0, 0.5}));
  CHECK_FALSE(sq.contains({1.0, 1.0}));
  CHECK_FALSE(sq.contains({0.05, 0.5}, 0.1));
  CHECK_FALSE(DomainSpec::disk(1).contains({1.0, 0.0}));
  CHECK(DomainSpec::interval(0, 1).contains({0.999, 0.0}));
}

TEST_CASE("lattice node counts") {
  const auto g1 = build_grid(DomainSpec::interval(0, 1), 0.25);
  REQUIRE(g1->size() == 3);
  CHECK(g1->nodes[0].x == 0.25);
  CHECK(g1->nodes[1].x == 0.5);
  CHECK(g1->nodes[2].x == 0.75);
  CHECK(build_grid(DomainSpec::rectangle(1, 1), 0.25)->size() == 9);

  // brute-force enumeration of lattice points with x^2 + y^2 < 1
  std::size_t expected = 0;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      if ((0.5 * i) * (0.5 * i) + (0.5 * j) * (0.5 * j) < 1.0) ++expected;
  CHECK(expected == 9);
  CHECK(build_grid(DomainSpec::disk(1), 0.5)->size() == expected);
}

TEST_CASE("grid weights, ordering and lookup") {
  const auto g = build_grid(DomainSpec::rectangle(1, 0.5), 0.125);
  double total = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    total += g->weights[k];
    CHECK(g->index_of(g->lattice_i[k], g->lattice_j[k]) == static_cast<int>(k));
    if (k > 0) {
      const bool ordered = g->lattice_i[k - 1] < g->lattice_i[k] ||
                           (g->lattice_i[k - 1] == g->lattice_i[k] && g->lattice_j[k - 1] < g->lattice_j[k]);
      CHECK(ordered);
    }
  }
  CHECK(total == doctest::Approx(7 * 3 * 0.125 * 0.125));
  CHECK(g->index_of(0, 0) == -1);
}

TEST_CASE("rectangle node counts over random sizes") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> cells(4, 40);
  for (int trial = 0; trial < 50; ++trial) {
    const int nx = cells(rng), ny = cells(rng);
    const double h = 1.0 / 16;
    const auto g = build_grid(DomainSpec::rectangle(nx * h, ny * h), h);
    CHECK(g->size() == static_cast<std::size_t>((nx - 1) * (ny - 1)));
  }
}

TEST_CASE("too coarse grids are rejected") {
  CHECK(code_of([] { build_grid(DomainSpec::interval(0, 1), 0.5); }) == ErrorCode::GridTooCoarse);
  CHECK(code_of([] { build_grid(DomainSpec::interval(0, 1), -0.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("radial grid") {
  const auto g = build_radial_grid(DomainSpec::disk(1), 1.0 / 64);
  CHECK(g->kind == GridKind::Radial);
  CHECK(g->size() == 64);
  double total = 0.0;
  for (double w : g->weights) total += w;
  // annular cells cover the disk of radius R - h/2
  CHECK(total == doctest::Approx(std::numbers::pi * (1 - 1.0 / 128) * (1 - 1.0 / 128)).epsilon(1e-12));
  CHECK_THROWS_AS(build_radial_grid(DomainSpec::disk(1), 0.3), Error);
  CHECK_THROWS_AS(build_radial_grid(DomainSpec::interval(0, 1), 0.1), Error);
}

TEST_CASE("perturb_polygon") {
  const auto sq = as_polygon(DomainSpec::rectangle(1, 1));
  const std::vector<double> ones{1, 1, 1, 1};
  CHECK(perturb_polygon(sq, ones, 0.0) == sq);

  const auto grown = perturb_polygon(sq, ones, 0.1);
  const auto& v = std::get<Polygon>(grown.shape()).vertices;
  const double d = 0.1 / std::sqrt(2.0);
  CHECK(v[0].x == doctest::Approx(-d));
  CHECK(v[0].y == doctest::Approx(-d));
  CHECK(v[2].x == doctest::Approx(1 + d));
  CHECK(volume(grown) > volume(sq));
  CHECK(volume(grown) == doctest::Approx((1 + 2 * d) * (1 + 2 * d)));

  // vertex 0 pushed inwards through the opposite corner
  const std::vector<double> one{1, 0, 0, 0};
  CHECK(code_of([&] { perturb_polygon(sq, one, -2.5); }) == ErrorCode::InvalidDomain);
  const std::vector<double> short_f{1, 0};
  CHECK(code_of([&] { perturb_polygon(sq, short_f, 0.1); }) == ErrorCode::InvalidArgument);
}
