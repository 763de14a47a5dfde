#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "mspec/discrete_ops.hpp"
#include "mspec/error.hpp"

using namespace mspec;
using std::numbers::pi;

TEST_CASE("stiffness matrix is symmetric") {
  for (const auto& g : {build_grid(DomainSpec::interval(0, 1), 1.0 / 16), build_grid(DomainSpec::disk(1), 1.0 / 8),
                        build_radial_grid(DomainSpec::disk(1), 1.0 / 16)}) {
    const auto op = assemble_half_laplacian(g);
    const SparseMatrix& k = op.stiffness();
    for (std::size_t r = 0; r < k.n; ++r) {
      for (std::size_t e = k.row_start[r]; e < k.row_start[r + 1]; ++e) {
        const auto c = static_cast<std::size_t>(k.col[e]);
        double back = 0.0;
        for (std::size_t f = k.row_start[c]; f < k.row_start[c + 1]; ++f) {
          if (static_cast<std::size_t>(k.col[f]) == r) back = k.val[f];
        }
        CHECK(back == doctest::Approx(k.val[e]).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("sampled sine is a discrete eigenvector") {
  const double h = 1.0 / 32;
  const auto g = build_grid(DomainSpec::interval(0, 1), h);
  const auto op = assemble_half_laplacian(g);
  Field s(g);
  for (std::size_t i = 0; i < g->size(); ++i) s[i] = std::sin(pi * g->nodes[i].x);
  const Field as = op.apply(s);
  const double theta = (1 - std::cos(pi * h)) / (h * h);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(as[i] == doctest::Approx(theta * s[i]).epsilon(1e-12));
}

TEST_CASE("Poisson solve is exact on the quadratic exit time of an interval") {
  const auto g = build_grid(DomainSpec::interval(0, 1), 1.0 / 128);
  const auto op = assemble_half_laplacian(g);
  SolveStats stats;
  const Field u = solve_shifted(op, 0.0, Field(g, 1.0), 1e-13, &stats);
  CHECK(stats.relative_residual <= 1e-13);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->nodes[i].x;
    CHECK(u[i] == doctest::Approx(x * (1 - x)).epsilon(1e-10));
  }
}

TEST_CASE("radial Poisson solve approximates (R^2 - r^2)/2") {
  const auto g = build_radial_grid(DomainSpec::disk(1), 1.0 / 256);
  const Field u = solve_poisson(assemble_half_laplacian(g), Field(g, 1.0), 1e-12);
  double err = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->nodes[i].x;
    err = std::max(err, std::fabs(u[i] - (1 - r * r) / 2));
  }
  CHECK(err < 1e-4);
}

TEST_CASE("shifted solve residual") {
  const auto g = build_grid(DomainSpec::rectangle(1, 1), 1.0 / 32);
  const auto op = assemble_half_laplacian(g);
  Field rhs(g);
  for (std::size_t i = 0; i < g->size(); ++i) rhs[i] = g->nodes[i].x + 2 * g->nodes[i].y;
  const Field x = solve_shifted(op, 3.0, rhs, 1e-12);
  const Field ax = op.apply(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) worst = std::max(worst, std::fabs(ax[i] + 3.0 * x[i] - rhs[i]));
  CHECK(worst < 1e-8);
}

TEST_CASE("maximum principle for the discrete exit time") {
  // Exterior neighbours sit within R + h of the centre, so ((R+h)^2 - r^2)/2
  // is a discrete supersolution.
  const double h = 1.0 / 32;
  const auto g = build_grid(DomainSpec::disk(1), h);
  const Field u = solve_poisson(assemble_half_laplacian(g), Field(g, 1.0), 1e-12);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Point p = g->nodes[i];
    CHECK(u[i] > 0.0);
    CHECK(u[i] <= ((1 + h) * (1 + h) - p.x * p.x - p.y * p.y) / 2 + 1e-9);
  }
}

TEST_CASE("iteration cap") {
  CHECK(default_iteration_cap(100) == 400);
  CHECK(default_iteration_cap(4) >= 40);
  const auto g = build_grid(DomainSpec::interval(0, 1), 1.0 / 64);
  const auto op = assemble_half_laplacian(g);
  try {
    solve_poisson(op, Field(g, 1.0), 1e-14, 2);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
  }
}

TEST_CASE("lowest eigenpairs of the interval stencil") {
  const double h = 1.0 / 64;
  const auto g = build_grid(DomainSpec::interval(0, 1), h);
  const auto pairs = lowest_eigenpairs(assemble_half_laplacian(g), 4, 1e-10);
  REQUIRE(pairs.size() >= 4);
  for (int k = 1; k <= 4; ++k) {
    const double exact = 2 * (1 - std::cos(k * pi * h)) / (h * h);
    CHECK(pairs[k - 1].lambda == doctest::Approx(exact).epsilon(1e-9));
    CHECK(inner_product(pairs[k - 1].phi, pairs[k - 1].phi) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(std::fabs(inner_product(pairs[0].phi, pairs[1].phi)) < 1e-9);
}

TEST_CASE("square eigenvalues come with their multiplicity") {
  const double h = 1.0 / 16;
  const auto g = build_grid(DomainSpec::rectangle(1, 1), h);
  const auto pairs = lowest_eigenpairs(assemble_half_laplacian(g), 3, 1e-10);
  auto mode = [h](int j) { return 2 * (1 - std::cos(j * pi * h)) / (h * h); };
  CHECK(pairs[0].lambda == doctest::Approx(2 * mode(1)).epsilon(1e-9));
  CHECK(pairs[1].lambda == doctest::Approx(mode(1) + mode(2)).epsilon(1e-9));
  CHECK(pairs[2].lambda == doctest::Approx(mode(1) + mode(2)).epsilon(1e-9));
}

TEST_CASE("integration uses the node weights") {
  const auto g = build_grid(DomainSpec::rectangle(2, 1), 0.25);
  CHECK(integrate(Field(g, 1.0)) == doctest::Approx(7 * 3 * 0.0625));
}

TEST_CASE("coordinate dump") {
  const auto g = build_grid(DomainSpec::interval(0, 1), 0.25);
  std::ostringstream os;
  assemble_half_laplacian(g).write_coordinates(os);
  std::istringstream is(os.str());
  int r, c, lines = 0;
  double v;
  std::string first;
  while (is >> r >> c >> v) {
    if (lines == 0) {
      CHECK(r == 0);
      CHECK(c == 0);
      CHECK(v == doctest::Approx(16.0));  // 1/h^2 on the diagonal of -(1/2)Δ_h
    }
    ++lines;
  }
  CHECK(lines == 7);
}
