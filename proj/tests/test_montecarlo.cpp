#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mspec/error.hpp"
#include "mspec/montecarlo.hpp"

using namespace mspec;

namespace {

// Mean overshoot of a Gaussian walk past a flat boundary, in units of sqrt(dt).
constexpr double kOvershoot = 0.5825971579390106;

SimConfig interval_cfg(std::uint64_t paths, double dt, std::uint64_t seed) {
  SimConfig c;
  c.paths = paths;
  c.dt = dt;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("configuration is validated") {
  SimConfig c = interval_cfg(10, 0.0, 1);
  CHECK_THROWS_AS(validate(c), Error);
  c.dt = 1e-3;
  c.paths = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c.paths = 10;
  c.x0 = {1.0, 0.0};
  CHECK_THROWS_AS(validate(c), Error);
  CHECK_NOTHROW(validate(c, false));
  CHECK_THROWS_AS(simulate_exit_times(c), Error);
  c.x0 = {0.5, 0.0};
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("runs are bit-identical across worker counts") {
  for (const auto& dom : {DomainSpec::interval(0, 1), DomainSpec::disk(1)}) {
    SimConfig c = interval_cfg(3000, 1e-4, 424242);
    c.domain = dom;
    c.x0 = dom.dimension() == 1 ? Point{0.5, 0} : Point{0.2, -0.1};
    c.workers = 1;
    const ExitSamples a = simulate_exit_times(c);
    c.workers = 4;
    const ExitSamples b = simulate_exit_times(c);
    CHECK(a.path_index == b.path_index);
    CHECK(a.tau == b.tau);
    CHECK(mc_laplace(a, 1.0).value == mc_laplace(b, 1.0).value);
    c.workers = 3;
    const ExitSamples u1 = simulate_exit_times_uniform(c);
    c.workers = 1;
    const ExitSamples u2 = simulate_exit_times_uniform(c);
    CHECK(u1.tau == u2.tau);
  }
  SimConfig c = interval_cfg(500, 1e-4, 1);
  const ExitSamples s1 = simulate_exit_times(c);
  c.seed = 2;
  CHECK(simulate_exit_times(c).tau != s1.tau);
}

TEST_CASE("mean exit time from the interval centre") {
  const double dt = 1e-4;
  const ExitSamples s = simulate_exit_times(interval_cfg(20000, dt, 7));
  CHECK(s.tau.size() == 20000);
  CHECK(s.capped == 0);
  const auto est = mc_moment_estimates(s, 2);
  REQUIRE(est.size() == 3);
  CHECK(est[0].value == doctest::Approx(1.0));
  const double d = kOvershoot * std::sqrt(dt);
  const double expect = (0.5 + d) * (0.5 + d);
  CHECK(std::fabs(est[1].value - expect) < 4 * est[1].stderr_);
  CHECK(est[1].estimator == "moment_1");
  CHECK(est[1].paths == 20000);
}

TEST_CASE("discretisation bias shrinks like sqrt(dt)") {
  const ExitSamples coarse = simulate_exit_times(interval_cfg(40000, 1e-3, 99));
  const ExitSamples fine = simulate_exit_times(interval_cfg(40000, 2.5e-4, 99));
  const double b_coarse = mc_moment_estimates(coarse, 1)[1].value - 0.25;
  const double b_fine = mc_moment_estimates(fine, 1)[1].value - 0.25;
  CHECK(b_fine > 0);
  const double ratio = b_coarse / b_fine;
  CHECK(ratio > 1.4);
  CHECK(ratio < 2.8);
}

TEST_CASE("mean exit time from the disk centre") {
  const double dt = 1e-4;
  SimConfig c = interval_cfg(4000, dt, 5);
  c.domain = DomainSpec::disk(1);
  c.x0 = {0, 0};
  const auto est = mc_moment_estimates(simulate_exit_times(c), 1);
  const double expect = 0.5 * (1 + kOvershoot * std::sqrt(dt)) * (1 + kOvershoot * std::sqrt(dt));
  CHECK(std::fabs(est[1].value - expect) < 4 * est[1].stderr_);
}

TEST_CASE("domain-integrated moments from uniform starts") {
  const double dt = 1e-5;
  const ExitSamples s = simulate_exit_times_uniform(interval_cfg(8000, dt, 2024));
  CHECK(s.uniform_start);
  CHECK(s.volume == 1.0);
  const MomentSequence ms = mc_moments(s, 1);
  CHECK(ms.provenance == Provenance::MonteCarlo);
  CHECK(ms.A_at(0) == 1.0);
  REQUIRE(ms.A_stderr.size() == 2);
  CHECK(ms.A_stderr[0] == 0.0);
  const double d = kOvershoot * std::sqrt(dt);
  CHECK(std::fabs(ms.A_at(1) - (1.0 / 6 + d)) < 4 * ms.A_stderr[1] + 1e-3 / 6);
  CHECK(std::fabs(ms.A_at(1) / (1.0 / 6) - 1) < 0.02);
  CHECK_THROWS_AS(mc_moments(simulate_exit_times(interval_cfg(10, 1e-3, 1)), 1), Error);
}

TEST_CASE("survival and Laplace estimators") {
  const ExitSamples s = simulate_exit_times(interval_cfg(5000, 1e-4, 31));
  double prev = 1.0;
  for (double t : {0.05, 0.1, 0.25, 0.5, 1.0}) {
    const McEstimate e = mc_survival(s, t);
    CHECK(e.value <= prev);
    CHECK(e.stderr_ == doctest::Approx(std::sqrt(e.value * (1 - e.value) / 5000.0)));
    prev = e.value;
  }
  prev = 1.0;
  for (double sv : {0.5, 1.0, 4.0, 16.0}) {
    const double v = mc_laplace(s, sv).value;
    CHECK(v < prev);
    prev = v;
  }
  CHECK(mc_laplace(s, 0.0).value == 1.0);
  CHECK_THROWS_AS(mc_survival(s, 0.0), Error);
  CHECK_THROWS_AS(mc_laplace(s, -1.0), Error);
}

TEST_CASE("step cap and sample-size guards") {
  SimConfig c = interval_cfg(50, 1e-5, 3);
  c.step_cap = 10;
  const ExitSamples s = simulate_exit_times(c);
  CHECK(s.capped == 50);
  CHECK(s.tau.empty());
  CHECK_THROWS_AS(mc_laplace(s, 1.0), Error);
  CHECK_THROWS_AS(mc_moment_estimates(simulate_exit_times(interval_cfg(50, 1e-3, 3)), 5), Error);

  ExitSamples few;
  few.tau = {0.001, 1.0};
  few.path_index = {0, 1};
  try {
    mc_moment_estimates(few, 1);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
}
