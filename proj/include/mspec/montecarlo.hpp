#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mspec/geometry.hpp"
#include "mspec/moments.hpp"

namespace mspec {

// Philox4x32-10 counter-based generator. Path i of a run with seed S reads
// the blocks philox(key = S, counter = (block, i)) for block = 0, 1, ...;
// uniform start points use blocks from 2^63 upwards so they never overlap
// the increments.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  static Block generate(Block counter, std::array<std::uint32_t, 2> key);
};

struct SimConfig {
  DomainSpec domain = DomainSpec::interval(0.0, 1.0);
  Point x0{0.5, 0.0};
  std::uint64_t paths = 100000;
  double dt = 1e-5;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::uint64_t step_cap = 100000000;
};

// Throws InvalidArgument / InvalidDomain on a bad configuration.
void validate(const SimConfig& cfg, bool need_interior_start = true);

struct ExitSamples {
  // One entry per completed path, in path-index order.
  std::vector<std::uint64_t> path_index;
  std::vector<double> tau;
  // Paths stopped at the step cap and excluded from `tau`.
  std::uint64_t capped = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  double volume = 0.0;
  bool uniform_start = false;
};

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::string estimator;
};

// Random walk with steps sqrt(dt) N(0,1) per coordinate from cfg.x0; τ is
// the time of the first step that lands outside the open domain.
ExitSamples simulate_exit_times(const SimConfig& cfg);
// Same, but each path starts at its own uniform point of the domain
// (cfg.x0 is ignored).
ExitSamples simulate_exit_times_uniform(const SimConfig& cfg);

// E^{x0}[τ^n] for n = 0..n_max. Domain-integrated samples are scaled by the
// volume. n_max is limited to 4; a relative standard error above 20% for
// any n >= 1 throws InsufficientSamples.
std::vector<McEstimate> mc_moment_estimates(const ExitSamples& samples, int n_max);
// A_n = vol · mean(τ^n) over uniform starts, as a MonteCarlo sequence.
MomentSequence mc_moments(const ExitSamples& uniform_samples, int n_max);

// Fraction of paths alive at t, with binomial standard error.
McEstimate mc_survival(const ExitSamples& samples, double t);
McEstimate mc_survival(const SimConfig& cfg, double t);

// Sample mean of exp(-s τ).
McEstimate mc_laplace(const ExitSamples& samples, double s);
McEstimate mc_laplace(const SimConfig& cfg, double s);

}  // namespace mspec
