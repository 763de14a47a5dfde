#pragma once

#include <string>
#include <vector>

#include "mspec/analysis.hpp"
#include "mspec/moments.hpp"
#include "mspec/spectral.hpp"

namespace mspec {

enum class Precision { Standard, Extended };

const char* precision_name(Precision p);
Precision precision_from_name(const std::string& name);

struct HankelReport {
  int p = 0;
  int shifted_size = 0;     // size of the shifted section actually checked
  double min_eig = 0.0;     // smallest eigenvalue of H = [mu_{i+j}]
  double min_eig_shifted = 0.0;  // of H' = [mu_{i+j+1}]
  double trace = 0.0;
  double trace_shifted = 0.0;
  bool pass = false;
  bool pass_unshifted = false;
  bool pass_shifted = false;
  std::string message;
};

inline constexpr double kPsdTolerance = 1e-12;

// PSD test of the p x p Hankel section and of its shift. Needs moments up
// to mu_{2p-2}; the shifted section is p x p when mu_{2p-1} exists and
// (p-1) x (p-1) otherwise. Eigenvalues are computed in double-double.
HankelReport hankel_psd_check(const MomentSequence& ms, int p, double eps_psd = kPsdTolerance);

struct Atom {
  double x = 0.0;
  double w = 0.0;
  dd_real x_dd;
  dd_real w_dd;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;  // x strictly decreasing
  double mu0 = 0.0;
  int requested_p = 0;
  int used_p = 0;
  int cap_p = 0;
  std::vector<double> hankel_min_eig;  // λ_min of H_k for k = 1..cap_p
  std::vector<double> moment_residuals;  // relative, n = 0..2 used_p - 1
  double max_residual = 0.0;
  int discarded = 0;
  Precision precision = Precision::Extended;
};

// Gauss quadrature from moments: nodes solve H1 v = x H0 v on p x p
// sections (through the Cholesky factor of H0), weights come from a
// row-scaled least-squares Vandermonde fit of mu_0..mu_{2p-1}. The atom
// count is capped where H0 stops being resolvable above the moment noise.
AtomicMeasure invert_moments(const MomentSequence& ms, int p, Precision precision = Precision::Extended);

// Largest p <= p_max whose Hankel section is resolvable at this precision.
int hankel_rank_cap(const MomentSequence& ms, int p_max, Precision precision, std::vector<double>* min_eigs = nullptr);

// λ = 2/x, a2 = w; multiplicities are unknown (0).
SpectralData measure_to_spectrum(const AtomicMeasure& am);

// q(t) = Σ w exp(-t/x).
HeatContentCurve reconstruct_heat_content(const AtomicMeasure& am, const std::vector<double>& times);

}  // namespace mspec
