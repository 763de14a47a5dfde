#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mspec/discrete_ops.hpp"
#include "mspec/moments.hpp"
#include "mspec/spectral.hpp"

namespace mspec {

enum class CurveProvenance { SpectralSum, Timestep, Reconstructed };

const char* curve_provenance_name(CurveProvenance p);

struct HeatContentCurve {
  std::vector<double> t;
  std::vector<double> q;
  CurveProvenance provenance = CurveProvenance::SpectralSum;
  // Bound on the truncation error of each sample (spectral sums only).
  std::vector<double> tail_bound;
};

struct ZetaValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

// ζ_D(s) = Σ a2 (2/λ)^s over the listed clusters; the tail bound assumes
// the unlisted weight (volume - Σ a2) sits at or above the last λ.
ZetaValue zeta(const SpectralData& sd, double s);

// q(t) = Σ a2 exp(-λ t / 2).
HeatContentCurve heat_content_spectral(const SpectralData& sd, const std::vector<double>& times);

struct TimestepOptions {
  double tol = 1e-12;
  // Invoked after every step with the current time and nodal values.
  std::function<void(double, const std::vector<double>&)> observer;
};

// Crank-Nicolson for du/dt = (1/2)Δu, u(·,0) = 1, u = 0 on the boundary,
// started with two implicit Euler half steps. Requested times need not be
// multiples of dt; the last step before each sample is shortened.
HeatContentCurve heat_content_timestep(const DiscreteOperator& op, const std::vector<double>& times, double dt,
                                       const TimestepOptions& options = {});
HeatContentCurve heat_content_timestep(GridPtr grid, const std::vector<double>& times, double dt);

std::vector<double> log_spaced(double t_min, double t_max, std::size_t count);

struct AsymptoticFit {
  std::vector<double> coefficients;  // q_0, q_1, ... for powers t^{n/2}
  std::vector<double> stderr_;       // per coefficient
  double residual_norm = 0.0;        // RMS of the fit residual
  double t_min = 0.0;
  double t_max = 0.0;
};

// Least squares of q(t) on {t^{n/2}}, n = 0..terms-1, over the curve's
// samples inside [t_min, t_max]. Reported uncertainties combine the
// regression standard error with the shift seen when one more basis
// function is added.
AsymptoticFit asymptotic_fit(const HeatContentCurve& curve, int terms = 3, double t_min = 0.0,
                             double t_max = 0.0);

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

// [4 h^2, 0.02 * (vol/|∂D|)^2 * 2π]
FitWindow default_fit_window(const DomainSpec& spec, double h);

// Leading boundary coefficient -sqrt(2/π) |∂D| of the small-time expansion.
double boundary_coefficient(const DomainSpec& spec);

struct MellinResult {
  double value = 0.0;
  double sampled = 0.0;     // trapezoid over the samples
  double tail = 0.0;        // single-mode continuation beyond the last sample
  double head = 0.0;        // q(t_min) t_min^s / s
  double head_bound = 0.0;  // vol * t_min^s / s
};

// ∫_0^∞ q(t) t^{s-1} dt from a log-spaced curve.
MellinResult mellin_numeric(const HeatContentCurve& curve, double s, double lambda1, double volume);

struct IdentityRow {
  int n = 0;
  double lhs = 0.0;  // Γ(N) ζ_D(N)
  double rhs = 0.0;  // A_N / N
  double relative_error = 0.0;
  double tail_bound = 0.0;  // Γ(N) times the zeta tail bound
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  double max_relative_error() const;
};

IdentityReport verify_identities(const MomentSequence& ms, const SpectralData& sd, int n_max);

}  // namespace mspec
