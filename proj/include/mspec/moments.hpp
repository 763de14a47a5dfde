#pragma once

#include <string>
#include <vector>

#include "mspec/discrete_ops.hpp"
#include "mspec/double_double.hpp"
#include "mspec/geometry.hpp"

namespace mspec {

enum class Provenance { Pde, Analytic, MonteCarlo };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

// Exit-time invariants A_0..A_nmax and normalized moments mu_n = A_n / n!.
// Values are held in double-double so analytic sequences survive the
// Hankel kernels; PDE and Monte Carlo sequences only fill the high part.
struct MomentSequence {
  std::vector<dd_real> A;
  std::vector<dd_real> mu;
  Provenance provenance = Provenance::Pde;
  // Lower estimate of the first Dirichlet eigenvalue (0 when unknown).
  double lambda1 = 0.0;
  // Relative accuracy of the individual moments.
  double noise_floor = 1e-11;
  // Standard errors of A_n (Monte Carlo only; empty otherwise).
  std::vector<double> A_stderr;

  int n_max() const { return static_cast<int>(A.size()) - 1; }
  double A_at(int n) const { return static_cast<double>(A[static_cast<std::size_t>(n)]); }
  double mu_at(int n) const { return static_cast<double>(mu[static_cast<std::size_t>(n)]); }
};

// Builds a sequence from A_0..A_n, filling mu and the ratio-based λ1 bound.
MomentSequence make_moment_sequence(std::vector<dd_real> A, Provenance provenance, double noise_floor);

// λ1 estimate 2 mu_{n-1} / mu_n from the last available pair. The ratio
// mu_n / mu_{n-1} = A_n / (n A_{n-1}) is a weighted mean of the atoms 2/λ,
// so it increases towards 2/λ1 and the estimate approaches λ1 from above.
double lambda1_from_ratios(const std::vector<dd_real>& A);

// u_k = E^x[τ^k] for k = 1..n_max: A u_1 = 1, A u_k = k u_{k-1}, where A is
// the discrete -(1/2)Δ with zero boundary values. `tol` is the relative
// residual of each CG solve.
std::vector<Field> exit_moment_fields(GridPtr grid, int n_max, double tol = 1e-11);
std::vector<Field> exit_moment_fields(const DiscreteOperator& op, int n_max, double tol = 1e-11);

MomentSequence moment_sequence(const std::vector<Field>& fields, double noise_floor = 1e-11);

// Closed-form moments: intervals via Bernoulli numbers, disks via the exact
// polynomial recursion in r^2. Both are evaluated in double-double.
MomentSequence analytic_moments(const DomainSpec& spec, int n_max);

struct CarlemanReport {
  bool holds = false;
  // margin_n = mu_{2n}^{-1/(2n)} / ((λ1/2) A_0^{-1/(2n)}) - 1 for n = 1, 2, ...
  std::vector<double> margins;
  double lambda1 = 0.0;
};

// Checks the bound chain mu_{2n} <= (2/λ1)^{2n} A_0 behind Carleman's
// condition. `lambda1` <= 0 uses the sequence's own estimate.
CarlemanReport carleman_diagnostic(const MomentSequence& ms, double lambda1 = 0.0, double tolerance = 1e-9);

// h(x, s) = E^x[exp(-s τ)] via (A + s) w = s, h = 1 - w.
Field laplace_transform(GridPtr grid, double s, double tol = 1e-11);
Field laplace_transform(const DiscreteOperator& op, double s, double tol = 1e-11);

}  // namespace mspec
