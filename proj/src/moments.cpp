#include "mspec/moments.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mspec/error.hpp"
#include "mspec/numerics.hpp"

namespace mspec {
namespace {

// |B_{2m}| for m = 1..17 as exact fractions.
constexpr long long kBernoulliNum[] = {1,       1,      1,         1,           5,          691,
                                       7,       3617,   43867,     174611,      854513,     236364091,
                                       8553103, 23749461029LL, 8615841276005LL, 7709321041217LL, 2577687858367LL};
constexpr long long kBernoulliDen[] = {6,   30,   42,   30,  66, 2730, 6,   510, 798,
                                       330, 138, 2730, 6,   870, 14322, 510, 6};
constexpr int kMaxIntervalOrder = 16;

dd_real factorial(int n) {
  dd_real f(1.0);
  for (int k = 2; k <= n; ++k) f *= dd_real(static_cast<double>(k));
  return f;
}

MomentSequence interval_moments(const Interval& iv, int n_max) {
  if (n_max > kMaxIntervalOrder) {
    throw Error(ErrorCode::Unsupported, "analytic interval moments are tabulated up to n = 16");
  }
  const dd_real length(iv.b - iv.a);
  std::vector<dd_real> A;
  for (int n = 0; n <= n_max; ++n) {
    // mu_n = 4 * 2^n (2^{2n+2} - 1) |B_{2n+2}| / (2n+2)! * L^{2n+1}
    const dd_real bern = dd_from_ratio(kBernoulliNum[n], kBernoulliDen[n]);
    const dd_real pow2n(std::ldexp(1.0, n));
    const dd_real odd_factor(std::ldexp(1.0, 2 * n + 2) - 1.0);
    const dd_real mu = dd_real(4.0) * pow2n * odd_factor * bern / factorial(2 * n + 2) * pow(length, 2 * n + 1);
    A.push_back(mu * factorial(n));
  }
  return make_moment_sequence(std::move(A), Provenance::Analytic, 1e-28);
}

MomentSequence disk_moments(const Disk& disk, int n_max) {
  const dd_real r2 = dd_real(disk.radius) * dd_real(disk.radius);
  const dd_real two_pi = dd_real(2.0) * dd_pi();
  std::vector<dd_real> A{dd_pi() * r2};
  std::vector<dd_real> prev{dd_real(1.0)};  // coefficients of u_{k-1} in powers of r^2
  for (int k = 1; k <= n_max; ++k) {
    std::vector<dd_real> c(prev.size() + 1);
    // (1/2)Δ r^{2j} = 2 j^2 r^{2j-2}, so c_{j+1} = -k prev_j / (2 (j+1)^2).
    for (std::size_t j = 0; j < prev.size(); ++j) {
      const double jp1 = static_cast<double>(j + 1);
      c[j + 1] = -dd_real(static_cast<double>(k)) * prev[j] / dd_real(2.0 * jp1 * jp1);
    }
    dd_real at_boundary(0.0);
    dd_real rpow = r2;
    for (std::size_t j = 1; j < c.size(); ++j) {
      at_boundary += c[j] * rpow;
      rpow *= r2;
    }
    c[0] = -at_boundary;
    dd_real integral(0.0);
    rpow = r2;
    for (std::size_t j = 0; j < c.size(); ++j) {
      integral += c[j] * rpow / dd_real(2.0 * static_cast<double>(j + 1));
      rpow *= r2;
    }
    A.push_back(two_pi * integral);
    prev = std::move(c);
  }
  return make_moment_sequence(std::move(A), Provenance::Analytic, 1e-26);
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Pde: return "pde";
    case Provenance::Analytic: return "analytic";
    case Provenance::MonteCarlo: return "montecarlo";
  }
  return "pde";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "pde") return Provenance::Pde;
  if (name == "analytic") return Provenance::Analytic;
  if (name == "montecarlo") return Provenance::MonteCarlo;
  throw Error(ErrorCode::Parse, "unknown moment provenance '" + name + "'");
}

double lambda1_from_ratios(const std::vector<dd_real>& A) {
  const std::size_t n = A.size() - 1;
  if (A.size() < 2 || !(A[n].hi > 0)) return 0.0;
  return static_cast<double>(dd_real(2.0 * static_cast<double>(n)) * A[n - 1] / A[n]);
}

MomentSequence make_moment_sequence(std::vector<dd_real> A, Provenance provenance, double noise_floor) {
  if (A.empty()) throw Error(ErrorCode::InvalidArgument, "moment sequence needs at least A_0");
  MomentSequence ms;
  ms.mu.reserve(A.size());
  dd_real fact(1.0);
  for (std::size_t n = 0; n < A.size(); ++n) {
    if (n > 1) fact *= dd_real(static_cast<double>(n));
    ms.mu.push_back(A[n] / fact);
  }
  ms.A = std::move(A);
  ms.provenance = provenance;
  ms.noise_floor = noise_floor;
  ms.lambda1 = lambda1_from_ratios(ms.A);
  return ms;
}

std::vector<Field> exit_moment_fields(const DiscreteOperator& op, int n_max, double tol) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 1");
  std::vector<Field> fields;
  Field rhs(op.grid(), 1.0);
  for (int k = 1; k <= n_max; ++k) {
    try {
      fields.push_back(solve_poisson(op, rhs, tol));
    } catch (const Error& e) {
      throw Error(e.code(), "exit-time moment level k=" + std::to_string(k) + ": " + e.what());
    }
    rhs = fields.back();
    for (double& v : rhs.values) v *= static_cast<double>(k + 1);
  }
  return fields;
}

std::vector<Field> exit_moment_fields(GridPtr grid, int n_max, double tol) {
  return exit_moment_fields(assemble_half_laplacian(std::move(grid)), n_max, tol);
}

MomentSequence moment_sequence(const std::vector<Field>& fields, double noise_floor) {
  if (fields.empty()) throw Error(ErrorCode::InvalidArgument, "no moment fields");
  std::vector<dd_real> A;
  A.emplace_back(compensated_total(fields.front().grid->weights));
  for (const Field& f : fields) A.emplace_back(integrate(f));
  return make_moment_sequence(std::move(A), Provenance::Pde, noise_floor);
}

MomentSequence analytic_moments(const DomainSpec& spec, int n_max) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be non-negative");
  if (const auto* iv = std::get_if<Interval>(&spec.shape())) return interval_moments(*iv, n_max);
  if (const auto* d = std::get_if<Disk>(&spec.shape())) return disk_moments(*d, n_max);
  throw Error(ErrorCode::Unsupported, "closed-form moments exist for intervals and disks only");
}

CarlemanReport carleman_diagnostic(const MomentSequence& ms, double lambda1, double tolerance) {
  for (std::size_t n = 0; n < ms.mu.size(); ++n) {
    if (!(ms.mu[n].hi > 0)) {
      throw Error(ErrorCode::NotStieltjes, "moment mu_" + std::to_string(n) + " is not positive");
    }
  }
  CarlemanReport report;
  report.lambda1 = lambda1 > 0 ? lambda1 : ms.lambda1;
  if (!(report.lambda1 > 0)) throw Error(ErrorCode::InvalidArgument, "Carleman check needs a λ1 estimate");
  const double log_a0 = std::log(ms.A_at(0));
  const double log_half_lambda = std::log(report.lambda1 / 2.0);
  report.holds = true;
  for (int n = 1; 2 * n <= ms.n_max(); ++n) {
    const double lhs = -std::log(ms.mu_at(2 * n)) / (2.0 * n);
    const double rhs = log_half_lambda - log_a0 / (2.0 * n);
    const double margin = std::expm1(lhs - rhs);
    report.margins.push_back(margin);
    if (margin < -tolerance) report.holds = false;
  }
  return report;
}

Field laplace_transform(const DiscreteOperator& op, double s, double tol) {
  if (!(s >= 0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "Laplace variable s must be >= 0");
  Field h(op.grid(), 1.0);
  if (s == 0.0) return h;
  const Field w = solve_shifted(op, s, Field(op.grid(), s), tol);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 - w[i];
  return h;
}

Field laplace_transform(GridPtr grid, double s, double tol) {
  return laplace_transform(assemble_half_laplacian(std::move(grid)), s, tol);
}

}  // namespace mspec
