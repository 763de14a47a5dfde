#include "mspec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mspec/error.hpp"
#include "mspec/numerics.hpp"
#include "mspec/special_functions.hpp"

namespace mspec {

const char* curve_provenance_name(CurveProvenance p) {
  switch (p) {
    case CurveProvenance::SpectralSum: return "spectral_sum";
    case CurveProvenance::Timestep: return "timestep";
    case CurveProvenance::Reconstructed: return "reconstructed";
  }
  return "spectral_sum";
}

ZetaValue zeta(const SpectralData& sd, double s) {
  if (sd.entries.empty()) throw Error(ErrorCode::InvalidArgument, "zeta of an empty spectrum");
  if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "zeta needs s > 0");
  CompensatedSum sum;
  for (const auto& e : sd.entries) sum.add(e.a2 * std::pow(2.0 / e.lambda, s));
  const double deficit = std::max(0.0, sd.volume - sd.total_weight());
  return {sum.value(), deficit * std::pow(2.0 / sd.entries.back().lambda, s)};
}

HeatContentCurve heat_content_spectral(const SpectralData& sd, const std::vector<double>& times) {
  HeatContentCurve curve;
  curve.provenance = CurveProvenance::SpectralSum;
  const double deficit = std::max(0.0, sd.volume - sd.total_weight());
  const double last = sd.entries.empty() ? 0.0 : sd.entries.back().lambda;
  for (double t : times) {
    if (!(t > 0)) throw Error(ErrorCode::InvalidArgument, "heat content times must be positive");
    CompensatedSum q;
    for (const auto& e : sd.entries) q.add(e.a2 * std::exp(-0.5 * e.lambda * t));
    curve.t.push_back(t);
    curve.q.push_back(q.value());
    curve.tail_bound.push_back(deficit * std::exp(-0.5 * last * t));
  }
  return curve;
}

HeatContentCurve heat_content_timestep(const DiscreteOperator& op, const std::vector<double>& times, double dt,
                                       const TimestepOptions& options) {
  if (!(dt > 0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "sample times must be positive and strictly increasing");
    }
  }
  const GridPtr& grid = op.grid();
  const std::size_t n = op.size();
  Field u(grid, 1.0);
  Field rhs(grid);
  std::vector<double> au(n);
  double t = 0.0;
  bool startup = true;

  // (A + 2/τ) u_new = (2/τ) u            implicit Euler, step τ/2
  // (A + 2/τ) u_new = (2/τ) u - A u      Crank-Nicolson, step τ
  auto implicit_half = [&](double tau) {
    const double shift = 2.0 / tau;
    for (std::size_t i = 0; i < n; ++i) rhs[i] = shift * u[i];
    u = solve_shifted(op, shift, rhs, options.tol, nullptr, 0, u.values);
  };
  auto crank_nicolson = [&](double tau) {
    const double shift = 2.0 / tau;
    op.apply(u.values, au);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = shift * u[i] - au[i];
    u = solve_shifted(op, shift, rhs, options.tol, nullptr, 0, u.values);
  };

  HeatContentCurve curve;
  curve.provenance = CurveProvenance::Timestep;
  for (double target : times) {
    while (target - t > 1e-12 * target) {
      const double step = std::min(dt, target - t);
      if (startup) {
        implicit_half(step);
        implicit_half(step);
        startup = false;
      } else {
        crank_nicolson(step);
      }
      t = (target - t <= dt) ? target : t + step;
      if (options.observer) options.observer(t, u.values);
    }
    curve.t.push_back(target);
    curve.q.push_back(integrate(u));
  }
  return curve;
}

HeatContentCurve heat_content_timestep(GridPtr grid, const std::vector<double>& times, double dt) {
  return heat_content_timestep(assemble_half_laplacian(std::move(grid)), times, dt);
}

std::vector<double> log_spaced(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0) || !(t_max > t_min) || count < 2) {
    throw Error(ErrorCode::InvalidArgument, "log_spaced needs 0 < t_min < t_max and count >= 2");
  }
  std::vector<double> out(count);
  const double ratio = std::log(t_max / t_min);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.back() = t_max;
  return out;
}

namespace {

struct LinearFit {
  std::vector<double> coef;
  std::vector<double> stderr_;
  double rss = 0.0;
  double condition = 0.0;
};

LinearFit fit_powers(const std::vector<double>& t, const std::vector<double>& q, int terms) {
  const std::size_t m = t.size();
  const std::size_t p = static_cast<std::size_t>(terms);
  std::vector<std::vector<double>> cols(p, std::vector<double>(m));
  std::vector<double> scale(p);
  for (std::size_t k = 0; k < p; ++k) {
    double big = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      cols[k][i] = std::pow(t[i], 0.5 * static_cast<double>(k));
      big = std::max(big, std::fabs(cols[k][i]));
    }
    scale[k] = big;
    for (double& x : cols[k]) x /= big;
  }
  // Householder QR on the scaled design matrix.
  std::vector<double> b = q;
  std::vector<std::vector<double>> r(p, std::vector<double>(p, 0.0));
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += cols[k][i] * cols[k][i];
    norm = std::sqrt(norm);
    const double alpha = cols[k][k] > 0 ? -norm : norm;
    std::vector<double> v(cols[k].begin() + static_cast<std::ptrdiff_t>(k), cols[k].end());
    v[0] -= alpha;
    double vv = 0.0;
    for (double x : v) vv += x * x;
    auto reflect = [&](std::vector<double>& y) {
      if (vv == 0.0) return;
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * y[i];
      const double f = 2.0 * dot / vv;
      for (std::size_t i = k; i < m; ++i) y[i] -= f * v[i - k];
    };
    for (std::size_t j = k; j < p; ++j) reflect(cols[j]);
    reflect(b);
    for (std::size_t j = k; j < p; ++j) r[k][j] = cols[j][k];
  }
  LinearFit fit;
  double dmax = 0.0, dmin = INFINITY;
  for (std::size_t k = 0; k < p; ++k) {
    dmax = std::max(dmax, std::fabs(r[k][k]));
    dmin = std::min(dmin, std::fabs(r[k][k]));
  }
  fit.condition = dmin > 0 ? dmax / dmin : INFINITY;
  std::vector<double> x(p);
  for (std::size_t k = p; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= r[k][j] * x[j];
    x[k] = s / r[k][k];
  }
  for (std::size_t i = p; i < m; ++i) fit.rss += b[i] * b[i];
  // Rows of R^{-1} give the coefficient covariance up to sigma^2.
  std::vector<std::vector<double>> rinv(p, std::vector<double>(p, 0.0));
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t k = p; k-- > 0;) {
      double s = (k == c) ? 1.0 : 0.0;
      for (std::size_t j = k + 1; j < p; ++j) s -= r[k][j] * rinv[j][c];
      rinv[k][c] = s / r[k][k];
    }
  }
  const double dof = static_cast<double>(m > p ? m - p : 1);
  const double sigma2 = fit.rss / dof;
  for (std::size_t k = 0; k < p; ++k) {
    double v = 0.0;
    for (std::size_t c = 0; c < p; ++c) v += rinv[k][c] * rinv[k][c];
    fit.coef.push_back(x[k] / scale[k]);
    fit.stderr_.push_back(std::sqrt(sigma2 * v) / scale[k]);
  }
  return fit;
}

constexpr double kMaxFitCondition = 1e10;

}  // namespace

AsymptoticFit asymptotic_fit(const HeatContentCurve& curve, int terms, double t_min, double t_max) {
  if (terms < 1) throw Error(ErrorCode::InvalidArgument, "fit needs at least one basis term");
  std::vector<double> t, q;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (curve.t[i] < t_min) continue;
    if (t_max > 0 && curve.t[i] > t_max) continue;
    t.push_back(curve.t[i]);
    q.push_back(curve.q[i]);
  }
  if (t.size() < static_cast<std::size_t>(terms) + 2) {
    throw Error(ErrorCode::InvalidArgument, "too few samples inside the fit window");
  }
  const LinearFit fit = fit_powers(t, q, terms);
  if (!(fit.condition < kMaxFitCondition)) {
    throw Error(ErrorCode::InvalidArgument, "power basis is ill-conditioned on this window");
  }
  AsymptoticFit out;
  out.coefficients = fit.coef;
  out.stderr_ = fit.stderr_;
  out.residual_norm = std::sqrt(fit.rss / static_cast<double>(t.size()));
  out.t_min = t.front();
  out.t_max = t.back();
  if (t.size() >= static_cast<std::size_t>(terms) + 3) {
    const LinearFit richer = fit_powers(t, q, terms + 1);
    if (richer.condition < kMaxFitCondition) {
      for (std::size_t k = 0; k < out.coefficients.size(); ++k) {
        const double shift = richer.coef[k] - out.coefficients[k];
        out.stderr_[k] = std::hypot(out.stderr_[k], shift);
      }
    }
  }
  return out;
}

FitWindow default_fit_window(const DomainSpec& spec, double h) {
  const double ratio = volume(spec) / boundary_measure(spec);
  return {4.0 * h * h, 0.02 * ratio * ratio * 2.0 * std::numbers::pi};
}

double boundary_coefficient(const DomainSpec& spec) {
  return -std::sqrt(2.0 / std::numbers::pi) * boundary_measure(spec);
}

MellinResult mellin_numeric(const HeatContentCurve& curve, double s, double lambda1, double volume) {
  if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "Mellin transform needs s > 0");
  if (!(lambda1 > 0)) throw Error(ErrorCode::InvalidArgument, "Mellin tail needs λ1 > 0");
  if (curve.t.size() < 3) throw Error(ErrorCode::InvalidArgument, "curve has too few samples");
  const auto& t = curve.t;
  const auto& q = curve.q;
  MellinResult out;
  CompensatedSum sampled;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double f0 = q[i - 1] * std::pow(t[i - 1], s);
    const double f1 = q[i] * std::pow(t[i], s);
    sampled.add(0.5 * (f0 + f1) * std::log(t[i] / t[i - 1]));
  }
  out.sampled = sampled.value();
  const double t_end = t.back();
  const double x_end = 0.5 * lambda1 * t_end;
  if (x_end < 2.0) {
    throw Error(ErrorCode::InvalidArgument, "curve ends before the first mode dominates; extend t_max");
  }
  const double a1 = q.back() * std::exp(x_end);
  out.tail = a1 * std::pow(2.0 / lambda1, s) * upper_incomplete_gamma(s, x_end);
  out.head = q.front() * std::pow(t.front(), s) / s;
  out.head_bound = volume * std::pow(t.front(), s) / s;
  out.value = out.sampled + out.tail + out.head;
  if (out.head_bound > 0.05 * out.value) {
    throw Error(ErrorCode::InvalidArgument, "curve starts too late for this s; lower t_min");
  }
  return out;
}

double IdentityReport::max_relative_error() const {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.relative_error);
  return worst;
}

IdentityReport verify_identities(const MomentSequence& ms, const SpectralData& sd, int n_max) {
  if (n_max > ms.n_max()) throw Error(ErrorCode::InvalidArgument, "moment sequence is shorter than n_max");
  IdentityReport report;
  for (int n = 1; n <= n_max; ++n) {
    const ZetaValue z = zeta(sd, n);
    const double g = gamma_fn(n);
    IdentityRow row;
    row.n = n;
    row.lhs = g * z.value;
    row.rhs = ms.A_at(n) / n;
    row.relative_error = std::fabs(row.lhs - row.rhs) / std::fabs(row.rhs);
    row.tail_bound = g * z.tail_bound;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace mspec
