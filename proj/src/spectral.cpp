#include "mspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mspec/error.hpp"
#include "mspec/numerics.hpp"
#include "mspec/special_functions.hpp"

namespace mspec {
namespace {

double interval_weight(int k, double length) {
  if (k % 2 == 0) return 0.0;
  const double kp = k * std::numbers::pi;
  return 8.0 * length / (kp * kp);
}

SpectralData rectangle_spectrum(const Rectangle& r, std::size_t m) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int n = static_cast<int>(m) + 1;; n *= 2) {
    struct Mode {
      double lambda;
      double a2;
    };
    std::vector<Mode> modes;
    for (int j = 1; j <= n; ++j) {
      for (int k = 1; k <= n; ++k) {
        const double lambda = pi2 * (j * j / (r.lx * r.lx) + k * k / (r.ly * r.ly));
        modes.push_back({lambda, interval_weight(j, r.lx) * interval_weight(k, r.ly)});
      }
    }
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.lambda < b.lambda; });
    SpectralData sd;
    for (const Mode& mode : modes) {
      if (!sd.entries.empty() && mode.lambda - sd.entries.back().lambda <= 1e-12 * mode.lambda) {
        sd.entries.back().multiplicity += 1;
        sd.entries.back().a2 += mode.a2;
      } else {
        if (sd.entries.size() == m) break;
        sd.entries.push_back({mode.lambda, 1, mode.a2});
      }
    }
    // Every mode below the cutoff is enumerated once n exceeds both axes' reach.
    const double cutoff = pi2 * (n + 1) * (n + 1) / std::max(r.lx * r.lx, r.ly * r.ly);
    if (sd.entries.size() == m && sd.entries.back().lambda < cutoff) {
      sd.source = SpectrumSource::Analytic;
      sd.volume = r.lx * r.ly;
      return sd;
    }
  }
}

}  // namespace

const char* source_name(SpectrumSource s) {
  switch (s) {
    case SpectrumSource::Analytic: return "analytic";
    case SpectrumSource::Numeric: return "numeric";
    case SpectrumSource::Inverted: return "inverted";
  }
  return "analytic";
}

SpectrumSource source_from_name(const std::string& name) {
  if (name == "analytic") return SpectrumSource::Analytic;
  if (name == "numeric") return SpectrumSource::Numeric;
  if (name == "inverted") return SpectrumSource::Inverted;
  throw Error(ErrorCode::Parse, "unknown spectrum source '" + name + "'");
}

double SpectralData::total_weight() const {
  CompensatedSum s;
  for (const auto& e : entries) s.add(e.a2);
  return s.value();
}

SpectralData analytic_spectrum(const DomainSpec& spec, std::size_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "need at least one cluster");
  const auto& shape = spec.shape();
  if (const auto* iv = std::get_if<Interval>(&shape)) {
    const double length = iv->b - iv->a;
    SpectralData sd{{}, SpectrumSource::Analytic, length};
    for (std::size_t k = 1; k <= m; ++k) {
      const double kp = static_cast<double>(k) * std::numbers::pi / length;
      sd.entries.push_back({kp * kp, 1, interval_weight(static_cast<int>(k), length)});
    }
    return sd;
  }
  if (const auto* r = std::get_if<Rectangle>(&shape)) return rectangle_spectrum(*r, m);
  if (const auto* d = std::get_if<Disk>(&shape)) {
    const double radius = d->radius;
    SpectralData sd{{}, SpectrumSource::Analytic, std::numbers::pi * radius * radius};
    for (std::size_t n = 1; n <= m; ++n) {
      const double j = bessel_j0_zero(static_cast<int>(n));
      sd.entries.push_back({(j / radius) * (j / radius), 1, 4.0 * std::numbers::pi * radius * radius / (j * j)});
    }
    return sd;
  }
  throw Error(ErrorCode::Unsupported, "no closed-form spectrum for polygons");
}

SpectralData cluster_eigenpairs(const std::vector<Eigenpair>& pairs, double volume, double threshold) {
  SpectralData sd{{}, SpectrumSource::Numeric, volume};
  double last_lambda = 0.0;
  for (const Eigenpair& p : pairs) {
    const double proj = integrate(p.phi);
    if (!sd.entries.empty() && p.lambda - last_lambda <= threshold * p.lambda) {
      sd.entries.back().multiplicity += 1;
      sd.entries.back().a2 += proj * proj;
    } else {
      sd.entries.push_back({p.lambda, 1, proj * proj});
    }
    last_lambda = p.lambda;
  }
  return sd;
}

SpectralData numeric_spectrum(const DiscreteOperator& op, std::size_t m, double tol) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "need at least one cluster");
  const std::size_t n = op.size();
  const double volume = compensated_total(op.grid()->weights);
  std::size_t count = std::min(2 * m + 2, n - 1);
  for (;;) {
    SpectralData sd = cluster_eigenpairs(lowest_eigenpairs(op, count, tol), volume);
    if (sd.size() > m) {
      sd.entries.resize(m);
      return sd;
    }
    if (count == n - 1) {
      if (sd.size() == m) return sd;
      throw Error(ErrorCode::InvalidArgument, "grid too small for the requested number of clusters");
    }
    count = std::min(2 * count, n - 1);
  }
}

SpectralData numeric_spectrum(GridPtr grid, std::size_t m, double tol) {
  return numeric_spectrum(assemble_half_laplacian(std::move(grid)), m, tol);
}

EssentialSpectrum essential_spectrum(const SpectralData& sd, double zero_tol) {
  EssentialSpectrum out;
  for (const auto& e : sd.entries) {
    if (e.a2 > zero_tol * sd.volume) {
      out.spec_star.push_back(e.lambda);
      out.vp.push_back(e.a2);
    }
  }
  out.degenerate = out.spec_star.empty();
  return out;
}

PropertyMReport property_m_report(const SpectralData& sd, double zero_tol) {
  PropertyMReport report;
  report.min_a2 = sd.entries.empty() ? 0.0 : sd.entries.front().a2;
  for (const auto& e : sd.entries) {
    report.min_a2 = std::min(report.min_a2, e.a2);
    if (!(e.a2 > zero_tol * sd.volume)) report.violating.push_back(e.lambda);
  }
  report.holds = !sd.entries.empty() && report.violating.empty();
  return report;
}

double PairingCheck::max_error() const {
  double worst = 0.0;
  for (double e : relative_errors) worst = std::max(worst, e);
  return worst;
}

PairingCheck pairing_recursion(const DiscreteOperator& op, const std::vector<Field>& fields, const Field& phi) {
  PairingCheck check;
  const Field a_phi = op.apply(phi);
  check.lambda = 2.0 * inner_product(a_phi, phi) / inner_product(phi, phi);
  double previous = integrate(phi);  // <u_0, φ> with u_0 = 1
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const double current = inner_product(fields[k], phi);
    const double predicted = (2.0 / check.lambda) * static_cast<double>(k + 1) * previous;
    check.relative_errors.push_back(std::fabs(current - predicted) / std::fabs(predicted));
    previous = current;
  }
  return check;
}

}  // namespace mspec
