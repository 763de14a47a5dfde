#include "mspec/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mspec/dense.hpp"
#include "mspec/error.hpp"

namespace mspec {
namespace {

dense::Matrix<dd_real> hankel(const MomentSequence& ms, int size, int offset) {
  dense::Matrix<dd_real> h(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) h(i, j) = ms.mu[static_cast<std::size_t>(i + j + offset)];
  return h;
}

double min_eigenvalue(const dense::Matrix<dd_real>& h) {
  return static_cast<double>(dense::jacobi_eigen(h).values.front());
}

double trace_of(const dense::Matrix<dd_real>& h) {
  dd_real t(0.0);
  for (std::size_t i = 0; i < h.rows(); ++i) t += h(i, i);
  return static_cast<double>(t);
}

double precision_floor(Precision p) { return p == Precision::Extended ? 1e-30 : 1e-16; }

template <class T>
T from_dd(const dd_real& v) {
  if constexpr (std::is_same_v<T, dd_real>) {
    return v;
  } else {
    return static_cast<double>(v);
  }
}

template <class T>
struct RawQuadrature {
  std::vector<T> nodes;
  std::vector<T> weights;
};

template <class T>
RawQuadrature<T> gauss_from_moments(const std::vector<T>& mu, int p) {
  const std::size_t n = static_cast<std::size_t>(p);
  dense::Matrix<T> h0(n, n), h1(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      h0(i, j) = mu[i + j];
      h1(i, j) = mu[i + j + 1];
    }
  }
  const auto chol = dense::cholesky(h0);
  if (!chol) throw Error(ErrorCode::RankDeficient, "Hankel section H0 is numerically singular; reduce p");
  // J = L^{-1} H1 L^{-T}, the symmetric form of H1 v = x H0 v.
  const dense::Matrix<T> y = dense::lower_solve(*chol, h1);
  dense::Matrix<T> j = dense::lower_solve(*chol, dense::transpose(y));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      const T avg = (j(r, c) + j(c, r)) * T(0.5);
      j(r, c) = avg;
      j(c, r) = avg;
    }
  }
  RawQuadrature<T> out;
  out.nodes = dense::jacobi_eigen(j).values;

  const std::size_t rows = 2 * n;
  dense::Matrix<T> v(rows, n);
  std::vector<T> rhs(rows, T(1.0));
  for (std::size_t k = 0; k < n; ++k) {
    T power(1.0);
    for (std::size_t r = 0; r < rows; ++r) {
      v(r, k) = power / mu[r];
      power *= out.nodes[k];
    }
  }
  out.weights = dense::least_squares(v, rhs);
  return out;
}

template <class T>
AtomicMeasure assemble_measure(const MomentSequence& ms, int p) {
  std::vector<T> mu;
  for (int n = 0; n < 2 * p; ++n) mu.push_back(from_dd<T>(ms.mu[static_cast<std::size_t>(n)]));
  const RawQuadrature<T> raw = gauss_from_moments(mu, p);
  const double mu0 = ms.mu_at(0);

  AtomicMeasure am;
  am.mu0 = mu0;
  std::vector<std::pair<T, T>> kept;
  for (std::size_t k = 0; k < raw.nodes.size(); ++k) {
    const double x = static_cast<double>(raw.nodes[k]);
    const double w = static_cast<double>(raw.weights[k]);
    if (std::fabs(w) < 1e-10 * mu0) {
      ++am.discarded;
      continue;
    }
    if (w < 0) {
      std::ostringstream os;
      os << "recovered weight " << w << " at node " << x << " is negative; reject p=" << p;
      throw Error(ErrorCode::NegativeWeight, os.str());
    }
    if (!(x > 0)) {
      std::ostringstream os;
      os << "recovered node " << x << " carries weight " << w << " but is not positive";
      throw Error(ErrorCode::NotStieltjes, os.str());
    }
    kept.emplace_back(raw.nodes[k], raw.weights[k]);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return b.first < a.first; });
  for (const auto& [x, w] : kept) {
    Atom atom;
    atom.x = static_cast<double>(x);
    atom.w = static_cast<double>(w);
    if constexpr (std::is_same_v<T, dd_real>) {
      atom.x_dd = x;
      atom.w_dd = w;
    } else {
      atom.x_dd = dd_real(x);
      atom.w_dd = dd_real(w);
    }
    am.atoms.push_back(atom);
  }
  for (int n = 0; n < 2 * p; ++n) {
    T sum(0.0);
    for (const auto& [x, w] : kept) {
      T power(1.0);
      for (int k = 0; k < n; ++k) power *= x;
      sum += w * power;
    }
    const T target = mu[static_cast<std::size_t>(n)];
    const double rel = std::fabs(static_cast<double>((sum - target) / target));
    am.moment_residuals.push_back(rel);
    am.max_residual = std::max(am.max_residual, rel);
  }
  return am;
}

}  // namespace

const char* precision_name(Precision p) { return p == Precision::Extended ? "extended" : "standard"; }

Precision precision_from_name(const std::string& name) {
  if (name == "extended") return Precision::Extended;
  if (name == "standard") return Precision::Standard;
  throw Error(ErrorCode::Parse, "precision must be 'standard' or 'extended', got '" + name + "'");
}

HankelReport hankel_psd_check(const MomentSequence& ms, int p, double eps_psd) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "Hankel size p must be >= 1");
  if (2 * p - 2 > ms.n_max()) {
    throw Error(ErrorCode::InvalidArgument, "Hankel section of size " + std::to_string(p) + " needs mu_0..mu_" +
                                                std::to_string(2 * p - 2));
  }
  HankelReport r;
  r.p = p;
  const auto h0 = hankel(ms, p, 0);
  r.min_eig = min_eigenvalue(h0);
  r.trace = trace_of(h0);
  r.pass_unshifted = r.min_eig >= -eps_psd * r.trace;
  r.shifted_size = (2 * p - 1 <= ms.n_max()) ? p : p - 1;
  r.pass_shifted = true;
  if (r.shifted_size > 0) {
    const auto h1 = hankel(ms, r.shifted_size, 1);
    r.min_eig_shifted = min_eigenvalue(h1);
    r.trace_shifted = trace_of(h1);
    r.pass_shifted = r.min_eig_shifted >= -eps_psd * r.trace_shifted;
  }
  r.pass = r.pass_unshifted && r.pass_shifted;
  std::ostringstream os;
  if (!r.pass_unshifted) {
    os << "Hankel matrix H_" << p << " = [mu_{i+j}] is not positive semidefinite (min eigenvalue " << r.min_eig
       << ")";
  }
  if (!r.pass_shifted) {
    if (!r.pass_unshifted) os << "; ";
    os << "shifted Hankel matrix H'_" << r.shifted_size << " = [mu_{i+j+1}] is not positive semidefinite (min eigenvalue "
       << r.min_eig_shifted << ")";
  }
  r.message = r.pass ? "Hankel sections are positive semidefinite" : os.str();
  return r;
}

int hankel_rank_cap(const MomentSequence& ms, int p_max, Precision precision, std::vector<double>* min_eigs) {
  const double floor_rel = std::max(ms.noise_floor, precision_floor(precision));
  double scale = 0.0;
  for (int n = 0; n <= std::min(2 * p_max - 2, ms.n_max()); ++n) scale = std::max(scale, std::fabs(ms.mu_at(n)));
  int cap = 0;
  for (int k = 1; k <= p_max && 2 * k - 2 <= ms.n_max(); ++k) {
    const double e = min_eigenvalue(hankel(ms, k, 0));
    if (min_eigs) min_eigs->push_back(e);
    if (!(e > 1e3 * floor_rel * scale * k)) break;
    cap = k;
  }
  return cap;
}

AtomicMeasure invert_moments(const MomentSequence& ms, int p, Precision precision) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "atom count p must be >= 1");
  if (2 * p - 1 > ms.n_max()) {
    throw Error(ErrorCode::InvalidArgument,
                "p=" + std::to_string(p) + " atoms need mu_0..mu_" + std::to_string(2 * p - 1));
  }
  const HankelReport check = hankel_psd_check(ms, p);
  if (!check.pass) throw Error(ErrorCode::NotStieltjes, check.message);
  std::vector<double> min_eigs;
  const int cap = hankel_rank_cap(ms, p, precision, &min_eigs);
  if (cap < 1) throw Error(ErrorCode::RankDeficient, "moment noise floor swamps even the 1x1 Hankel section");
  AtomicMeasure am = precision == Precision::Extended ? assemble_measure<dd_real>(ms, cap)
                                                      : assemble_measure<double>(ms, cap);
  am.requested_p = p;
  am.used_p = cap;
  am.cap_p = cap;
  am.hankel_min_eig = std::move(min_eigs);
  am.precision = precision;
  return am;
}

SpectralData measure_to_spectrum(const AtomicMeasure& am) {
  SpectralData sd;
  sd.source = SpectrumSource::Inverted;
  sd.volume = am.mu0;
  // Atoms are stored with x decreasing, so λ = 2/x comes out increasing.
  for (const Atom& a : am.atoms) sd.entries.push_back({2.0 / a.x, 0, a.w});
  return sd;
}

HeatContentCurve reconstruct_heat_content(const AtomicMeasure& am, const std::vector<double>& times) {
  HeatContentCurve curve;
  curve.provenance = CurveProvenance::Reconstructed;
  for (double t : times) {
    if (!(t > 0)) throw Error(ErrorCode::InvalidArgument, "reconstruction times must be positive");
    double q = 0.0;
    for (const Atom& a : am.atoms) q += a.w * std::exp(-t / a.x);
    curve.t.push_back(t);
    curve.q.push_back(q);
  }
  return curve;
}

}  // namespace mspec
