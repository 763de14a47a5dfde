#pragma once

#include <string>
#include <vector>

#include "mspec/discrete_ops.hpp"
#include "mspec/geometry.hpp"

namespace mspec {

enum class SpectrumSource { Analytic, Numeric, Inverted };

const char* source_name(SpectrumSource s);
SpectrumSource source_from_name(const std::string& name);

struct SpectralEntry {
  double lambda = 0.0;
  int multiplicity = 0;  // 0 = unknown
  double a2 = 0.0;       // squared norm of the projection of 1 onto the eigenspace
};

// Eigenvalue clusters of the positive Dirichlet Laplacian with their share
// of the volume; λ strictly increasing.
struct SpectralData {
  std::vector<SpectralEntry> entries;
  SpectrumSource source = SpectrumSource::Analytic;
  double volume = 0.0;

  std::size_t size() const { return entries.size(); }
  double total_weight() const;
};

// Relative gap under which neighbouring eigenvalues form one cluster.
inline constexpr double kClusterThreshold = 1e-6;
inline constexpr double kDefaultZeroTol = 1e-6;

// First m clusters in closed form. Intervals and rectangles list every
// cluster; for disks only the radial modes (the only ones with a2 > 0) are
// listed, at λ = (j_{0,n}/R)^2 with a2 = 4πR^2 / j_{0,n}^2.
SpectralData analytic_spectrum(const DomainSpec& spec, std::size_t m);

// First m clusters of the discrete operator; a2 is summed over the
// orthonormal members of each cluster, which makes it basis independent.
SpectralData numeric_spectrum(const DiscreteOperator& op, std::size_t m, double tol = 1e-9);
SpectralData numeric_spectrum(GridPtr grid, std::size_t m, double tol = 1e-9);

// Groups sorted eigenpairs into clusters and projects the constant onto each.
SpectralData cluster_eigenpairs(const std::vector<Eigenpair>& pairs, double volume,
                                double threshold = kClusterThreshold);

struct EssentialSpectrum {
  std::vector<double> spec_star;
  std::vector<double> vp;
  bool degenerate = false;  // no entry survived the filter
};

EssentialSpectrum essential_spectrum(const SpectralData& sd, double zero_tol = kDefaultZeroTol);

struct PropertyMReport {
  bool holds = false;
  std::vector<double> violating;
  double min_a2 = 0.0;
};

PropertyMReport property_m_report(const SpectralData& sd, double zero_tol = kDefaultZeroTol);

struct PairingCheck {
  double lambda = 0.0;  // discrete Rayleigh quotient of φ (positive Laplacian)
  // For k = 1..: relative error of <u_k, φ> against (2/λ) k <u_{k-1}, φ>.
  std::vector<double> relative_errors;
  double max_error() const;
};

// Eigen-recursion check on discrete exit-moment fields. λ is taken as
// the discrete Rayleigh quotient of φ, so sampled analytic eigenfunctions
// that are exact discrete eigenvectors satisfy the identity to solver
// precision.
PairingCheck pairing_recursion(const DiscreteOperator& op, const std::vector<Field>& fields, const Field& phi);

}  // namespace mspec
