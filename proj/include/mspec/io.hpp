#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mspec/analysis.hpp"
#include "mspec/geometry.hpp"
#include "mspec/moments.hpp"
#include "mspec/montecarlo.hpp"
#include "mspec/spectral.hpp"
#include "mspec/stieltjes.hpp"

namespace mspec::io {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// n,A_n,mu_n with 32 significant digits, preceded by a
// "# provenance=..,noise_floor=..,lambda1=.." line.
void write_moments(std::ostream& os, const MomentSequence& ms);
// Accepts the commented header or a bare table (provenance then defaults
// to pde). Rows must be n = 0, 1, 2, ... in order; mu_n must equal A_n/n!.
MomentSequence read_moments(std::istream& is);

// lambda,multiplicity,a2 preceded by "# source=..,volume=..".
void write_spectrum(std::ostream& os, const SpectralData& sd);
SpectralData read_spectrum(std::istream& is);

void write_atoms(std::ostream& os, const AtomicMeasure& am);
void write_curve(std::ostream& os, const HeatContentCurve& c);
void write_fit(std::ostream& os, const AsymptoticFit& fit);
void write_grid(std::ostream& os, const Grid& g);
void write_samples(std::ostream& os, const ExitSamples& s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace mspec::io
