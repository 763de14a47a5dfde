#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mspec/config.hpp"
#include "mspec/spectral.hpp"

namespace mspec {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
  // Failed diagnostic checks become a CheckFailed error instead of a
  // flag in the report.
  bool strict = false;
  bool dump_matrix = false;
  bool dump_grid = false;
};

// Runs cfg.pipeline, writing CSV/JSON artifacts, the effective config
// (`config.effective`) and `manifest.json` into `out`. Returns the report.
nlohmann::json run_pipeline(const RunConfig& cfg, const std::filesystem::path& out, const RunOptions& options = {});

struct SpectrumMatch {
  SpectralEntry a;
  SpectralEntry b;
  double lambda_deviation = 0.0;  // relative
  double a2_deviation = 0.0;      // relative to the larger weight
};

struct CompareReport {
  std::vector<SpectrumMatch> matched;
  std::vector<SpectralEntry> unmatched_a;
  std::vector<SpectralEntry> unmatched_b;
  std::size_t skipped_a = 0;  // entries with a2 <= zero_tol * volume
  std::size_t skipped_b = 0;
  double max_lambda_deviation = 0.0;
  double max_a2_deviation = 0.0;

  bool all_matched() const { return unmatched_a.empty() && unmatched_b.empty(); }
};

// Tolerance-aware set comparison of the essential parts of two tables:
// entries are paired in increasing λ when their relative λ gap is <= tol.
CompareReport compare_spectra(const SpectralData& a, const SpectralData& b, double tol, double zero_tol = kDefaultZeroTol);
nlohmann::json to_json(const CompareReport& report);

// Re-runs the config archived in a manifest into `out` and checks every
// recorded checksum. The report lists mismatching files.
nlohmann::json replay_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace mspec
