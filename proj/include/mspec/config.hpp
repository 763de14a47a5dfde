#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mspec/geometry.hpp"
#include "mspec/stieltjes.hpp"

namespace mspec {

// Every knob of a run. The text form is one `section.key = value` per line;
// `#` starts a comment. Lists are whitespace separated.
struct RunConfig {
  std::string pipeline = "all";
  std::string out = "out";

  std::string domain_type = "interval";
  std::vector<double> domain_params{0.0, 1.0};

  double grid_h = 1.0 / 512;
  bool grid_radial = true;  // disks use the radial reduction

  int moments_n_max = 6;
  double moments_tol = 1e-11;
  std::string moments_input;  // external moment CSV for `invert`

  std::size_t spectrum_m = 6;
  double spectrum_tol = 1e-9;
  std::string spectrum_source = "analytic";
  double spectrum_zero_tol = 1e-6;

  int invert_p = 5;
  Precision invert_precision = Precision::Extended;

  double heat_dt = 1e-4;
  double heat_t_min = 0.05;
  double heat_t_max = 1.0;
  int heat_samples = 30;
  int heat_fit_terms = 3;
  double heat_fit_dt = 1e-5;
  int heat_fit_samples = 40;

  std::vector<double> mc_x0{0.5, 0.0};
  std::uint64_t mc_paths = 100000;
  double mc_dt = 1e-5;
  std::uint64_t mc_seed = 1;
  unsigned mc_workers = 1;
  double mc_t = 0.5;
  double mc_s = 1.0;
  int mc_n_max = 2;
  std::uint64_t mc_step_cap = 100000000;

  double verify_tol = 1e-4;
  std::size_t verify_m = 50;

  double perturb_eps = 0.07;
  std::vector<double> perturb_f{1.0, 0.6, -0.8, -0.2};
  std::size_t perturb_m = 6;

  double compare_tol = 1e-3;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parse errors carry the offending line number; unknown and repeated keys
// are rejected. Numeric values also accept the fraction form `1/512`.
RunConfig parse_config(const std::string& text);
std::string emit_config(const RunConfig& cfg);

// Applies one `section.key` assignment (same rules as a config line).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);
std::vector<std::string> config_keys();

const std::vector<std::string>& pipeline_names();

DomainSpec make_domain(const RunConfig& cfg);

}  // namespace mspec
