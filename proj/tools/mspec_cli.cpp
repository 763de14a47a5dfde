// Batch driver: runs one pipeline per invocation, or compares / replays
// archived outputs. Talks to the library only through mspec.h.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "mspec/mspec.h"

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kCheck = 3 };

int report_error(mspec_status status) {
  std::cerr << "mspec: " << mspec_status_string(status) << ": " << mspec_last_error() << "\n";
  if (status == MSPEC_ERR_PARSE || status == MSPEC_ERR_INVALID_ARGUMENT) return kUsage;
  if (status == MSPEC_ERR_CHECK_FAILED) return kCheck;
  return kFailure;
}

struct Text {
  char* p = nullptr;
  ~Text() { mspec_string_free(p); }
};

using ConfigPtr = std::unique_ptr<mspec_config, decltype(&mspec_config_free)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exit-time moment spectra: moments, inversion, heat content and Monte Carlo oracles"};
  app.set_version_flag("--version", mspec_version());

  std::string config_path, out_dir, pipeline, precision;
  std::vector<std::string> assignments;
  bool strict = false, dump_matrix = false, dump_grid = false, print_config = false;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "config file (section.key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  app.add_option("--pipeline", pipeline, "moments|spectrum|invert|heat|mc|verify|perturb|all");
  app.add_flag("--strict", strict, "fail when any diagnostic check fails");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
  app.add_option("--precision", precision, "inversion arithmetic")->check(CLI::IsMember({"standard", "extended"}));
  app.add_option("--set", assignments, "extra key=value assignments, applied last");
  app.add_flag("--dump-matrix", dump_matrix, "write the discrete operator as 'row col value' lines");
  app.add_flag("--dump-grid", dump_grid, "write grid nodes as x,y,index,weight");
  app.add_flag("--print-config", print_config, "print the effective config and exit");

  auto* compare = app.add_subcommand("compare", "compare two lambda,multiplicity,a2 tables");
  std::string cmp_a, cmp_b, cmp_report;
  double cmp_tol = 1e-3, cmp_zero_tol = 1e-6;
  bool cmp_strict = false;
  compare->add_option("a", cmp_a)->required()->check(CLI::ExistingFile);
  compare->add_option("b", cmp_b)->required()->check(CLI::ExistingFile);
  compare->add_option("--tol", cmp_tol, "relative eigenvalue tolerance");
  compare->add_option("--zero-tol", cmp_zero_tol, "weights at or below zero_tol * volume are ignored");
  compare->add_option("--report", cmp_report, "also write the JSON report here");
  compare->add_flag("--strict", cmp_strict, "exit nonzero on unmatched entries");

  auto* replay = app.add_subcommand("replay", "re-run an archived manifest and check checksums");
  std::string manifest, replay_out;
  replay->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "directory for the re-run")->required();

  CLI11_PARSE(app, argc, argv);

  if (compare->parsed()) {
    Text report;
    int all = 0;
    const auto st = mspec_compare_files(cmp_a.c_str(), cmp_b.c_str(), cmp_tol, cmp_zero_tol, &report.p, &all);
    if (st != MSPEC_OK) return report_error(st);
    std::cout << report.p << "\n";
    if (!cmp_report.empty()) {
      std::FILE* f = std::fopen(cmp_report.c_str(), "w");
      if (!f) {
        std::cerr << "mspec: cannot write " << cmp_report << "\n";
        return kFailure;
      }
      std::fputs(report.p, f);
      std::fputs("\n", f);
      std::fclose(f);
    }
    return (cmp_strict && !all) ? kCheck : kOk;
  }

  if (replay->parsed()) {
    Text report;
    int reproduced = 0;
    const auto st = mspec_replay(manifest.c_str(), replay_out.c_str(), &report.p, &reproduced);
    if (st != MSPEC_OK) return report_error(st);
    std::cout << report.p << "\n";
    return reproduced ? kOk : kCheck;
  }

  mspec_config* raw = nullptr;
  auto st = config_path.empty() ? mspec_config_new(&raw) : mspec_config_load(config_path.c_str(), &raw);
  if (st != MSPEC_OK) return report_error(st);
  ConfigPtr cfg(raw, &mspec_config_free);

  auto set = [&](const std::string& key, const std::string& value) {
    const auto s = mspec_config_set(cfg.get(), key.c_str(), value.c_str());
    if (s != MSPEC_OK) std::exit(report_error(s));
  };
  if (!out_dir.empty()) set("run.out", out_dir);
  if (!pipeline.empty()) set("run.pipeline", pipeline);
  if (*seed_opt) set("mc.seed", std::to_string(seed));
  if (!precision.empty()) set("invert.precision", precision);
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      std::cerr << "mspec: --set expects key=value, got '" << a << "'\n";
      return kUsage;
    }
    set(a.substr(0, eq), a.substr(eq + 1));
  }

  if (print_config) {
    Text text;
    st = mspec_config_emit(cfg.get(), &text.p);
    if (st != MSPEC_OK) return report_error(st);
    std::cout << text.p;
    return kOk;
  }

  Text out;
  st = mspec_config_get(cfg.get(), "run.out", &out.p);
  if (st != MSPEC_OK) return report_error(st);
  const mspec_run_options options{strict ? 1 : 0, dump_matrix ? 1 : 0, dump_grid ? 1 : 0};
  Text report;
  st = mspec_run(cfg.get(), out.p, &options, &report.p);
  if (st != MSPEC_OK) return report_error(st);
  std::cout << "wrote " << out.p << "/report.json\n";
  return kOk;
}
