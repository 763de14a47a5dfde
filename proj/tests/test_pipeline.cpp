#include <doctest.h>

#include <filesystem>
#include <functional>
#include <sstream>
#include <numbers>
#include <string>

#include "mspec/error.hpp"
#include "mspec/io.hpp"
#include "mspec/pipeline.hpp"

using namespace mspec;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "mspec_pipeline_test" / name;
  fs::remove_all(p);
  return p;
}

RunConfig interval(const std::string& pipeline) {
  RunConfig c;
  c.pipeline = pipeline;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST_CASE("verify pipeline writes a passing report") {
  const fs::path out = scratch("verify");
  const json r = run_pipeline(interval("verify"), out);
  CHECK(r["passed"].get<bool>());
  CHECK(r["verify"]["identities"].size() == 6);
  for (const char* f : {"report.json", "config.effective", "manifest.json"}) CHECK(fs::exists(out / f));
  const json manifest = json::parse(io::read_file(out / "manifest.json"));
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["pipeline"] == "verify");
  CHECK(parse_config(manifest["config"].get<std::string>()) == interval("verify"));
  CHECK(parse_config(io::read_file(out / "config.effective")) == interval("verify"));
}

TEST_CASE("moments pipeline checks Hankel sections and Carleman") {
  const fs::path out = scratch("moments");
  const json r = run_pipeline(interval("moments"), out);
  CHECK(r["passed"].get<bool>());
  const MomentSequence ms = [&] {
    std::istringstream is(io::read_file(out / "moments.csv"));
    return io::read_moments(is);
  }();
  CHECK(ms.n_max() == 6);
  CHECK(ms.A_at(1) == doctest::Approx(1.0 / 6).epsilon(1e-4));
}

TEST_CASE("invert refuses a non-Stieltjes table") {
  RunConfig c = interval("invert");
  c.moments_input = std::string(MSPEC_TEST_DATA) + "/not_stieltjes.csv";
  CHECK(code_of([&] { run_pipeline(c, scratch("bad")); }) == ErrorCode::NotStieltjes);
}

TEST_CASE("all pipeline on the interval") {
  const fs::path out = scratch("all");
  const json r = run_pipeline(interval("all"), out);
  CHECK(r["passed"].get<bool>());
  for (const char* f : {"moments.csv", "atoms.csv", "inverted_spectrum.csv", "heat_timestep.csv", "hca_fit.csv"}) {
    CHECK(fs::exists(out / f));
  }
  const double lambda1 = r["invert"]["atoms"][0]["lambda"].get<double>();
  CHECK(lambda1 == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("strict mode turns failed checks into an error") {
  RunConfig c = interval("all");
  c.compare_tol = 1e-9;
  const json lax = run_pipeline(c, scratch("lax"));
  CHECK_FALSE(lax["passed"].get<bool>());
  const fs::path out = scratch("strict");
  RunOptions strict;
  strict.strict = true;
  CHECK(code_of([&] { run_pipeline(c, out, strict); }) == ErrorCode::CheckFailed);
  CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("zero perturbation reproduces the square report") {
  RunConfig c;
  c.pipeline = "perturb";
  c.domain_type = "rectangle";
  c.domain_params = {1, 1};
  c.grid_h = 1.0 / 16;
  c.perturb_eps = 0.0;
  const json r = run_pipeline(c, scratch("perturb"));
  CHECK(r["perturb"]["same_report_as_unperturbed"].get<bool>());
  CHECK(r["perturb"]["consistent_across_resolutions"].get<bool>());
  CHECK_FALSE(r["perturb"]["unperturbed_property_m"]["holds"].get<bool>());
}

TEST_CASE("manifest replay reproduces every file") {
  const fs::path out = scratch("original");
  RunConfig c = interval("all");
  run_pipeline(c, out);
  const json rep = replay_manifest(out / "manifest.json", scratch("replayed"));
  CHECK(rep["reproduced"].get<bool>());
  CHECK(rep["files"].size() >= 8);

  json manifest = json::parse(io::read_file(out / "manifest.json"));
  manifest["files"][0]["fnv1a64"] = "0000000000000000";
  io::write_file(out / "tampered.json", manifest.dump());
  const json bad = replay_manifest(out / "tampered.json", scratch("replayed2"));
  CHECK_FALSE(bad["reproduced"].get<bool>());
}

TEST_CASE("Monte Carlo stage is seed-reproducible") {
  RunConfig c;
  c.pipeline = "mc";
  c.mc_paths = 2000;
  c.mc_dt = 1e-4;
  c.mc_seed = 77;
  c.grid_h = 1.0 / 64;
  const fs::path a = scratch("mc_a"), b = scratch("mc_b");
  run_pipeline(c, a);
  c.mc_workers = 4;
  run_pipeline(c, b);
  CHECK(io::read_file(a / "mc_samples.csv") == io::read_file(b / "mc_samples.csv"));
}

TEST_CASE("spectrum comparison") {
  const SpectralData sq = analytic_spectrum(DomainSpec::rectangle(1, 1), 7);
  const CompareReport self = compare_spectra(sq, sq, 1e-6);
  CHECK(self.all_matched());
  CHECK(self.matched.size() == 3);
  CHECK(self.skipped_a == 4);
  CHECK(self.max_lambda_deviation == 0.0);

  SpectralData shifted = sq;
  for (auto& e : shifted.entries) e.lambda *= 1.0005;
  CHECK(compare_spectra(sq, shifted, 1e-3).all_matched());
  const CompareReport off = compare_spectra(sq, shifted, 1e-4);
  CHECK_FALSE(off.all_matched());
  CHECK(off.unmatched_a.size() == 3);
  CHECK(to_json(off)["all_matched"] == false);

  const SpectralData iv = analytic_spectrum(DomainSpec::interval(0, 1), 6);
  CHECK_FALSE(compare_spectra(iv, sq, 1e-3).all_matched());
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
