#include "mspec/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "mspec/analysis.hpp"
#include "mspec/error.hpp"
#include "mspec/io.hpp"
#include "mspec/moments.hpp"
#include "mspec/montecarlo.hpp"
#include "mspec/stieltjes.hpp"

namespace mspec {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json entries_json(const std::vector<SpectralEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) out.push_back({{"lambda", e.lambda}, {"multiplicity", e.multiplicity}, {"a2", e.a2}});
  return out;
}

json property_m_json(const PropertyMReport& r) {
  return {{"holds", r.holds}, {"violating", r.violating}, {"min_a2", r.min_a2}};
}

class Context {
 public:
  Context(const RunConfig& cfg, fs::path out, const RunOptions& options)
      : cfg(cfg), options(options), domain(make_domain(cfg)), out_(std::move(out)) {}

  const RunConfig& cfg;
  const RunOptions& options;
  DomainSpec domain;
  json report = json::object();
  json checks = json::array();
  json inputs = json::array();
  json files = json::array();

  void write(const std::string& name, const std::string& content) {
    io::write_file(out_ / name, content);
    files.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
  }

  template <class Writer>
  void write_with(const std::string& name, Writer&& writer) {
    std::ostringstream os;
    writer(os);
    write(name, os.str());
  }

  void check(const std::string& name, bool pass, json detail = json::object()) {
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(std::move(detail));
  }

  const DiscreteOperator& op() {
    if (!op_) {
      const bool radial = cfg.grid_radial && std::holds_alternative<Disk>(domain.shape());
      GridPtr grid = radial ? build_radial_grid(domain, cfg.grid_h) : build_grid(domain, cfg.grid_h);
      op_.emplace(assemble_half_laplacian(grid));
      report["grid"] = {{"h", cfg.grid_h}, {"nodes", grid->size()}, {"radial", radial}};
    }
    return *op_;
  }

  const std::vector<Field>& fields() {
    if (fields_.empty()) fields_ = exit_moment_fields(op(), cfg.moments_n_max, cfg.moments_tol);
    return fields_;
  }

  const MomentSequence& moments() {
    if (!moments_) moments_ = moment_sequence(fields(), cfg.moments_tol);
    return *moments_;
  }

  SpectralData reference_spectrum(std::size_t m) {
    if (cfg.spectrum_source == "analytic") {
      if (std::holds_alternative<Polygon>(domain.shape())) {
        throw Error(ErrorCode::Unsupported, "spectrum.source = analytic has no closed form for polygons; use numeric");
      }
      return analytic_spectrum(domain, m);
    }
    return numeric_spectrum(op(), m, cfg.spectrum_tol);
  }

  std::optional<AtomicMeasure> inverted;

 private:
  fs::path out_;
  std::optional<DiscreteOperator> op_;
  std::vector<Field> fields_;
  std::optional<MomentSequence> moments_;
};

double nearest_value(const Field& f, Point x) {
  const Grid& g = *f.grid;
  const Point probe = g.kind == GridKind::Radial ? Point{std::hypot(x.x, x.y), 0.0} : x;
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = std::hypot(g.nodes[i].x - probe.x, g.nodes[i].y - probe.y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return f.values[best];
}

void stage_moments(Context& ctx) {
  const MomentSequence& ms = ctx.moments();
  ctx.write_with("moments.csv", [&](std::ostream& os) { io::write_moments(os, ms); });
  json j;
  j["n_max"] = ms.n_max();
  for (int n = 0; n <= ms.n_max(); ++n) {
    j["A"].push_back(ms.A_at(n));
    j["mu"].push_back(ms.mu_at(n));
  }
  j["lambda1_estimate"] = ms.lambda1;
  json hankel = json::array();
  bool psd = true;
  for (int p = 1; p <= 4 && 2 * p - 2 <= ms.n_max(); ++p) {
    const HankelReport h = hankel_psd_check(ms, p);
    psd = psd && h.pass;
    hankel.push_back({{"p", p}, {"min_eig", h.min_eig}, {"min_eig_shifted", h.min_eig_shifted}, {"pass", h.pass}});
  }
  j["hankel"] = hankel;
  ctx.check("hankel_psd", psd);
  try {
    const CarlemanReport c = carleman_diagnostic(ms);
    j["carleman"] = {{"holds", c.holds}, {"margins", c.margins}, {"lambda1", c.lambda1}};
    ctx.check("carleman", c.holds);
  } catch (const Error& e) {
    j["carleman"] = {{"holds", false}, {"error", e.what()}};
    ctx.check("carleman", false);
  }
  ctx.report["moments"] = j;
}

void stage_spectrum(Context& ctx) {
  const SpectralData sd = ctx.reference_spectrum(ctx.cfg.spectrum_m);
  ctx.write_with("spectrum.csv", [&](std::ostream& os) { io::write_spectrum(os, sd); });
  const EssentialSpectrum ess = essential_spectrum(sd, ctx.cfg.spectrum_zero_tol);
  json partial = json::array();
  double sum = 0.0;
  for (const auto& e : sd.entries) partial.push_back(sum += e.a2);
  ctx.report["spectrum"] = {{"source", source_name(sd.source)},
                            {"entries", entries_json(sd.entries)},
                            {"spec_star", ess.spec_star},
                            {"vp", ess.vp},
                            {"degenerate", ess.degenerate},
                            {"property_m", property_m_json(property_m_report(sd, ctx.cfg.spectrum_zero_tol))},
                            {"partial_a2", partial},
                            {"volume", sd.volume}};
}

void stage_invert(Context& ctx) {
  MomentSequence ms;
  if (!ctx.cfg.moments_input.empty()) {
    const std::string text = io::read_file(ctx.cfg.moments_input);
    ctx.inputs.push_back({{"path", ctx.cfg.moments_input}, {"fnv1a64", hex64(fnv1a64(text))}});
    std::istringstream is(text);
    ms = io::read_moments(is);
  } else {
    ms = ctx.moments();
  }
  const int p = std::min(ctx.cfg.invert_p, (ms.n_max() + 1) / 2);
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "moment table is too short to invert");
  // Certify the largest sections the table supports, not only those used.
  const HankelReport h = hankel_psd_check(ms, ms.n_max() / 2 + 1);
  if (!h.pass) throw Error(ErrorCode::NotStieltjes, h.message);
  const AtomicMeasure am = invert_moments(ms, p, ctx.cfg.invert_precision);
  const SpectralData sd = measure_to_spectrum(am);
  ctx.write_with("atoms.csv", [&](std::ostream& os) { io::write_atoms(os, am); });
  ctx.write_with("inverted_spectrum.csv", [&](std::ostream& os) { io::write_spectrum(os, sd); });
  json atoms = json::array();
  for (const auto& a : am.atoms) atoms.push_back({{"x", a.x}, {"w", a.w}, {"lambda", 2.0 / a.x}});
  ctx.report["invert"] = {{"provenance", provenance_name(ms.provenance)},
                          {"precision", precision_name(am.precision)},
                          {"requested_p", ctx.cfg.invert_p},
                          {"p", p},
                          {"used_p", am.used_p},
                          {"hankel_min_eig", am.hankel_min_eig},
                          {"moment_residuals", am.moment_residuals},
                          {"discarded", am.discarded},
                          {"atoms", atoms}};
  ctx.inverted = am;
}

void stage_compare(Context& ctx) {
  const SpectralData ref = ctx.reference_spectrum(ctx.cfg.spectrum_m);
  const SpectralData inv = measure_to_spectrum(*ctx.inverted);
  const CompareReport cr = compare_spectra(ref, inv, ctx.cfg.compare_tol, ctx.cfg.spectrum_zero_tol);
  bool lambda1 = false;
  for (const auto& m : cr.matched) {
    if (!ref.entries.empty() && m.a.lambda == ref.entries.front().lambda) lambda1 = true;
  }
  ctx.report["compare"] = to_json(cr);
  ctx.check("lambda1_recovered", lambda1, {{"tol", ctx.cfg.compare_tol}});
}

void stage_heat(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const double vol = volume(ctx.domain);
  const auto times = log_spaced(cfg.heat_t_min, cfg.heat_t_max, static_cast<std::size_t>(cfg.heat_samples));
  const HeatContentCurve cn = heat_content_timestep(ctx.op(), times, cfg.heat_dt);
  ctx.write_with("heat_timestep.csv", [&](std::ostream& os) { io::write_curve(os, cn); });
  json j;
  const SpectralData sd = ctx.reference_spectrum(cfg.verify_m);
  const HeatContentCurve spectral = heat_content_spectral(sd, times);
  ctx.write_with("heat_spectral.csv", [&](std::ostream& os) { io::write_curve(os, spectral); });
  double diff = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) diff = std::max(diff, std::fabs(cn.q[i] - spectral.q[i]));
  j["timestep_vs_spectral"] = diff / vol;
  if (ctx.inverted) {
    const HeatContentCurve rec = reconstruct_heat_content(*ctx.inverted, times);
    ctx.write_with("heat_reconstructed.csv", [&](std::ostream& os) { io::write_curve(os, rec); });
    double d = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) d = std::max(d, std::fabs(cn.q[i] - rec.q[i]));
    j["reconstructed_vs_timestep"] = d / vol;
    ctx.check("heat_reconstruction", d <= 2e-2 * vol, {{"max_abs_over_volume", d / vol}});
  }
  const FitWindow w = default_fit_window(ctx.domain, cfg.grid_h);
  const auto fit_times = log_spaced(w.t_min, w.t_max, static_cast<std::size_t>(cfg.heat_fit_samples));
  const HeatContentCurve fine = heat_content_timestep(ctx.op(), fit_times, cfg.heat_fit_dt);
  ctx.write_with("heat_fit_curve.csv", [&](std::ostream& os) { io::write_curve(os, fine); });
  const AsymptoticFit fit = asymptotic_fit(fine, cfg.heat_fit_terms, w.t_min, w.t_max);
  ctx.write_with("hca_fit.csv", [&](std::ostream& os) { io::write_fit(os, fit); });
  const double q1 = boundary_coefficient(ctx.domain);
  const double q0_err = std::fabs(fit.coefficients[0] / vol - 1.0);
  const double q1_err = std::fabs(fit.coefficients[1] / q1 - 1.0);
  j["fit"] = {{"coefficients", fit.coefficients}, {"stderr", fit.stderr_},     {"t_min", fit.t_min},
              {"t_max", fit.t_max},               {"q0_expected", vol},        {"q0_relative_error", q0_err},
              {"q1_expected", q1},                {"q1_relative_error", q1_err}};
  ctx.check("hca_q0", q0_err < 2e-3, {{"relative_error", q0_err}});
  ctx.check("hca_q1", q1_err < 3e-2, {{"relative_error", q1_err}});
  ctx.report["heat"] = j;
}

void stage_mc(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  SimConfig sim;
  sim.domain = ctx.domain;
  sim.x0 = {cfg.mc_x0.empty() ? 0.0 : cfg.mc_x0[0], cfg.mc_x0.size() > 1 ? cfg.mc_x0[1] : 0.0};
  sim.paths = cfg.mc_paths;
  sim.dt = cfg.mc_dt;
  sim.seed = cfg.mc_seed;
  sim.workers = cfg.mc_workers;
  sim.step_cap = cfg.mc_step_cap;
  const ExitSamples s = simulate_exit_times(sim);
  ctx.write_with("mc_samples.csv", [&](std::ostream& os) { io::write_samples(os, s); });
  auto record = [](const McEstimate& e) {
    return json{{"value", e.value}, {"stderr", e.stderr_}, {"paths", e.paths},
                {"dt", e.dt},       {"seed", e.seed},      {"estimator", e.estimator}};
  };
  json moments = json::array();
  for (const auto& e : mc_moment_estimates(s, cfg.mc_n_max)) moments.push_back(record(e));
  json j{{"x0", {sim.x0.x, sim.x0.y}},
         {"capped", s.capped},
         {"moments", moments},
         {"survival", record(mc_survival(s, cfg.mc_t))},
         {"survival_t", cfg.mc_t},
         {"laplace", record(mc_laplace(s, cfg.mc_s))},
         {"laplace_s", cfg.mc_s}};
  j["survival"]["t"] = cfg.mc_t;
  j["laplace"]["s"] = cfg.mc_s;
  if (cfg.mc_n_max >= 1) {
    j["pde_reference"] = {{"mean_exit_time", nearest_value(ctx.fields().front(), sim.x0)},
                          {"laplace", nearest_value(laplace_transform(ctx.op(), cfg.mc_s), sim.x0)}};
  }
  ctx.report["mc"] = j;
}

void stage_verify(Context& ctx) {
  const MomentSequence& ms = ctx.moments();
  const SpectralData sd = ctx.reference_spectrum(ctx.cfg.verify_m);
  const IdentityReport rep = verify_identities(ms, sd, ms.n_max());
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"n", r.n},
                    {"gamma_zeta", r.lhs},
                    {"A_over_n", r.rhs},
                    {"relative_error", r.relative_error},
                    {"tail_bound", r.tail_bound}});
  }
  const auto pairs = lowest_eigenpairs(ctx.op(), 1, 1e-10);
  const PairingCheck pc = pairing_recursion(ctx.op(), ctx.fields(), pairs.front().phi);
  ctx.report["verify"] = {{"identities", rows},
                          {"max_relative_error", rep.max_relative_error()},
                          {"tol", ctx.cfg.verify_tol},
                          {"pairing", {{"lambda", pc.lambda}, {"relative_errors", pc.relative_errors}}}};
  const bool ok = rep.max_relative_error() < ctx.cfg.verify_tol;
  ctx.check("zeta_identity", ok, {{"max_relative_error", rep.max_relative_error()}});
  ctx.check("pairing_recursion", pc.max_error() < 1e-6, {{"max_relative_error", pc.max_error()}});
  if (!ok) {
    std::ostringstream os;
    os << "zeta identity residual " << rep.max_relative_error() << " exceeds verify.tol " << ctx.cfg.verify_tol;
    throw Error(ErrorCode::CheckFailed, os.str());
  }
}

void stage_perturb(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const DomainSpec base = as_polygon(ctx.domain);
  const DomainSpec moved = perturb_polygon(base, cfg.perturb_f, cfg.perturb_eps);
  json vertices = json::array();
  for (const auto& v : std::get<Polygon>(moved.shape()).vertices) vertices.push_back({v.x, v.y});
  const double zero_tol = cfg.spectrum_zero_tol;
  const SpectralData reference = numeric_spectrum(build_grid(ctx.domain, cfg.grid_h), cfg.perturb_m, cfg.spectrum_tol);
  json levels = json::array();
  std::vector<std::vector<bool>> classes;
  const char* names[] = {"perturbed_spectrum_h.csv", "perturbed_spectrum_h2.csv"};
  PropertyMReport first;
  for (int level = 0; level < 2; ++level) {
    const double h = cfg.grid_h / (level == 0 ? 1.0 : 2.0);
    const SpectralData sd = numeric_spectrum(build_grid(moved, h), cfg.perturb_m, cfg.spectrum_tol);
    ctx.write_with(names[level], [&](std::ostream& os) { io::write_spectrum(os, sd); });
    const PropertyMReport r = property_m_report(sd, zero_tol);
    if (level == 0) first = r;
    std::vector<bool> cls;
    for (const auto& e : sd.entries) cls.push_back(e.a2 > zero_tol * sd.volume);
    classes.push_back(cls);
    levels.push_back({{"h", h}, {"entries", entries_json(sd.entries)}, {"property_m", property_m_json(r)}});
  }
  const PropertyMReport unperturbed = property_m_report(reference, zero_tol);
  const bool consistent = classes[0] == classes[1];
  ctx.report["perturb"] = {{"eps", cfg.perturb_eps},
                           {"f", cfg.perturb_f},
                           {"vertices", vertices},
                           {"area", volume(moved)},
                           {"levels", levels},
                           {"unperturbed_property_m", property_m_json(unperturbed)},
                           {"consistent_across_resolutions", consistent},
                           {"same_report_as_unperturbed",
                            first.holds == unperturbed.holds && first.violating == unperturbed.violating}};
  ctx.check("perturb_consistent", consistent);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json run_pipeline(const RunConfig& cfg, const std::filesystem::path& out, const RunOptions& options) {
  Context ctx(cfg, out, options);
  fs::create_directories(out);
  ctx.report["pipeline"] = cfg.pipeline;
  ctx.report["version"] = kVersion;
  ctx.report["domain"] = {{"type", cfg.domain_type},
                          {"params", cfg.domain_params},
                          {"volume", volume(ctx.domain)},
                          {"boundary_measure", boundary_measure(ctx.domain)}};
  if (options.dump_grid) {
    ctx.write_with("grid.csv", [&](std::ostream& os) { io::write_grid(os, *ctx.op().grid()); });
  }
  if (options.dump_matrix) {
    ctx.write_with("matrix.txt", [&](std::ostream& os) { ctx.op().write_coordinates(os); });
  }
  std::string failure;
  ErrorCode failure_code = ErrorCode::CheckFailed;
  try {
    const std::string& p = cfg.pipeline;
    if (p == "moments") stage_moments(ctx);
    else if (p == "spectrum") stage_spectrum(ctx);
    else if (p == "invert") stage_invert(ctx);
    else if (p == "heat") stage_heat(ctx);
    else if (p == "mc") stage_mc(ctx);
    else if (p == "verify") stage_verify(ctx);
    else if (p == "perturb") stage_perturb(ctx);
    else if (p == "all") {
      stage_moments(ctx);
      stage_invert(ctx);
      stage_compare(ctx);
      stage_heat(ctx);
      stage_verify(ctx);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown pipeline '" + p + "'");
    }
  } catch (const Error& e) {
    failure = std::string(cfg.pipeline) + ": " + e.what();
    failure_code = e.code();
  }
  bool passed = failure.empty();
  std::vector<std::string> failed;
  for (const auto& c : ctx.checks) {
    if (!c["pass"].get<bool>()) failed.push_back(c["name"].get<std::string>());
  }
  ctx.report["checks"] = ctx.checks;
  if (!failure.empty()) ctx.report["error"] = failure;
  ctx.report["passed"] = passed && failed.empty();
  ctx.write("report.json", ctx.report.dump(2) + "\n");
  ctx.write("config.effective", emit_config(cfg));
  const json manifest{{"version", kVersion},
                      {"pipeline", cfg.pipeline},
                      {"seed", cfg.mc_seed},
                      {"options",
                       {{"strict", options.strict}, {"dump_matrix", options.dump_matrix}, {"dump_grid", options.dump_grid}}},
                      {"config", emit_config(cfg)},
                      {"inputs", ctx.inputs},
                      {"files", ctx.files}};
  io::write_file(out / "manifest.json", manifest.dump(2) + "\n");
  if (!failure.empty()) throw Error(failure_code, failure);
  if (options.strict && !failed.empty()) {
    std::string list;
    for (const auto& f : failed) list += (list.empty() ? "" : ", ") + f;
    throw Error(ErrorCode::CheckFailed, cfg.pipeline + ": failed checks: " + list);
  }
  return ctx.report;
}

CompareReport compare_spectra(const SpectralData& a, const SpectralData& b, double tol, double zero_tol) {
  auto essential = [zero_tol](const SpectralData& sd, std::size_t& skipped) {
    const double vol = sd.volume > 0 ? sd.volume : sd.total_weight();
    std::vector<SpectralEntry> keep;
    for (const auto& e : sd.entries) {
      if (e.a2 > zero_tol * vol) keep.push_back(e);
      else ++skipped;
    }
    return keep;
  };
  CompareReport r;
  const auto ea = essential(a, r.skipped_a);
  const auto eb = essential(b, r.skipped_b);
  std::vector<bool> used(eb.size(), false);
  for (const auto& x : ea) {
    std::size_t best = eb.size();
    double best_gap = INFINITY;
    for (std::size_t k = 0; k < eb.size(); ++k) {
      if (used[k]) continue;
      const double gap = std::fabs(x.lambda - eb[k].lambda) / std::max(x.lambda, eb[k].lambda);
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    if (best < eb.size() && best_gap <= tol) {
      used[best] = true;
      const auto& y = eb[best];
      const double a2_dev = std::fabs(x.a2 - y.a2) / std::max(x.a2, y.a2);
      r.matched.push_back({x, y, best_gap, a2_dev});
      r.max_lambda_deviation = std::max(r.max_lambda_deviation, best_gap);
      r.max_a2_deviation = std::max(r.max_a2_deviation, a2_dev);
    } else {
      r.unmatched_a.push_back(x);
    }
  }
  for (std::size_t k = 0; k < eb.size(); ++k) {
    if (!used[k]) r.unmatched_b.push_back(eb[k]);
  }
  return r;
}

nlohmann::json to_json(const CompareReport& r) {
  json matched = json::array();
  for (const auto& m : r.matched) {
    matched.push_back({{"lambda_a", m.a.lambda},
                       {"lambda_b", m.b.lambda},
                       {"a2_a", m.a.a2},
                       {"a2_b", m.b.a2},
                       {"lambda_deviation", m.lambda_deviation},
                       {"a2_deviation", m.a2_deviation}});
  }
  return {{"matched", matched},
          {"unmatched_a", entries_json(r.unmatched_a)},
          {"unmatched_b", entries_json(r.unmatched_b)},
          {"skipped_a", r.skipped_a},
          {"skipped_b", r.skipped_b},
          {"max_lambda_deviation", r.max_lambda_deviation},
          {"max_a2_deviation", r.max_a2_deviation},
          {"all_matched", r.all_matched()}};
}

nlohmann::json replay_manifest(const std::filesystem::path& manifest_path, const std::filesystem::path& out) {
  json manifest;
  try {
    manifest = json::parse(io::read_file(manifest_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "manifest " + manifest_path.string() + ": " + e.what());
  }
  const RunConfig cfg = parse_config(manifest.at("config").get<std::string>());
  for (const auto& in : manifest.value("inputs", json::array())) {
    const std::string path = in.at("path").get<std::string>();
    if (hex64(fnv1a64(io::read_file(path))) != in.at("fnv1a64").get<std::string>()) {
      throw Error(ErrorCode::Io, "archived input " + path + " has changed since the recorded run");
    }
  }
  RunOptions options;
  const json opts = manifest.value("options", json::object());
  options.dump_matrix = opts.value("dump_matrix", false);
  options.dump_grid = opts.value("dump_grid", false);
  std::string failure;
  try {
    run_pipeline(cfg, out, options);
  } catch (const Error& e) {
    failure = e.what();
  }
  json files = json::array();
  bool all = true;
  for (const auto& f : manifest.at("files")) {
    const std::string name = f.at("name").get<std::string>();
    const std::string expected = f.at("fnv1a64").get<std::string>();
    std::string actual = "missing";
    if (fs::exists(out / name)) actual = hex64(fnv1a64(io::read_file(out / name)));
    const bool match = actual == expected;
    all = all && match;
    files.push_back({{"name", name}, {"expected", expected}, {"actual", actual}, {"match", match}});
  }
  json report{{"reproduced", all}, {"files", files}};
  if (!failure.empty()) report["run_error"] = failure;
  return report;
}

}  // namespace mspec
