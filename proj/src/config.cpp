#include "mspec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "mspec/error.hpp"
#include "mspec/io.hpp"

namespace mspec {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const double den = to_number(trim(text.substr(slash + 1)));
    if (den == 0.0) throw Error(ErrorCode::Parse, "division by zero in '" + text + "'");
    return to_number(trim(text.substr(0, slash))) / den;
  }
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) throw Error(ErrorCode::Parse, "'" + text + "' is not a number");
  return v;
}

template <class Int>
Int to_integer(const std::string& text) {
  Int v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) throw Error(ErrorCode::Parse, "'" + text + "' is not an integer");
  return v;
}

std::vector<double> to_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (is >> item) out.push_back(to_number(item));
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + io::format_double(x);
  return s;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::Parse, message);
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key real(const std::string& name, double RunConfig::*m, bool positive = true) {
  return {name,
          [=](RunConfig& c, const std::string& v) {
            const double x = to_number(v);
            require(std::isfinite(x) && (!positive || x > 0), name + " must be a positive number");
            c.*m = x;
          },
          [=](const RunConfig& c) { return io::format_double(c.*m); }};
}

template <class Int>
Key integer(const std::string& name, Int RunConfig::*m, Int min_value) {
  return {name,
          [=](RunConfig& c, const std::string& v) {
            const Int x = to_integer<Int>(v);
            require(x >= min_value, name + " must be >= " + std::to_string(min_value));
            c.*m = x;
          },
          [=](const RunConfig& c) { return std::to_string(c.*m); }};
}

Key text(const std::string& name, std::string RunConfig::*m, std::vector<std::string> allowed = {}) {
  return {name,
          [=](RunConfig& c, const std::string& v) {
            if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
              std::string list;
              for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
              throw Error(ErrorCode::Parse, name + " must be one of: " + list);
            }
            c.*m = v;
          },
          [=](const RunConfig& c) { return c.*m; }};
}

Key list(const std::string& name, std::vector<double> RunConfig::*m) {
  return {name, [=](RunConfig& c, const std::string& v) { c.*m = to_list(v); },
          [=](const RunConfig& c) { return from_list(c.*m); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(text("run.pipeline", &RunConfig::pipeline, pipeline_names()));
    k.push_back(text("run.out", &RunConfig::out));
    k.push_back(text("domain.type", &RunConfig::domain_type, {"interval", "rectangle", "disk", "polygon"}));
    k.push_back(list("domain.params", &RunConfig::domain_params));
    k.push_back(real("grid.h", &RunConfig::grid_h));
    k.push_back({"grid.radial",
                 [](RunConfig& c, const std::string& v) {
                   require(v == "true" || v == "false", "grid.radial must be true or false");
                   c.grid_radial = v == "true";
                 },
                 [](const RunConfig& c) { return std::string(c.grid_radial ? "true" : "false"); }});
    k.push_back(integer("moments.n_max", &RunConfig::moments_n_max, 1));
    k.push_back(real("moments.tol", &RunConfig::moments_tol));
    k.push_back(text("moments.input", &RunConfig::moments_input));
    k.push_back(integer<std::size_t>("spectrum.m", &RunConfig::spectrum_m, 1));
    k.push_back(real("spectrum.tol", &RunConfig::spectrum_tol));
    k.push_back(text("spectrum.source", &RunConfig::spectrum_source, {"analytic", "numeric"}));
    k.push_back(real("spectrum.zero_tol", &RunConfig::spectrum_zero_tol));
    k.push_back(integer("invert.p", &RunConfig::invert_p, 1));
    k.push_back({"invert.precision",
                 [](RunConfig& c, const std::string& v) { c.invert_precision = precision_from_name(v); },
                 [](const RunConfig& c) { return std::string(precision_name(c.invert_precision)); }});
    k.push_back(real("heat.dt", &RunConfig::heat_dt));
    k.push_back(real("heat.t_min", &RunConfig::heat_t_min));
    k.push_back(real("heat.t_max", &RunConfig::heat_t_max));
    k.push_back(integer("heat.samples", &RunConfig::heat_samples, 2));
    k.push_back(integer("heat.fit_terms", &RunConfig::heat_fit_terms, 2));
    k.push_back(real("heat.fit_dt", &RunConfig::heat_fit_dt));
    k.push_back(integer("heat.fit_samples", &RunConfig::heat_fit_samples, 4));
    k.push_back(list("mc.x0", &RunConfig::mc_x0));
    k.push_back(integer<std::uint64_t>("mc.paths", &RunConfig::mc_paths, 1));
    k.push_back(real("mc.dt", &RunConfig::mc_dt));
    k.push_back(integer<std::uint64_t>("mc.seed", &RunConfig::mc_seed, 0));
    k.push_back(integer<unsigned>("mc.workers", &RunConfig::mc_workers, 1));
    k.push_back(real("mc.t", &RunConfig::mc_t));
    k.push_back(real("mc.s", &RunConfig::mc_s, false));
    k.push_back(integer("mc.n_max", &RunConfig::mc_n_max, 0));
    k.push_back(integer<std::uint64_t>("mc.step_cap", &RunConfig::mc_step_cap, 1));
    k.push_back(real("verify.tol", &RunConfig::verify_tol));
    k.push_back(integer<std::size_t>("verify.m", &RunConfig::verify_m, 1));
    k.push_back(real("perturb.eps", &RunConfig::perturb_eps, false));
    k.push_back(list("perturb.f", &RunConfig::perturb_f));
    k.push_back(integer<std::size_t>("perturb.m", &RunConfig::perturb_m, 1));
    k.push_back(real("compare.tol", &RunConfig::compare_tol));
    return k;
  }();
  return table;
}

const Key& find_key(const std::string& name) {
  for (const auto& k : keys()) {
    if (k.name == name) return k;
  }
  throw Error(ErrorCode::Parse, "unknown key '" + name + "'");
}

}  // namespace

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"moments", "spectrum", "invert", "heat",
                                              "mc",      "verify",   "perturb", "all"};
  return names;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.name);
  return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_key(key).set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return find_key(key).get(cfg); }

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    try {
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::Parse, "expected 'section.key = value'");
      const std::string key = trim(body.substr(0, eq));
      if (!seen.insert(key).second) throw Error(ErrorCode::Parse, "duplicate key '" + key + "'");
      set_config_value(cfg, key, trim(body.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

DomainSpec make_domain(const RunConfig& cfg) {
  const auto& p = cfg.domain_params;
  auto need = [&](std::size_t n) {
    if (p.size() != n) {
      throw Error(ErrorCode::InvalidArgument,
                  "domain.params for " + cfg.domain_type + " needs " + std::to_string(n) + " values");
    }
  };
  if (cfg.domain_type == "interval") {
    need(2);
    return DomainSpec::interval(p[0], p[1]);
  }
  if (cfg.domain_type == "rectangle") {
    need(2);
    return DomainSpec::rectangle(p[0], p[1]);
  }
  if (cfg.domain_type == "disk") {
    need(1);
    return DomainSpec::disk(p[0]);
  }
  if (p.size() < 6 || p.size() % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "domain.params for polygon lists x y pairs of at least 3 vertices");
  }
  std::vector<Point> v;
  for (std::size_t i = 0; i < p.size(); i += 2) v.push_back({p[i], p[i + 1]});
  return DomainSpec::polygon(std::move(v));
}

}  // namespace mspec
