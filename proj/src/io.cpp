#include "mspec/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mspec/error.hpp"

namespace mspec::io {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
  return v;
}

// "# a=1,b=2" -> {a: 1, b: 2}
std::map<std::string, std::string> parse_meta(const std::string& line) {
  std::map<std::string, std::string> meta;
  for (const auto& item : split(trim(line.substr(1)), ',')) {
    const auto eq = item.find('=');
    if (eq != std::string::npos) meta[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return meta;
}

struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
};

Table read_table(std::istream& is, const std::vector<std::string>& header) {
  Table t;
  std::string line;
  int number = 0;
  bool seen_header = false;
  while (std::getline(is, line)) {
    ++number;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto m = parse_meta(s);
      t.meta.insert(m.begin(), m.end());
      continue;
    }
    auto cells = split(s, ',');
    if (!seen_header) {
      if (cells != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw Error(ErrorCode::Parse, "line " + std::to_string(number) + ": expected header '" + want + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(number) + ": expected " + std::to_string(header.size()) +
                                        " columns, found " + std::to_string(cells.size()));
    }
    t.rows.emplace_back(number, std::move(cells));
  }
  if (!seen_header) throw Error(ErrorCode::Parse, "missing CSV header");
  return t;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_moments(std::ostream& os, const MomentSequence& ms) {
  os << "# provenance=" << provenance_name(ms.provenance) << ",noise_floor=" << format_double(ms.noise_floor)
     << ",lambda1=" << format_double(ms.lambda1) << "\n";
  os << "n,A_n,mu_n\n";
  for (int n = 0; n <= ms.n_max(); ++n) {
    os << n << "," << to_string(ms.A[static_cast<std::size_t>(n)]) << "," << to_string(ms.mu[static_cast<std::size_t>(n)])
       << "\n";
  }
}

MomentSequence read_moments(std::istream& is) {
  const Table t = read_table(is, {"n", "A_n", "mu_n"});
  if (t.rows.empty()) throw Error(ErrorCode::Parse, "moment table has no rows");
  std::vector<dd_real> A;
  dd_real factorial(1.0);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& [line, cells] = t.rows[k];
    if (cells[0] != std::to_string(k)) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": expected n=" + std::to_string(k));
    }
    dd_real a, mu;
    try {
      a = dd_from_string(cells[1]);
      mu = dd_from_string(cells[2]);
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + e.what());
    }
    if (k > 0) factorial = factorial * dd_real(static_cast<double>(k));
    const double expect = static_cast<double>(a / factorial);
    if (std::fabs(static_cast<double>(mu) - expect) > 1e-12 * std::fabs(expect) + 1e-300) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": mu_n does not equal A_n/n!");
    }
    A.push_back(a);
  }
  Provenance prov = Provenance::Pde;
  double noise = 1e-11;
  if (auto it = t.meta.find("provenance"); it != t.meta.end()) prov = provenance_from_name(it->second);
  if (auto it = t.meta.find("noise_floor"); it != t.meta.end()) noise = parse_double(it->second, 1);
  return make_moment_sequence(std::move(A), prov, noise);
}

void write_spectrum(std::ostream& os, const SpectralData& sd) {
  os << "# source=" << source_name(sd.source) << ",volume=" << format_double(sd.volume) << "\n";
  os << "lambda,multiplicity,a2\n";
  for (const auto& e : sd.entries) {
    os << format_double(e.lambda) << "," << e.multiplicity << "," << format_double(e.a2) << "\n";
  }
}

SpectralData read_spectrum(std::istream& is) {
  const Table t = read_table(is, {"lambda", "multiplicity", "a2"});
  SpectralData sd;
  if (auto it = t.meta.find("source"); it != t.meta.end()) sd.source = source_from_name(it->second);
  if (auto it = t.meta.find("volume"); it != t.meta.end()) sd.volume = parse_double(it->second, 1);
  for (const auto& [line, cells] : t.rows) {
    SpectralEntry e;
    e.lambda = parse_double(cells[0], line);
    e.multiplicity = static_cast<int>(parse_double(cells[1], line));
    e.a2 = parse_double(cells[2], line);
    if (!(e.lambda > 0) || e.multiplicity < 0) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": invalid spectral entry");
    }
    if (!sd.entries.empty() && !(e.lambda > sd.entries.back().lambda)) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": eigenvalues must increase");
    }
    sd.entries.push_back(e);
  }
  if (sd.volume == 0.0) sd.volume = sd.total_weight();
  return sd;
}

void write_atoms(std::ostream& os, const AtomicMeasure& am) {
  os << "# precision=" << precision_name(am.precision) << ",requested_p=" << am.requested_p
     << ",used_p=" << am.used_p << ",max_residual=" << format_double(am.max_residual) << "\n";
  os << "x,w\n";
  for (const auto& a : am.atoms) os << to_string(a.x_dd) << "," << to_string(a.w_dd) << "\n";
}

void write_curve(std::ostream& os, const HeatContentCurve& c) {
  os << "# provenance=" << curve_provenance_name(c.provenance) << "\n";
  os << "t,q\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) os << format_double(c.t[i]) << "," << format_double(c.q[i]) << "\n";
}

void write_fit(std::ostream& os, const AsymptoticFit& fit) {
  os << "# t_min=" << format_double(fit.t_min) << ",t_max=" << format_double(fit.t_max)
     << ",residual=" << format_double(fit.residual_norm) << "\n";
  os << "n,q_n,stderr\n";
  for (std::size_t n = 0; n < fit.coefficients.size(); ++n) {
    os << n << "," << format_double(fit.coefficients[n]) << "," << format_double(fit.stderr_[n]) << "\n";
  }
}

void write_grid(std::ostream& os, const Grid& g) {
  os << "x,y,index,weight\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << format_double(g.nodes[i].x) << "," << format_double(g.nodes[i].y) << "," << i << ","
       << format_double(g.weights[i]) << "\n";
  }
}

void write_samples(std::ostream& os, const ExitSamples& s) {
  os << "# seed=" << s.seed << ",dt=" << format_double(s.dt) << ",capped=" << s.capped << "\n";
  os << "path_index,tau\n";
  for (std::size_t i = 0; i < s.tau.size(); ++i) os << s.path_index[i] << "," << format_double(s.tau[i]) << "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace mspec::io
