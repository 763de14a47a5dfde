#include "mspec/montecarlo.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "mspec/error.hpp"
#include "mspec/numerics.hpp"

namespace mspec {
namespace {

constexpr std::uint64_t kStartBlockBase = std::uint64_t{1} << 63;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Block philox(Philox4x32::Block ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(0xD2511F53u, ctr[0], hi0, lo0);
    mulhilo(0xCD9E8D57u, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }
  return ctr;
}

// Stream of standard normals for one path.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path, std::uint64_t first_block = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_(path),
        block_(first_block) {}

  // Two 53-bit uniforms in [0, 1) from one fresh Philox block.
  void uniforms(double& u1, double& u2) {
    const auto r = next_block();
    u1 = to_unit(r[0], r[1]);
    u2 = to_unit(r[2], r[3]);
  }

  // Marsaglia polar pair; each attempt uses two 32-bit words of a block.
  void normals(double& z1, double& z2) {
    double v1, v2, s;
    do {
      if (pos_ == 4) {
        buffer_ = next_block();
        pos_ = 0;
      }
      v1 = centered(buffer_[pos_]);
      v2 = centered(buffer_[pos_ + 1]);
      pos_ += 2;
      s = v1 * v1 + v2 * v2;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    z1 = v1 * f;
    z2 = v2 * f;
  }

 private:
  static double to_unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  Philox4x32::Block next_block() {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)};
    ++block_;
    return philox(ctr, key_);
  }

  // (2 r + 1) / 2^32 - 1, symmetric in (-1, 1).
  static double centered(std::uint32_t r) { return (2.0 * r + 1.0) * 0x1.0p-32 - 1.0; }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t path_;
  std::uint64_t block_;
  Philox4x32::Block buffer_{};
  int pos_ = 4;
};

// Number of steps until the walk leaves the domain, or step_cap + 1.
template <class Inside>
std::uint64_t walk(Point start, double sigma, std::uint64_t cap, NormalStream& rng, int dim, Inside inside) {
  double x = start.x, y = start.y;
  std::uint64_t k = 0;
  double z1, z2;
  if (dim == 1) {
    while (k < cap) {
      rng.normals(z1, z2);
      x += sigma * z1;
      ++k;
      if (!inside(x, y)) return k;
      if (k == cap) break;
      x += sigma * z2;
      ++k;
      if (!inside(x, y)) return k;
    }
    return cap + 1;
  }
  while (k < cap) {
    rng.normals(z1, z2);
    x += sigma * z1;
    y += sigma * z2;
    ++k;
    if (!inside(x, y)) return k;
  }
  return cap + 1;
}

std::uint64_t exit_steps(const DomainSpec& d, Point start, double sigma, std::uint64_t cap, NormalStream& rng) {
  const auto& shape = d.shape();
  if (const auto* s = std::get_if<Interval>(&shape)) {
    const double a = s->a, b = s->b;
    return walk(start, sigma, cap, rng, 1, [a, b](double x, double) { return x > a && x < b; });
  }
  if (const auto* s = std::get_if<Rectangle>(&shape)) {
    const double lx = s->lx, ly = s->ly;
    return walk(start, sigma, cap, rng, 2,
                [lx, ly](double x, double y) { return x > 0 && x < lx && y > 0 && y < ly; });
  }
  if (const auto* s = std::get_if<Disk>(&shape)) {
    const double r2 = s->radius * s->radius;
    return walk(start, sigma, cap, rng, 2, [r2](double x, double y) { return x * x + y * y < r2; });
  }
  return walk(start, sigma, cap, rng, 2, [&d](double x, double y) { return d.contains({x, y}); });
}

Point uniform_start(const DomainSpec& d, std::uint64_t seed, std::uint64_t path) {
  NormalStream rng(seed, path, kStartBlockBase);
  const Point lo = d.lower_corner(), hi = d.upper_corner();
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    double u1, u2;
    rng.uniforms(u1, u2);
    const Point p{lo.x + (hi.x - lo.x) * u1, d.dimension() == 1 ? 0.0 : lo.y + (hi.y - lo.y) * u2};
    if (d.contains(p)) return p;
  }
  throw Error(ErrorCode::InvalidDomain, "uniform start point rejection sampling failed");
}

ExitSamples run(const SimConfig& cfg, bool uniform) {
  validate(cfg, !uniform);
  const double sigma = std::sqrt(cfg.dt);
  std::vector<std::uint64_t> steps(cfg.paths);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const Point start = uniform ? uniform_start(cfg.domain, cfg.seed, i) : cfg.x0;
      NormalStream rng(cfg.seed, i);
      steps[i] = exit_steps(cfg.domain, start, sigma, cfg.step_cap, rng);
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, cfg.workers), cfg.paths));
  if (workers == 1) {
    work(0, cfg.paths);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (cfg.paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(cfg.paths, w * chunk);
      const std::uint64_t end = std::min(cfg.paths, begin + chunk);
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  ExitSamples out;
  out.dt = cfg.dt;
  out.seed = cfg.seed;
  out.volume = volume(cfg.domain);
  out.uniform_start = uniform;
  out.tau.reserve(cfg.paths);
  for (std::uint64_t i = 0; i < cfg.paths; ++i) {
    if (steps[i] > cfg.step_cap) {
      ++out.capped;
      continue;
    }
    out.path_index.push_back(i);
    out.tau.push_back(static_cast<double>(steps[i]) * cfg.dt);
  }
  return out;
}

McEstimate sample_mean(const ExitSamples& s, const std::string& tag, double scale, auto&& f) {
  if (s.tau.empty()) throw Error(ErrorCode::InsufficientSamples, "no completed paths");
  CompensatedSum sum;
  for (double t : s.tau) sum.add(f(t));
  const double n = static_cast<double>(s.tau.size());
  const double mean = sum.value() / n;
  CompensatedSum dev;
  for (double t : s.tau) {
    const double d = f(t) - mean;
    dev.add(d * d);
  }
  const double var = n > 1 ? dev.value() / (n - 1) : 0.0;
  McEstimate e;
  e.value = scale * mean;
  e.stderr_ = scale * std::sqrt(var / n);
  e.paths = s.tau.size();
  e.dt = s.dt;
  e.seed = s.seed;
  e.estimator = tag;
  return e;
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block counter, std::array<std::uint32_t, 2> key) {
  return philox(counter, key);
}

void validate(const SimConfig& cfg, bool need_interior_start) {
  if (!(cfg.dt > 0) || !std::isfinite(cfg.dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (cfg.paths < 1) throw Error(ErrorCode::InvalidArgument, "path count must be >= 1");
  if (cfg.step_cap < 1) throw Error(ErrorCode::InvalidArgument, "step cap must be >= 1");
  if (need_interior_start && !cfg.domain.contains(cfg.x0)) {
    std::ostringstream os;
    os << "start point (" << cfg.x0.x << ", " << cfg.x0.y << ") is not strictly inside the domain";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

ExitSamples simulate_exit_times(const SimConfig& cfg) { return run(cfg, false); }

ExitSamples simulate_exit_times_uniform(const SimConfig& cfg) { return run(cfg, true); }

std::vector<McEstimate> mc_moment_estimates(const ExitSamples& samples, int n_max) {
  if (n_max < 0 || n_max > 4) throw Error(ErrorCode::InvalidArgument, "Monte Carlo moments are limited to n <= 4");
  const double scale = samples.uniform_start ? samples.volume : 1.0;
  std::vector<McEstimate> out;
  for (int n = 0; n <= n_max; ++n) {
    McEstimate e = sample_mean(samples, "moment_" + std::to_string(n), scale,
                               [n](double t) { return std::pow(t, n); });
    if (n >= 1 && e.stderr_ > 0.2 * std::fabs(e.value)) {
      std::ostringstream os;
      os << "relative standard error " << e.stderr_ / std::fabs(e.value) << " for n=" << n << " exceeds 20% with "
         << e.paths << " paths";
      throw Error(ErrorCode::InsufficientSamples, os.str());
    }
    out.push_back(e);
  }
  return out;
}

MomentSequence mc_moments(const ExitSamples& uniform_samples, int n_max) {
  if (!uniform_samples.uniform_start) {
    throw Error(ErrorCode::InvalidArgument, "domain-integrated moments need uniformly started paths");
  }
  const auto est = mc_moment_estimates(uniform_samples, n_max);
  std::vector<dd_real> A;
  std::vector<double> se;
  double noise = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    // τ^0 = 1 on every path, so A_0 is the volume with no sampling error.
    A.emplace_back(n == 0 ? uniform_samples.volume : est[static_cast<std::size_t>(n)].value);
    se.push_back(n == 0 ? 0.0 : est[static_cast<std::size_t>(n)].stderr_);
    if (n > 0) noise = std::max(noise, se.back() / est[static_cast<std::size_t>(n)].value);
  }
  MomentSequence ms = make_moment_sequence(std::move(A), Provenance::MonteCarlo, std::max(noise, 1e-16));
  ms.A_stderr = std::move(se);
  return ms;
}

McEstimate mc_survival(const ExitSamples& samples, double t) {
  if (!(t > 0)) throw Error(ErrorCode::InvalidArgument, "survival time must be positive");
  McEstimate e = sample_mean(samples, "survival", 1.0, [t](double tau) { return tau > t ? 1.0 : 0.0; });
  const double n = static_cast<double>(e.paths);
  e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / n);
  return e;
}

McEstimate mc_survival(const SimConfig& cfg, double t) { return mc_survival(simulate_exit_times(cfg), t); }

McEstimate mc_laplace(const ExitSamples& samples, double s) {
  if (!(s >= 0)) throw Error(ErrorCode::InvalidArgument, "Laplace parameter must be >= 0");
  return sample_mean(samples, "laplace", 1.0, [s](double tau) { return s == 0 ? 1.0 : std::exp(-s * tau); });
}

McEstimate mc_laplace(const SimConfig& cfg, double s) { return mc_laplace(simulate_exit_times(cfg), s); }

}  // namespace mspec
