#include "mspec/discrete_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "mspec/dense.hpp"
#include "mspec/error.hpp"
#include "mspec/numerics.hpp"

namespace mspec {

double compensated_dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

double compensated_total(std::span<const double> a) {
  CompensatedSum s;
  for (double x : a) s.add(x);
  return s.value();
}

Field::Field(GridPtr g, double fill) : grid(std::move(g)), values(grid->size(), fill) {}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) throw Error(ErrorCode::InvalidArgument, "field length differs from node count");
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) s += val[k] * x[static_cast<std::size_t>(col[k])];
    y[r] = s;
  }
}

double SparseMatrix::diagonal(std::size_t row) const {
  for (std::size_t k = row_start[row]; k < row_start[row + 1]; ++k) {
    if (static_cast<std::size_t>(col[k]) == row) return val[k];
  }
  return 0.0;
}

namespace {

struct RowBuilder {
  SparseMatrix& m;
  std::vector<std::pair<int, double>> entries;

  void add(int c, double v) { entries.emplace_back(c, v); }
  void finish() {
    std::sort(entries.begin(), entries.end());
    for (const auto& [c, v] : entries) {
      m.col.push_back(c);
      m.val.push_back(v);
    }
    m.row_start.push_back(m.col.size());
    entries.clear();
  }
};

SparseMatrix assemble_stiffness(const Grid& g) {
  SparseMatrix k;
  k.n = g.size();
  k.row_start.push_back(0);
  RowBuilder row{k, {}};
  const double h = g.h;
  switch (g.kind) {
    case GridKind::Lattice1D:
      for (std::size_t r = 0; r < g.size(); ++r) {
        row.add(static_cast<int>(r), 1.0 / h);
        for (int di : {-1, 1}) {
          const int nb = g.index_of(g.lattice_i[r] + di);
          if (nb >= 0) row.add(nb, -0.5 / h);
        }
        row.finish();
      }
      break;
    case GridKind::Lattice2D:
      for (std::size_t r = 0; r < g.size(); ++r) {
        row.add(static_cast<int>(r), 2.0);
        constexpr int offsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (const auto& o : offsets) {
          const int nb = g.index_of(g.lattice_i[r] + o[0], g.lattice_j[r] + o[1]);
          if (nb >= 0) row.add(nb, -0.5);
        }
        row.finish();
      }
      break;
    case GridKind::Radial: {
      // Flux form of -(1/2)(u'' + u'/r) integrated over annular cells.
      const double pi = std::numbers::pi;
      for (std::size_t r = 0; r < g.size(); ++r) {
        const int i = static_cast<int>(r);
        if (i == 0) {
          row.add(0, pi / 2.0);
          row.add(1, -pi / 2.0);
        } else {
          const double inner = (i - 0.5) * h;
          const double outer = (i + 0.5) * h;
          row.add(i - 1, -pi * inner / h);
          row.add(i, pi * (inner + outer) / h);
          if (r + 1 < g.size()) row.add(i + 1, -pi * outer / h);
        }
        row.finish();
      }
      break;
    }
  }
  return k;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

DiscreteOperator::DiscreteOperator(GridPtr grid) : grid_(std::move(grid)), stiffness_(assemble_stiffness(*grid_)) {}

void DiscreteOperator::apply(std::span<const double> x, std::span<double> y) const {
  stiffness_.multiply(x, y);
  const auto& w = grid_->weights;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= w[i];
}

Field DiscreteOperator::apply(const Field& x) const {
  Field y(grid_);
  apply(x.values, y.values);
  return y;
}

void DiscreteOperator::write_coordinates(std::ostream& os) const {
  const auto& w = grid_->weights;
  os.precision(17);
  for (std::size_t r = 0; r < stiffness_.n; ++r) {
    for (std::size_t k = stiffness_.row_start[r]; k < stiffness_.row_start[r + 1]; ++k) {
      os << r << ' ' << stiffness_.col[k] << ' ' << stiffness_.val[k] / w[r] << '\n';
    }
  }
}

DiscreteOperator assemble_half_laplacian(GridPtr grid) {
  if (!grid || grid->size() == 0) throw Error(ErrorCode::InvalidArgument, "empty grid");
  return DiscreteOperator(std::move(grid));
}

int default_iteration_cap(std::size_t n) {
  const double cap = std::max(20.0 * std::sqrt(static_cast<double>(n)), 4.0 * static_cast<double>(n));
  return static_cast<int>(cap);
}

Field solve_shifted(const DiscreteOperator& op, double shift, const Field& rhs, double tol, SolveStats* stats,
                    int max_iterations, std::span<const double> initial) {
  if (!(tol > 0)) throw Error(ErrorCode::InvalidArgument, "solver tolerance must be positive");
  if (!(shift >= 0)) throw Error(ErrorCode::InvalidArgument, "shift must be non-negative");
  const std::size_t n = op.size();
  if (rhs.size() != n) throw Error(ErrorCode::InvalidArgument, "right-hand side has wrong length");
  const int cap = max_iterations > 0 ? max_iterations : default_iteration_cap(n);
  const auto& k = op.stiffness();
  const auto mass = op.mass();

  std::vector<double> b(n), diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = mass[i] * rhs[i];
    diag[i] = k.diagonal(i) + shift * mass[i];
  }
  auto apply_system = [&](std::span<const double> x, std::span<double> y) {
    k.multiply(x, y);
    if (shift != 0.0)
      for (std::size_t i = 0; i < n; ++i) y[i] += shift * mass[i] * x[i];
  };

  Field x(op.grid());
  const double b_norm = std::sqrt(compensated_dot(b, b));
  if (b_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  std::vector<double> r(b), z(n), p(n), q(n);
  if (!initial.empty()) {
    std::copy(initial.begin(), initial.end(), x.values.begin());
    apply_system(x.values, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  }
  double r_norm = std::sqrt(compensated_dot(r, r));
  int it = 0;
  if (r_norm > tol * b_norm) {
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = compensated_dot(r, z);
    while (it < cap) {
      ++it;
      apply_system(p, q);
      const double alpha = rz / compensated_dot(p, q);
      axpy(alpha, p, x.values);
      axpy(-alpha, q, r);
      r_norm = std::sqrt(compensated_dot(r, r));
      if (r_norm <= tol * b_norm) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
      const double rz_next = compensated_dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  if (stats) *stats = {it, r_norm / b_norm};
  if (!(r_norm <= tol * b_norm)) {
    std::ostringstream os;
    os << "conjugate gradients stopped after " << it << " iterations at relative residual " << r_norm / b_norm
       << " (target " << tol << ")";
    throw Error(ErrorCode::NotConverged, os.str());
  }
  return x;
}

Field solve_poisson(const DiscreteOperator& op, const Field& rhs, double tol, int max_iterations) {
  return solve_shifted(op, 0.0, rhs, tol, nullptr, max_iterations);
}

double integrate(const Field& f) {
  CompensatedSum s;
  const auto& w = f.grid->weights;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * w[i]);
  return s.value();
}

double inner_product(const Field& a, const Field& b) {
  CompensatedSum s;
  const auto& w = a.grid->weights;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i] * w[i]);
  return s.value();
}

namespace {

double m_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i] * w[i]);
  return s.value();
}

// Modified Gram-Schmidt in the M inner product, applied twice. Vectors that
// collapse are replaced by fresh random directions.
void m_orthonormalize(std::vector<std::vector<double>>& block, std::span<const double> w, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < block.size(); ++k) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      const double before = std::sqrt(m_dot(block[k], block[k], w));
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < k; ++j) axpy(-m_dot(block[j], block[k], w), block[j], block[k]);
      }
      const double norm = std::sqrt(m_dot(block[k], block[k], w));
      if (norm > 1e-10 * before && norm > 0) {
        for (double& x : block[k]) x /= norm;
        break;
      }
      for (double& x : block[k]) x = normal(rng);
    }
  }
}

}  // namespace

std::vector<Eigenpair> lowest_eigenpairs(const DiscreteOperator& op, std::size_t m, double tol) {
  const std::size_t n = op.size();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "need at least one eigenpair");
  if (m >= n) throw Error(ErrorCode::InvalidArgument, "requested more eigenpairs than the grid supports");
  if (!(tol > 0)) throw Error(ErrorCode::InvalidArgument, "eigen tolerance must be positive");
  const std::size_t block_size = std::min(n, m + std::max<std::size_t>(4, m / 2));
  const auto w = op.mass();
  const auto& k = op.stiffness();
  const double inner_tol = std::min(1e-10, 1e-2 * tol);

  std::mt19937_64 rng(0x5eed1234abcdULL);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> block(block_size, std::vector<double>(n));
  for (auto& v : block)
    for (double& x : v) x = normal(rng);
  m_orthonormalize(block, w, rng);

  std::vector<double> theta(block_size, 0.0);
  std::vector<double> residual(block_size, 0.0);
  std::vector<double> kv(n);
  constexpr int kMaxSweeps = 2000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (std::size_t b = 0; b < block_size; ++b) {
      Field rhs(op.grid(), block[b]);
      std::vector<double> guess;
      if (theta[b] > 0) {
        guess = block[b];
        for (double& x : guess) x /= theta[b];
      }
      block[b] = solve_shifted(op, 0.0, rhs, inner_tol, nullptr, 0, guess).values;
    }
    m_orthonormalize(block, w, rng);

    dense::Matrix<double> t(block_size, block_size);
    std::vector<std::vector<double>> kblock(block_size, std::vector<double>(n));
    for (std::size_t b = 0; b < block_size; ++b) k.multiply(block[b], kblock[b]);
    for (std::size_t i = 0; i < block_size; ++i) {
      for (std::size_t j = i; j < block_size; ++j) {
        const double v = 0.5 * (compensated_dot(block[i], kblock[j]) + compensated_dot(block[j], kblock[i]));
        t(i, j) = v;
        t(j, i) = v;
      }
    }
    const auto ritz = dense::jacobi_eigen(t);
    std::vector<std::vector<double>> rotated(block_size, std::vector<double>(n, 0.0));
    for (std::size_t c = 0; c < block_size; ++c) {
      for (std::size_t b = 0; b < block_size; ++b) axpy(ritz.vectors(b, c), block[b], rotated[c]);
      theta[c] = ritz.values[c];
    }
    block.swap(rotated);

    bool converged = true;
    for (std::size_t c = 0; c < block_size; ++c) {
      k.multiply(block[c], kv);
      CompensatedSum s;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = kv[i] - theta[c] * w[i] * block[c][i];
        s.add(r * r / w[i]);
      }
      residual[c] = std::sqrt(s.value());
      if (c < m && residual[c] > tol * std::max(1.0, theta[c])) converged = false;
    }
    if (converged) {
      std::vector<Eigenpair> out;
      for (std::size_t c = 0; c < m; ++c) {
        // Fix the sign so the first significant component is positive.
        auto& v = block[c];
        const auto big = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::fabs(a) < std::fabs(b); });
        if (*big < 0)
          for (double& x : v) x = -x;
        out.push_back({2.0 * theta[c], Field(op.grid(), std::move(v)), residual[c]});
      }
      return out;
    }
  }
  throw Error(ErrorCode::NotConverged, "block inverse iteration did not converge");
}

}  // namespace mspec
