#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mspec/geometry.hpp"

namespace mspec {

// One value per interior node of a grid.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  Field(GridPtr g, double fill = 0.0);
  Field(GridPtr g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Compressed sparse rows; symmetric by construction.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_start;
  std::vector<int> col;
  std::vector<double> val;

  void multiply(std::span<const double> x, std::span<double> y) const;
  double diagonal(std::size_t row) const;
};

// The Dirichlet generator -(1/2)Δ_h in the generalized form
//   A = M^{-1} K,
// with K the symmetric stiffness matrix and M the diagonal of quadrature
// weights. On lattice grids M = h^d I and A is the usual 3/5-point stencil
// scaled by 1/(2h^2); on the radial grid A is M-self-adjoint.
class DiscreteOperator {
 public:
  explicit DiscreteOperator(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  std::span<const double> mass() const { return grid_->weights; }
  std::size_t size() const { return stiffness_.n; }

  // y = A x.
  void apply(std::span<const double> x, std::span<double> y) const;
  Field apply(const Field& x) const;

  // Entries of A = M^{-1} K as (row, col, value) in row order.
  void write_coordinates(std::ostream& os) const;

 private:
  GridPtr grid_;
  SparseMatrix stiffness_;
};

DiscreteOperator assemble_half_laplacian(GridPtr grid);

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Solves (A + shift) x = rhs by Jacobi-preconditioned conjugate gradients on
// the equivalent symmetric system (K + shift M) x = M rhs. The relative
// residual is measured on the symmetric system. `initial` seeds the
// iteration when non-empty. Throws NotConverged past the iteration cap
// (default max(20 sqrt(N), 4N)).
Field solve_shifted(const DiscreteOperator& op, double shift, const Field& rhs, double tol,
                    SolveStats* stats = nullptr, int max_iterations = 0,
                    std::span<const double> initial = {});

Field solve_poisson(const DiscreteOperator& op, const Field& rhs, double tol, int max_iterations = 0);

int default_iteration_cap(std::size_t n);

struct Eigenpair {
  double lambda = 0.0;  // eigenvalue of the positive Laplacian Δ; A has λ/2
  Field phi;            // normalized under grid quadrature
  double residual = 0.0;
};

// Lowest m eigenpairs by block inverse iteration with CG inner solves,
// M-orthonormalization of the block and a Rayleigh-Ritz projection each
// sweep. Convergence when ||A φ - (λ/2) φ||_M <= tol * max(1, λ/2).
std::vector<Eigenpair> lowest_eigenpairs(const DiscreteOperator& op, std::size_t m, double tol);

// Σ f(node) * weight(node), compensated.
double integrate(const Field& f);
double inner_product(const Field& a, const Field& b);

}  // namespace mspec
