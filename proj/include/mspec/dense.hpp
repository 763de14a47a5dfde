#pragma once

// Small dense kernels templated on the scalar so the same code runs in
// double and double-double. Sizes here are tiny (Hankel sections, Ritz
// blocks), so clarity wins over blocking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "mspec/double_double.hpp"

namespace mspec::dense {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0.0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
struct SymmetricEigen {
  std::vector<T> values;  // ascending
  Matrix<T> vectors;      // column k pairs with values[k]
};

// Cyclic Jacobi rotations; converges quadratically and keeps eigenvectors
// orthogonal to working precision.
template <class T>
SymmetricEigen<T> jacobi_eigen(Matrix<T> a, int max_sweeps = 100) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = a.rows();
  Matrix<T> v = Matrix<T>::identity(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    T off(0.0);
    T diag(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    constexpr double rel = std::is_same_v<T, double> ? 1e-32 : 1e-62;
    if (off == T(0.0) || static_cast<double>(off) <= rel * static_cast<double>(diag)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == T(0.0)) continue;
        const T theta = (a(q, q) - a(p, p)) / (T(2.0) * a(p, q));
        const T sign = theta < T(0.0) ? T(-1.0) : T(1.0);
        const T t = sign / (abs(theta) + sqrt(theta * theta + T(1.0)));
        const T c = T(1.0) / sqrt(t * t + T(1.0));
        const T s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a(k, p);
          const T akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a(p, k);
          const T aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v(k, p);
          const T vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen<T> out{std::vector<T>(n), Matrix<T>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// Lower Cholesky factor, or nullopt when a pivot is not strictly positive.
template <class T>
std::optional<Matrix<T>> cholesky(const Matrix<T>& a) {
  using std::sqrt;
  const std::size_t n = a.rows();
  Matrix<T> l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    T d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > T(0.0))) return std::nullopt;
    l(j, j) = sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      T s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

// Solves L X = B for lower-triangular L (in place on a copy of B).
template <class T>
Matrix<T> lower_solve(const Matrix<T>& l, Matrix<T> b) {
  const std::size_t n = l.rows();
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      T s = b(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
      b(i, c) = s / l(i, i);
    }
  }
  return b;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

// Householder QR least squares for a full-column-rank tall matrix.
template <class T>
std::vector<T> least_squares(Matrix<T> a, std::vector<T> b) {
  using std::sqrt;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  for (std::size_t k = 0; k < n; ++k) {
    T norm(0.0);
    for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
    norm = sqrt(norm);
    if (norm == T(0.0)) continue;
    const T alpha = a(k, k) > T(0.0) ? -norm : norm;
    std::vector<T> v(m - k);
    for (std::size_t i = k; i < m; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    T vnorm2(0.0);
    for (const T& x : v) vnorm2 += x * x;
    if (vnorm2 == T(0.0)) continue;
    for (std::size_t j = k; j < n; ++j) {
      T dot(0.0);
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a(i, j);
      const T f = T(2.0) * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) a(i, j) -= f * v[i - k];
    }
    T dot(0.0);
    for (std::size_t i = k; i < m; ++i) dot += v[i - k] * b[i];
    const T f = T(2.0) * dot / vnorm2;
    for (std::size_t i = k; i < m; ++i) b[i] -= f * v[i - k];
  }
  std::vector<T> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    T s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

}  // namespace mspec::dense
