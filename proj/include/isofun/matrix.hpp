#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "isofun/core.hpp"

namespace isofun {

/// Dense real n x n operator in fixed-basis coordinates, row-major storage.
class SquareMatrix {
 public:
  SquareMatrix() = default;

  /// Zero matrix of the given dimension.
  explicit SquareMatrix(int dim) : dim_(check_dim(dim)), entries_(static_cast<std::size_t>(dim) * dim, 0.0) {}

  SquareMatrix(int dim, std::vector<double> entries) : dim_(check_dim(dim)), entries_(std::move(entries)) {
    if (entries_.size() != static_cast<std::size_t>(dim_) * dim_)
      throw DimensionMismatch("entry count does not match dim*dim");
    for (double v : entries_)
      if (!std::isfinite(v)) throw Error("matrix entries must be finite");
  }

  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    dim_ = static_cast<int>(rows.size());
    check_dim(dim_);
    entries_.reserve(static_cast<std::size_t>(dim_) * dim_);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != dim_) throw DimensionMismatch("matrix rows must all have length dim");
      for (double v : row) {
        if (!std::isfinite(v)) throw Error("matrix entries must be finite");
        entries_.push_back(v);
      }
    }
  }

  static SquareMatrix identity(int dim) {
    SquareMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static SquareMatrix diagonal(std::span<const double> d) {
    SquareMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  int dim() const { return dim_; }

  double& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i) * dim_ + j]; }
  double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * dim_ + j]; }

  std::span<const double> entries() const { return entries_; }

  SquareMatrix& operator+=(const SquareMatrix& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
  }
  SquareMatrix& operator-=(const SquareMatrix& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
    return *this;
  }
  SquareMatrix& operator*=(double s) {
    for (double& v : entries_) v *= s;
    return *this;
  }

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(SquareMatrix a, double s) { return a *= s; }
  friend SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }

  void require_same_dim(const SquareMatrix& o) const {
    if (dim_ != o.dim_) throw DimensionMismatch("matrix dimensions differ");
  }

 private:
  static int check_dim(int dim) {
    if (dim <= 0) throw DimensionMismatch("matrix dimension must be positive");
    return dim;
  }

  int dim_ = 0;
  std::vector<double> entries_;
};

inline SquareMatrix mat_mul(const SquareMatrix& a, const SquareMatrix& b) {
  a.require_same_dim(b);
  const int n = a.dim();
  SquareMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) { return mat_mul(a, b); }

inline SquareMatrix mat_pow(const SquareMatrix& a, int k) {
  if (k < 0) throw Error("mat_pow exponent must be nonnegative");
  SquareMatrix r = SquareMatrix::identity(a.dim());
  for (int i = 0; i < k; ++i) r = mat_mul(r, a);
  return r;
}

inline SquareMatrix transpose(const SquareMatrix& a) {
  const int n = a.dim();
  SquareMatrix t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(j, i) = a(i, j);
  return t;
}

inline double trace(const SquareMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a(i, i);
  return s;
}

/// tr(a * b) without forming the product.
inline double trace_of_product(const SquareMatrix& a, const SquareMatrix& b) {
  a.require_same_dim(b);
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) s += a(i, j) * b(j, i);
  return s;
}

inline double frobenius_norm(const SquareMatrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return std::sqrt(s);
}

inline double max_abs(const SquareMatrix& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

inline bool is_symmetric(const SquareMatrix& a, double tol = 1e-12) {
  const double scale = std::max(1.0, max_abs(a));
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i + 1; j < a.dim(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol * scale) return false;
  return true;
}

/// Determinant by partially pivoted elimination. Singular input comes out
/// as (numerically) zero rather than an error.
inline double determinant(const SquareMatrix& a) {
  const int n = a.dim();
  SquareMatrix u = a;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(u(r, col)) > std::abs(u(pivot, col))) pivot = r;
    if (u(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(u(pivot, j), u(col, j));
      det = -det;
    }
    det *= u(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = u(r, col) / u(col, col);
      for (int j = col; j < n; ++j) u(r, j) -= f * u(col, j);
    }
  }
  return det;
}

/// Gauss-Jordan inverse. Throws SingularMatrix below the scale-aware
/// threshold |det| <= 1e-12 * ||a||_F^n.
inline SquareMatrix inverse(const SquareMatrix& a) {
  const int n = a.dim();
  const double det = determinant(a);
  const double scale = std::pow(frobenius_norm(a), n);
  if (std::abs(det) <= 1e-12 * scale) throw SingularMatrix("matrix is singular to working precision");

  SquareMatrix work = a;
  SquareMatrix inv = SquareMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    if (pivot != col)
      for (int j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    const double p = work(col, col);
    if (p == 0.0) throw SingularMatrix("zero pivot during inversion");
    for (int j = 0; j < n; ++j) {
      work(col, j) /= p;
      inv(col, j) /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace isofun
