#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "isofun/core.hpp"
#include "isofun/matrix.hpp"

namespace isofun {

/// Spectral data of a diagonalisable operator: A = basis * diag(eigenvalues) * basis_inverse.
struct EigenSystem {
  std::vector<double> eigenvalues;
  SquareMatrix basis;          // columns are eigenvectors
  SquareMatrix basis_inverse;

  int dim() const { return basis.dim(); }

  SquareMatrix reconstruct() const {
    SquareMatrix d = SquareMatrix::diagonal(eigenvalues);
    return basis * d * basis_inverse;
  }
};

/// Cyclic Jacobi eigensolver for symmetric matrices. Eigenvalues ascending,
/// basis orthogonal (basis_inverse = basis^T). Convergence when the
/// off-diagonal Frobenius norm drops below 1e-12 * ||a||_F; 100 sweep cap.
inline EigenSystem symmetric_eigen(const SquareMatrix& a) {
  if (!is_symmetric(a)) throw NotSymmetric("symmetric_eigen requires a symmetric matrix");
  const int n = a.dim();
  SquareMatrix w = a;
  SquareMatrix v = SquareMatrix::identity(n);

  const double norm = frobenius_norm(a);
  const double target = 1e-12 * std::max(norm, 1e-300);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += w(i, j) * w(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > kMaxSweeps) throw NoConvergence("Jacobi iteration did not converge");
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double wkp = w(k, p), wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (int k = 0; k < n; ++k) {
          const double wpk = w(p, k), wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return w(i, i) < w(j, j); });

  EigenSystem es;
  es.eigenvalues.resize(n);
  es.basis = SquareMatrix(n);
  for (int col = 0; col < n; ++col) {
    es.eigenvalues[col] = w(order[col], order[col]);
    for (int row = 0; row < n; ++row) es.basis(row, col) = v(row, order[col]);
  }
  es.basis_inverse = transpose(es.basis);
  return es;
}

namespace detail {

/// Symmetric p-th power g^p from an SPD matrix's eigendecomposition.
inline SquareMatrix spd_power(const EigenSystem& es, double p) {
  const int n = es.dim();
  SquareMatrix d(n);
  for (int i = 0; i < n; ++i) d(i, i) = std::pow(es.eigenvalues[i], p);
  return es.basis * d * transpose(es.basis);
}

}  // namespace detail

/// Eigendecomposition of a g-selfadjoint operator (g SPD, g*a symmetric),
/// by congruence to the symmetric problem g^{1/2} a g^{-1/2}. The basis
/// columns are g-orthonormal eigenvectors.
inline EigenSystem g_selfadjoint_eigen(const SquareMatrix& a, const SquareMatrix& g) {
  a.require_same_dim(g);
  if (!is_symmetric(g)) throw NotSPD("inner product matrix must be symmetric");
  EigenSystem ge = symmetric_eigen(g);
  const double gscale = std::max(1.0, max_abs(g));
  for (double lam : ge.eigenvalues)
    if (lam <= 1e-12 * gscale) throw NotSPD("inner product matrix must be positive definite");

  SquareMatrix ga = g * a;
  if (!is_symmetric(ga, 1e-10)) throw NotSelfAdjoint("operator is not selfadjoint with respect to g");

  SquareMatrix g_half = detail::spd_power(ge, 0.5);
  SquareMatrix g_half_inv = detail::spd_power(ge, -0.5);

  SquareMatrix m = g_half * a * g_half_inv;
  // kill the O(eps) asymmetry introduced by the congruence
  SquareMatrix ms = (m + transpose(m)) * 0.5;
  EigenSystem me = symmetric_eigen(ms);

  EigenSystem es;
  es.eigenvalues = me.eigenvalues;
  es.basis = g_half_inv * me.basis;
  es.basis_inverse = transpose(me.basis) * g_half;
  return es;
}

/// Haar-ish random orthogonal matrix: Gaussian columns + modified Gram-Schmidt.
inline SquareMatrix random_orthogonal(Rng& rng, int n) {
  while (true) {
    SquareMatrix q(n);
    bool ok = true;
    for (int col = 0; col < n && ok; ++col) {
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = rng.normal();
      for (int prev = 0; prev < col; ++prev) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += v[static_cast<std::size_t>(i)] * q(i, prev);
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] -= dot * q(i, prev);
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-6) {
        ok = false;  // degenerate draw, start over
        break;
      }
      for (int i = 0; i < n; ++i) q(i, col) = v[static_cast<std::size_t>(i)] / norm;
    }
    if (ok) return q;
  }
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline SquareMatrix random_spd(Rng& rng, int n, double lo = 0.5, double hi = 2.0) {
  SquareMatrix q = random_orthogonal(rng, n);
  SquareMatrix d(n);
  for (int i = 0; i < n; ++i) d(i, i) = rng.uniform(lo, hi);
  SquareMatrix m = q * d * transpose(q);
  return (m + transpose(m)) * 0.5;
}

/// Random invertible matrix with condition number <= hi/lo, together with its
/// inverse (exact by construction, no elimination).
inline std::pair<SquareMatrix, SquareMatrix> random_invertible(Rng& rng, int n, double lo = 0.5, double hi = 2.0) {
  SquareMatrix q1 = random_orthogonal(rng, n);
  SquareMatrix q2 = random_orthogonal(rng, n);
  SquareMatrix d(n), dinv(n);
  for (int i = 0; i < n; ++i) {
    const double s = rng.uniform(lo, hi);
    d(i, i) = s;
    dinv(i, i) = 1.0 / s;
  }
  SquareMatrix v = q1 * d * transpose(q2);
  SquareMatrix vinv = q2 * dinv * transpose(q1);
  return {v, vinv};
}

/// Diagonalisable test matrix with the prescribed spectrum: V diag(spectrum) V^{-1}
/// for a random well-conditioned V. Deterministic in the seed.
inline std::pair<SquareMatrix, EigenSystem> random_diagonalisable(int dim, std::span<const double> spectrum,
                                                                  std::uint64_t seed) {
  if (static_cast<int>(spectrum.size()) != dim) throw DimensionMismatch("spectrum length must equal dim");
  Rng rng(seed);
  auto [v, vinv] = random_invertible(rng, dim);
  EigenSystem es;
  es.eigenvalues.assign(spectrum.begin(), spectrum.end());
  es.basis = v;
  es.basis_inverse = vinv;
  SquareMatrix a = v * SquareMatrix::diagonal(spectrum) * vinv;
  return {a, es};
}

}  // namespace isofun
