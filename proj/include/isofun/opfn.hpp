#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "isofun/core.hpp"
#include "isofun/eigen.hpp"
#include "isofun/matrix.hpp"
#include "isofun/symfn.hpp"

namespace isofun {

/// tr(A^k), the operator counterpart of the k-th power sum.
inline double trace_power(const SquareMatrix& a, int k) {
  if (k < 1) throw Error("trace power requires k >= 1");
  SquareMatrix pw = a;
  double t = trace(pw);
  for (int l = 2; l <= k; ++l) {
    pw = pw * a;
    t = trace(pw);
  }
  return t;
}

/// (tr(A), tr(A^2), ..., tr(A^m)).
inline std::vector<double> trace_powers(const SquareMatrix& a, int m) {
  std::vector<double> p(static_cast<std::size_t>(m));
  if (m == 0) return p;
  SquareMatrix pw = a;
  p[0] = trace(pw);
  for (int l = 2; l <= m; ++l) {
    pw = pw * a;
    p[static_cast<std::size_t>(l - 1)] = trace(pw);
  }
  return p;
}

/// s_k of the spectrum, computed from traces via the Newton recursion --
/// the t^k coefficient of det(I + tA) up to the k! normalisation, with no
/// eigendecomposition.
inline double elementary_invariant(const SquareMatrix& a, int k) {
  if (k < 1 || k > a.dim()) throw Error("elementary invariant requires 1 <= k <= dim");
  const std::vector<double> p = trace_powers(a, k);
  return newton_elementary(p).back();
}

/// k sum_{l=1}^{k-1} tr(A^{l-1} B A^{k-1-l} C): the second derivative of
/// tr(A^k) as a bilinear form in (B, C). Zero for k = 1.
inline double d2_trace_power(const SquareMatrix& a, int k, const SquareMatrix& b, const SquareMatrix& c) {
  if (k < 1) throw Error("trace power requires k >= 1");
  if (k <= 1) return 0.0;
  std::vector<SquareMatrix> pows;
  pows.reserve(static_cast<std::size_t>(k - 1));
  pows.push_back(SquareMatrix::identity(a.dim()));
  for (int l = 1; l <= k - 2; ++l) pows.push_back(pows.back() * a);
  double acc = 0.0;
  for (int l = 1; l <= k - 1; ++l)
    acc += trace_of_product(pows[static_cast<std::size_t>(l - 1)] * b, pows[static_cast<std::size_t>(k - 1 - l)] * c);
  return static_cast<double>(k) * acc;
}

namespace detail {

/// Divided difference reusing an already computed order-2 jet.
inline double divided_difference_from_jet(const ScalarJet& jet, std::span<const double> kappa, int i, int j) {
  const double ki = kappa[static_cast<std::size_t>(i)];
  const double kj = kappa[static_cast<std::size_t>(j)];
  const double scale = std::max({1.0, std::abs(ki), std::abs(kj)});
  if (std::abs(ki - kj) > kCoalescenceThreshold * scale)
    return (jet.grad[static_cast<std::size_t>(i)] - jet.grad[static_cast<std::size_t>(j)]) / (ki - kj);
  return jet.hess(i, i) - jet.hess(i, j);
}

}  // namespace detail

/// The operator function associated to a symmetric function spec:
/// F = psi(tr(A), tr(A^2), ...) for psi-backed specs, agreeing with
/// f(EV(A)) on diagonalisable operators with spectrum in the cone, and
/// F~ = 1/F(A^{-1}) for inverse-transformed specs. All derivative formulas
/// are closed-form trace expressions valid on arbitrary operators.
class OperatorFunction {
 public:
  explicit OperatorFunction(SymmetricFunctionSpec spec) : spec_(std::move(spec)) {}

  const SymmetricFunctionSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim(); }

  /// F(A).
  double value(const SquareMatrix& a) const {
    check_dim(a);
    if (spec_.is_inverse()) {
      const double u = OperatorFunction(inner()).value(inverse(a));
      if (u == 0.0) throw ZeroDenominator("inner operator function vanishes at the inverse point");
      return 1.0 / u;
    }
    const int m = spec_.psi().max_index();
    return spec_.psi().value(trace_powers(a, m));
  }

  /// F'(A): the matrix polynomial sum_l l (dpsi/dP_l) A^{l-1}, satisfying
  /// dF(A)B = tr(F'(A) B).
  SquareMatrix derivative(const SquareMatrix& a) const {
    check_dim(a);
    if (spec_.is_inverse()) {
      const SquareMatrix ainv = inverse(a);
      const OperatorFunction inner_op(inner());
      const double u = inner_op.value(ainv);
      if (u == 0.0) throw ZeroDenominator("inner operator function vanishes at the inverse point");
      const double ft = 1.0 / u;
      return (ft * ft) * (ainv * inner_op.derivative(ainv) * ainv);
    }
    const int m = spec_.psi().max_index();
    const PsiJet jet = spec_.psi().eval(trace_powers(a, m), 1);
    SquareMatrix r(a.dim());
    SquareMatrix pw = SquareMatrix::identity(a.dim());  // A^{l-1}
    for (int l = 1; l <= m; ++l) {
      if (l > 1) pw = pw * a;
      const double coeff = l * jet.grad[static_cast<std::size_t>(l - 1)];
      if (coeff != 0.0) r += coeff * pw;
    }
    return r;
  }

  /// dF(A)B = tr(F'(A) B).
  double directional_derivative(const SquareMatrix& a, const SquareMatrix& b) const {
    return trace_of_product(derivative(a), b);
  }

  /// d2F(A)(B, C): psi-Hessian term plus the trace-power curvature term.
  /// Symmetric in (B, C).
  double second_derivative(const SquareMatrix& a, const SquareMatrix& b, const SquareMatrix& c) const {
    check_dim(a);
    a.require_same_dim(b);
    a.require_same_dim(c);
    if (spec_.is_inverse()) return second_derivative_inverse(a, b, c);

    const int m = spec_.psi().max_index();
    const PsiJet jet = spec_.psi().eval(trace_powers(a, m), 2);

    std::vector<SquareMatrix> pows;  // A^0 .. A^{m-1}
    pows.reserve(static_cast<std::size_t>(m));
    pows.push_back(SquareMatrix::identity(a.dim()));
    for (int l = 1; l < m; ++l) pows.push_back(pows.back() * a);

    std::vector<double> dpb(static_cast<std::size_t>(m)), dpc(static_cast<std::size_t>(m));
    for (int l = 1; l <= m; ++l) {
      dpb[static_cast<std::size_t>(l - 1)] = l * trace_of_product(pows[static_cast<std::size_t>(l - 1)], b);
      dpc[static_cast<std::size_t>(l - 1)] = l * trace_of_product(pows[static_cast<std::size_t>(l - 1)], c);
    }

    double acc = 0.0;
    for (int l = 0; l < m; ++l)
      for (int k = 0; k < m; ++k)
        acc += jet.hess_at(l, k, m) * dpb[static_cast<std::size_t>(l)] * dpc[static_cast<std::size_t>(k)];

    // curvature of the trace powers; reuse A^j B and A^j C across the k-sum
    std::vector<SquareMatrix> xb, xc;
    if (m >= 2) {
      xb.reserve(static_cast<std::size_t>(m - 1));
      xc.reserve(static_cast<std::size_t>(m - 1));
      for (int l = 0; l <= m - 2; ++l) {
        xb.push_back(pows[static_cast<std::size_t>(l)] * b);
        xc.push_back(pows[static_cast<std::size_t>(l)] * c);
      }
    }
    for (int k = 2; k <= m; ++k) {
      const double coeff = jet.grad[static_cast<std::size_t>(k - 1)];
      if (coeff == 0.0) continue;
      double d2p = 0.0;
      for (int l = 1; l <= k - 1; ++l)
        d2p += trace_of_product(xb[static_cast<std::size_t>(l - 1)], xc[static_cast<std::size_t>(k - 1 - l)]);
      acc += coeff * k * d2p;
    }
    return acc;
  }

  /// Eigenbasis representation of d2F(A)(eta, eta): the f-Hessian paired with
  /// the diagonal of eta plus divided differences against the off-diagonal
  /// part. Requires the spectrum inside the cone.
  double second_derivative_in_eigenbasis(const EigenSystem& es, const SquareMatrix& eta) const {
    const SquareMatrix etat = es.basis_inverse * eta * es.basis;
    const int n = es.dim();
    const ScalarJet jet = spec_.eval(es.eigenvalues, 2);
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += jet.hess(i, j) * etat(i, i) * etat(j, j);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        acc += detail::divided_difference_from_jet(jet, es.eigenvalues, i, j) * etat(i, j) * etat(j, i);
      }
    return acc;
  }

  /// Eigenvalues of F'(A) for A with the given eigensystem: the partial
  /// derivatives of f at the spectrum, with the same eigenvectors as A.
  std::vector<double> derivative_eigenvalues(const EigenSystem& es) const {
    return spec_.gradient(es.eigenvalues);
  }

 private:
  const SymmetricFunctionSpec& inner() const { return spec_.inner(); }

  void check_dim(const SquareMatrix& a) const {
    if (a.dim() != spec_.dim()) throw DimensionMismatch("operator dimension does not match function spec");
  }

  // chain rule through A -> A^{-1} and x -> 1/x for inverse-transformed specs
  double second_derivative_inverse(const SquareMatrix& a, const SquareMatrix& b, const SquareMatrix& c) const {
    const SquareMatrix ainv = inverse(a);
    const OperatorFunction inner_op(inner());
    const double u = inner_op.value(ainv);
    if (u == 0.0) throw ZeroDenominator("inner operator function vanishes at the inverse point");
    const double ft = 1.0 / u;
    const SquareMatrix bt = ainv * b * ainv;
    const SquareMatrix ct = ainv * c * ainv;
    const SquareMatrix dinner = inner_op.derivative(ainv);
    const double dfb = trace_of_product(dinner, bt);
    const double dfc = trace_of_product(dinner, ct);
    const double d2 = inner_op.second_derivative(ainv, bt, ct);
    const double mixed = trace_of_product(dinner, ct * (b * ainv)) + trace_of_product(dinner, bt * (c * ainv));
    return 2.0 * ft * ft * ft * dfb * dfc - ft * ft * (d2 + mixed);
  }

  SymmetricFunctionSpec spec_;
};

}  // namespace isofun
