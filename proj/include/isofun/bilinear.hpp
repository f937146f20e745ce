#pragma once

#include <cmath>
#include <utility>

#include "isofun/core.hpp"
#include "isofun/matrix.hpp"
#include "isofun/opfn.hpp"

namespace isofun {

/// Bilinear form on V: covariant coordinates a_{ij}. Kept distinct from
/// CoBilinearForm so index variance mistakes cannot type-check.
class BilinearForm {
 public:
  explicit BilinearForm(SquareMatrix coords) : coords_(std::move(coords)) {}

  int dim() const { return coords_.dim(); }
  double operator()(int i, int j) const { return coords_(i, j); }
  double& operator()(int i, int j) { return coords_(i, j); }
  const SquareMatrix& coords() const { return coords_; }

 private:
  SquareMatrix coords_;
};

/// Bilinear form on V*: contravariant coordinates b^{ij}.
class CoBilinearForm {
 public:
  explicit CoBilinearForm(SquareMatrix coords) : coords_(std::move(coords)) {}

  int dim() const { return coords_.dim(); }
  double operator()(int i, int j) const { return coords_(i, j); }
  const SquareMatrix& coords() const { return coords_; }

 private:
  SquareMatrix coords_;
};

/// a^ = (a + a^T) / 2.
inline BilinearForm symmetrize(const BilinearForm& a) {
  return BilinearForm((a.coords() + transpose(a.coords())) * 0.5);
}

/// Contraction b * a, the operator with (b*a)^i_j = b^{ik} a_{kj}.
inline SquareMatrix contract(const CoBilinearForm& b, const BilinearForm& a) {
  return mat_mul(b.coords(), a.coords());
}

/// Full pairing sum_{ij} b^{ij} a_{ij} of a co-form against a form.
inline double pair_forms(const CoBilinearForm& b, const BilinearForm& a) {
  b.coords().require_same_dim(a.coords());
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) acc += b(i, j) * a(i, j);
  return acc;
}

/// Symmetric positive definite form g together with g^{-1}, validated and
/// inverted once at construction.
class InnerProduct {
 public:
  explicit InnerProduct(BilinearForm g) : form_(std::move(g)), inverse_(SquareMatrix(form_.dim())) {
    const SquareMatrix& m = form_.coords();
    if (!is_symmetric(m)) throw NotSPD("inner product must be symmetric");
    // positivity of all leading pivots == positive definiteness
    SquareMatrix u = m;
    const int n = u.dim();
    const double scale = std::max(1.0, max_abs(u));
    for (int col = 0; col < n; ++col) {
      if (u(col, col) <= 1e-12 * scale) throw NotSPD("inner product must be positive definite");
      for (int r = col + 1; r < n; ++r) {
        const double f = u(r, col) / u(col, col);
        for (int j = col; j < n; ++j) u(r, j) -= f * u(col, j);
      }
    }
    inverse_ = CoBilinearForm(inverse(m));
  }

  int dim() const { return form_.dim(); }
  const BilinearForm& form() const { return form_; }
  const CoBilinearForm& inverse_form() const { return inverse_; }

 private:
  BilinearForm form_;
  CoBilinearForm inverse_;
};

/// a#_g = g^{-1} * a, the operator with a(v, w) = g(a#_g v, w).
inline SquareMatrix sharp(const InnerProduct& g, const BilinearForm& a) {
  return contract(g.inverse_form(), a);
}

/// Phi(g, h) = F(g^{-1} * h^): F evaluated on the operator obtained by
/// raising an index of the symmetrised form.
inline double eval_on_form(const OperatorFunction& fop, const InnerProduct& g, const BilinearForm& h) {
  return fop.value(sharp(g, symmetrize(h)));
}

/// dPhi/dh at (g, h) as a co-form: pairing it with any direction a equals
/// tr(F'(g^{-1} * h^) a^#_g). In coordinates this is the symmetrisation of
/// F' contracted with g^{-1}.
inline CoBilinearForm eval_on_form_derivative(const OperatorFunction& fop, const InnerProduct& g,
                                              const BilinearForm& h) {
  const SquareMatrix op = sharp(g, symmetrize(h));
  const SquareMatrix raised = fop.derivative(op) * g.inverse_form().coords();
  return CoBilinearForm((raised + transpose(raised)) * 0.5);
}

}  // namespace isofun
