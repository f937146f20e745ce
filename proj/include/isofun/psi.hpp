#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isofun/core.hpp"

namespace isofun {

/// Value, gradient and Hessian of a psi expression with respect to the
/// power-sum variables (P_1, ..., P_m). grad/hess are only populated up to
/// the requested order.
struct PsiJet {
  double value = 0.0;
  std::vector<double> grad;  // size m
  std::vector<double> hess;  // row-major m x m

  double hess_at(int i, int j, int m) const { return hess[static_cast<std::size_t>(i) * m + j]; }
};

/// Differentiable expression tree over power-sum variables P_l. Nodes:
/// variable, constant, sum, product, quotient, real power, absolute value.
/// Shared subtrees form a DAG; evaluation is memoized per call.
class PsiExpression {
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    enum class Kind { Var, Const, Sum, Product, Quotient, Power, Abs };
    Kind kind;
    int var_index = 0;    // Var: 1-based power-sum index
    double scalar = 0.0;  // Const: value; Power: exponent
    NodePtr lhs, rhs;
    int max_index = 0;
  };

 public:
  static PsiExpression variable(int index) {
    if (index < 1) throw Error("power-sum index must be >= 1");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    n->var_index = index;
    n->max_index = index;
    return PsiExpression(std::move(n));
  }

  static PsiExpression constant(double c) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Const;
    n->scalar = c;
    return PsiExpression(std::move(n));
  }

  friend PsiExpression operator+(const PsiExpression& a, const PsiExpression& b) {
    return binary(Node::Kind::Sum, a, b);
  }
  friend PsiExpression operator-(const PsiExpression& a, const PsiExpression& b) {
    return a + constant(-1.0) * b;
  }
  friend PsiExpression operator*(const PsiExpression& a, const PsiExpression& b) {
    return binary(Node::Kind::Product, a, b);
  }
  friend PsiExpression operator/(const PsiExpression& a, const PsiExpression& b) {
    return binary(Node::Kind::Quotient, a, b);
  }

  static PsiExpression pow(const PsiExpression& base, double exponent) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Power;
    n->scalar = exponent;
    n->lhs = base.node_;
    n->max_index = base.max_index();
    return PsiExpression(std::move(n));
  }

  static PsiExpression abs(const PsiExpression& arg) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Abs;
    n->lhs = arg.node_;
    n->max_index = arg.max_index();
    return PsiExpression(std::move(n));
  }

  /// Highest power-sum index appearing in the expression.
  int max_index() const { return node_->max_index; }

  double value(std::span<const double> p) const { return eval(p, 0).value; }

  /// Evaluate value (order 0), + gradient (order 1), + Hessian (order 2)
  /// at the point p = (P_1, ..., P_m). p may be longer than max_index().
  PsiJet eval(std::span<const double> p, int order) const {
    const int m = max_index();
    if (static_cast<int>(p.size()) < m) throw Error("psi evaluation point shorter than max power-sum index");
    std::unordered_map<const Node*, PsiJet> memo;
    return eval_node(node_.get(), p, order, m, memo);
  }

 private:
  explicit PsiExpression(NodePtr node) : node_(std::move(node)) {}

  static PsiExpression binary(Node::Kind kind, const PsiExpression& a, const PsiExpression& b) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = a.node_;
    n->rhs = b.node_;
    n->max_index = std::max(a.max_index(), b.max_index());
    return PsiExpression(std::move(n));
  }

  // u^e for u >= 0; +inf marks an unbounded coefficient at u == 0 whose
  // consumption is guarded by mul_guarded below.
  static double pow_nonneg(double u, double e) {
    if (u < 0.0) throw NonDifferentiablePoint("negative base of a real power");
    if (u == 0.0) {
      if (e > 0.0) return 0.0;
      if (e == 0.0) return 1.0;
      return std::numeric_limits<double>::infinity();
    }
    return std::pow(u, e);
  }

  static double mul_guarded(double factor, double multiplier) {
    if (multiplier == 0.0) return 0.0;
    if (!std::isfinite(factor)) throw NonDifferentiablePoint("unbounded derivative of a real power at zero base");
    return factor * multiplier;
  }

  static PsiJet eval_node(const Node* node, std::span<const double> p, int order, int m,
                          std::unordered_map<const Node*, PsiJet>& memo) {
    if (auto it = memo.find(node); it != memo.end()) return it->second;

    PsiJet jet;
    if (order >= 1) jet.grad.assign(static_cast<std::size_t>(m), 0.0);
    if (order >= 2) jet.hess.assign(static_cast<std::size_t>(m) * m, 0.0);
    const std::size_t mm = static_cast<std::size_t>(m);

    switch (node->kind) {
      case Node::Kind::Var: {
        jet.value = p[static_cast<std::size_t>(node->var_index - 1)];
        if (order >= 1) jet.grad[static_cast<std::size_t>(node->var_index - 1)] = 1.0;
        break;
      }
      case Node::Kind::Const: {
        jet.value = node->scalar;
        break;
      }
      case Node::Kind::Sum: {
        const PsiJet a = eval_node(node->lhs.get(), p, order, m, memo);
        const PsiJet b = eval_node(node->rhs.get(), p, order, m, memo);
        jet.value = a.value + b.value;
        if (order >= 1)
          for (std::size_t i = 0; i < mm; ++i) jet.grad[i] = a.grad[i] + b.grad[i];
        if (order >= 2)
          for (std::size_t i = 0; i < mm * mm; ++i) jet.hess[i] = a.hess[i] + b.hess[i];
        break;
      }
      case Node::Kind::Product: {
        const PsiJet a = eval_node(node->lhs.get(), p, order, m, memo);
        const PsiJet b = eval_node(node->rhs.get(), p, order, m, memo);
        jet = product(a, b, order, m);
        break;
      }
      case Node::Kind::Quotient: {
        const PsiJet a = eval_node(node->lhs.get(), p, order, m, memo);
        const PsiJet b = eval_node(node->rhs.get(), p, order, m, memo);
        if (b.value == 0.0) throw ZeroDenominator("quotient denominator vanishes");
        jet = product(a, reciprocal(b, order, m), order, m);
        break;
      }
      case Node::Kind::Power: {
        const PsiJet u = eval_node(node->lhs.get(), p, order, m, memo);
        const double q = node->scalar;
        jet.value = pow_nonneg(u.value, q);
        if (!std::isfinite(jet.value)) throw ZeroDenominator("zero base of a negative real power");
        if (order >= 1) {
          const double f1 = pow_nonneg(u.value, q - 1.0);
          for (std::size_t i = 0; i < mm; ++i) jet.grad[i] = mul_guarded(f1, q * u.grad[i]);
          if (order >= 2) {
            const double f2 = pow_nonneg(u.value, q - 2.0);
            for (std::size_t i = 0; i < mm; ++i)
              for (std::size_t j = 0; j < mm; ++j)
                jet.hess[i * mm + j] = mul_guarded(f2, q * (q - 1.0) * u.grad[i] * u.grad[j]) +
                                       mul_guarded(f1, q * u.hess[i * mm + j]);
          }
        }
        break;
      }
      case Node::Kind::Abs: {
        const PsiJet u = eval_node(node->lhs.get(), p, order, m, memo);
        // derivative at the kink is taken to be 0, matching the C^1
        // compositions this node is used for
        const double s = u.value > 0.0 ? 1.0 : (u.value < 0.0 ? -1.0 : 0.0);
        jet.value = std::abs(u.value);
        if (order >= 1)
          for (std::size_t i = 0; i < mm; ++i) jet.grad[i] = s * u.grad[i];
        if (order >= 2)
          for (std::size_t i = 0; i < mm * mm; ++i) jet.hess[i] = s * u.hess[i];
        break;
      }
    }

    memo.emplace(node, jet);
    return jet;
  }

  static PsiJet product(const PsiJet& a, const PsiJet& b, int order, int m) {
    PsiJet r;
    const std::size_t mm = static_cast<std::size_t>(m);
    r.value = a.value * b.value;
    if (order >= 1) {
      r.grad.resize(mm);
      for (std::size_t i = 0; i < mm; ++i) r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    }
    if (order >= 2) {
      r.hess.resize(mm * mm);
      for (std::size_t i = 0; i < mm; ++i)
        for (std::size_t j = 0; j < mm; ++j)
          r.hess[i * mm + j] = a.hess[i * mm + j] * b.value + a.value * b.hess[i * mm + j] +
                               a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
    }
    return r;
  }

  // jet of 1/v; caller has excluded v.value == 0
  static PsiJet reciprocal(const PsiJet& v, int order, int m) {
    PsiJet r;
    const std::size_t mm = static_cast<std::size_t>(m);
    const double w = 1.0 / v.value;
    r.value = w;
    if (order >= 1) {
      r.grad.resize(mm);
      for (std::size_t i = 0; i < mm; ++i) r.grad[i] = -v.grad[i] * w * w;
    }
    if (order >= 2) {
      r.hess.resize(mm * mm);
      for (std::size_t i = 0; i < mm; ++i)
        for (std::size_t j = 0; j < mm; ++j)
          r.hess[i * mm + j] = (2.0 * v.grad[i] * v.grad[j] * w - v.hess[i * mm + j]) * w * w;
    }
    return r;
  }

  NodePtr node_;
};

}  // namespace isofun
