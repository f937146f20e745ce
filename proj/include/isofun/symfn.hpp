#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isofun/core.hpp"
#include "isofun/matrix.hpp"
#include "isofun/psi.hpp"

namespace isofun {

/// p_k(kappa) = sum_i kappa_i^k, k >= 1.
inline double power_sum(int k, std::span<const double> kappa) {
  if (k < 1) throw Error("power-sum index must be >= 1");
  double s = 0.0;
  for (double x : kappa) s += std::pow(x, k);
  return s;
}

/// Elementary symmetric polynomial s_k, 1 <= k <= n, via the coefficient
/// recursion for prod_i (1 + kappa_i t). Exact for polynomial inputs and
/// O(n k), no subset enumeration.
inline double elementary(int k, std::span<const double> kappa) {
  const int n = static_cast<int>(kappa.size());
  if (k < 1 || k > n) throw Error("elementary symmetric index out of range");
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    const double x = kappa[static_cast<std::size_t>(i)];
    for (int j = std::min(k, i + 1); j >= 1; --j) e[static_cast<std::size_t>(j)] += x * e[static_cast<std::size_t>(j) - 1];
  }
  return e[static_cast<std::size_t>(k)];
}

/// Newton recursion k s_k = sum_{i=1..k} (-1)^{i-1} s_{k-i} p_i with s_0 = 1.
/// Input: (p_1, ..., p_n); output: (s_1, ..., s_n).
inline std::vector<double> newton_elementary(std::span<const double> p) {
  const int n = static_cast<int>(p.size());
  std::vector<double> s(static_cast<std::size_t>(n) + 1, 0.0);
  s[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double acc = 0.0;
    double sign = 1.0;
    for (int i = 1; i <= k; ++i) {
      acc += sign * s[static_cast<std::size_t>(k - i)] * p[static_cast<std::size_t>(i) - 1];
      sign = -sign;
    }
    s[static_cast<std::size_t>(k)] = acc / k;
  }
  s.erase(s.begin());
  return s;
}

/// Natural domains of curvature functions: all of R^n, the positive cone,
/// or the Garding-type cone where s_1, ..., s_k are positive.
struct DomainCone {
  enum class Kind { Full, GammaPlus, GammaK };
  Kind kind = Kind::Full;
  int k = 0;

  static DomainCone full() { return {Kind::Full, 0}; }
  static DomainCone gamma_plus() { return {Kind::GammaPlus, 0}; }
  static DomainCone gamma_k(int k) {
    if (k < 1) throw Error("gamma_k cone requires k >= 1");
    return {Kind::GammaK, k};
  }

  bool contains_positive_cone() const { return true; }  // all three kinds do

  std::string to_string() const {
    switch (kind) {
      case Kind::Full: return "full";
      case Kind::GammaPlus: return "gplus";
      case Kind::GammaK: return "gk:" + std::to_string(k);
    }
    return {};
  }
};

inline bool in_domain(const DomainCone& cone, std::span<const double> kappa) {
  switch (cone.kind) {
    case DomainCone::Kind::Full:
      return true;
    case DomainCone::Kind::GammaPlus:
      for (double x : kappa)
        if (x <= 0.0) return false;
      return true;
    case DomainCone::Kind::GammaK: {
      if (cone.k > static_cast<int>(kappa.size())) return false;
      for (int j = 1; j <= cone.k; ++j)
        if (elementary(j, kappa) <= 0.0) return false;
      return true;
    }
  }
  return false;
}

/// Value / gradient / Hessian of a symmetric function at an eigenvalue tuple.
struct ScalarJet {
  double value = 0.0;
  std::vector<double> grad;  // size n
  SquareMatrix hess;         // n x n
};

/// A named symmetric function f of n eigenvalues, either given as
/// psi(p_1, ..., p_m) over power sums or as the inverse transform
/// 1/f(kappa^{-1}) of another spec. Carries its domain cone and, when known,
/// its homogeneity degree.
class SymmetricFunctionSpec {
 public:
  SymmetricFunctionSpec(std::string name, PsiExpression psi, int n, DomainCone cone,
                        std::optional<double> homogeneity_degree = std::nullopt)
      : name_(std::move(name)),
        psi_(std::move(psi)),
        n_(n),
        cone_(cone),
        homogeneity_(homogeneity_degree) {
    if (n_ < 1) throw Error("ambient dimension must be >= 1");
  }

  /// The inverse symmetric function f~(kappa) = 1 / f(kappa_1^{-1}, ..., kappa_n^{-1}),
  /// defined on the positive cone. Requires the source domain to contain it.
  static SymmetricFunctionSpec inverse_of(SymmetricFunctionSpec inner) {
    if (!inner.cone().contains_positive_cone())
      throw DomainViolation("inverse transform requires a domain containing the positive cone");
    SymmetricFunctionSpec spec("inv:" + inner.name(), PsiExpression::constant(0.0), inner.dim(),
                               DomainCone::gamma_plus(), inner.homogeneity_degree());
    spec.inner_ = std::make_shared<SymmetricFunctionSpec>(std::move(inner));
    return spec;
  }

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  const DomainCone& cone() const { return cone_; }
  std::optional<double> homogeneity_degree() const { return homogeneity_; }
  bool is_inverse() const { return inner_ != nullptr; }
  const SymmetricFunctionSpec& inner() const { return *inner_; }
  const PsiExpression& psi() const { return psi_; }

  double value(std::span<const double> kappa) const { return eval(kappa, 0).value; }
  std::vector<double> gradient(std::span<const double> kappa) const { return eval(kappa, 1).grad; }
  SquareMatrix hessian(std::span<const double> kappa) const { return eval(kappa, 2).hess; }

  ScalarJet eval(std::span<const double> kappa, int order) const {
    if (static_cast<int>(kappa.size()) != n_) throw DimensionMismatch("eigenvalue tuple has wrong length");
    if (!in_domain(cone_, kappa)) throw DomainViolation("eigenvalue tuple outside domain cone " + cone_.to_string());
    return is_inverse() ? eval_inverse(kappa, order) : eval_psi(kappa, order);
  }

 private:
  // chain rule through kappa -> (p_1, ..., p_m)
  ScalarJet eval_psi(std::span<const double> kappa, int order) const {
    const int m = psi_.max_index();
    const int n = n_;
    std::vector<double> p(static_cast<std::size_t>(m));
    for (int l = 1; l <= m; ++l) p[static_cast<std::size_t>(l - 1)] = power_sum(l, kappa);
    const PsiJet pj = psi_.eval(p, order);

    ScalarJet out;
    out.value = pj.value;
    if (order >= 1) {
      // dp_l / dkappa_i = l kappa_i^{l-1}
      std::vector<double> dp(static_cast<std::size_t>(m) * n);
      for (int l = 1; l <= m; ++l)
        for (int i = 0; i < n; ++i)
          dp[static_cast<std::size_t>(l - 1) * n + i] =
              l * (l == 1 ? 1.0 : std::pow(kappa[static_cast<std::size_t>(i)], l - 1));
      out.grad.assign(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < n; ++i) {
        double g = 0.0;
        for (int l = 0; l < m; ++l) g += pj.grad[static_cast<std::size_t>(l)] * dp[static_cast<std::size_t>(l) * n + i];
        out.grad[static_cast<std::size_t>(i)] = g;
      }
      if (order >= 2) {
        out.hess = SquareMatrix(n);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            double h = 0.0;
            for (int l = 0; l < m; ++l)
              for (int q = 0; q < m; ++q)
                h += pj.hess_at(l, q, m) * dp[static_cast<std::size_t>(l) * n + i] *
                     dp[static_cast<std::size_t>(q) * n + j];
            if (i == j)
              for (int l = 2; l <= m; ++l)
                h += pj.grad[static_cast<std::size_t>(l - 1)] * l * (l - 1) *
                     (l == 2 ? 1.0 : std::pow(kappa[static_cast<std::size_t>(i)], l - 2));
            out.hess(i, j) = h;
            out.hess(j, i) = h;
          }
      }
    }
    return out;
  }

  // chain rule through the reciprocal coordinates y_i = 1/kappa_i and 1/u
  ScalarJet eval_inverse(std::span<const double> kappa, int order) const {
    const int n = n_;
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      if (kappa[static_cast<std::size_t>(i)] == 0.0) throw ZeroDenominator("reciprocal of zero eigenvalue");
      y[static_cast<std::size_t>(i)] = 1.0 / kappa[static_cast<std::size_t>(i)];
    }
    const ScalarJet fj = inner_->eval(y, order);
    const double u = fj.value;
    if (u == 0.0) throw ZeroDenominator("inner function vanishes at the reflected point");

    ScalarJet out;
    out.value = 1.0 / u;
    if (order >= 1) {
      // u(kappa) = f(y(kappa)): du/dkappa_i = -f_i(y) / kappa_i^2
      std::vector<double> du(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double ki = kappa[static_cast<std::size_t>(i)];
        du[static_cast<std::size_t>(i)] = -fj.grad[static_cast<std::size_t>(i)] / (ki * ki);
      }
      out.grad.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) out.grad[static_cast<std::size_t>(i)] = -du[static_cast<std::size_t>(i)] / (u * u);
      if (order >= 2) {
        out.hess = SquareMatrix(n);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            const double ki = kappa[static_cast<std::size_t>(i)];
            const double kj = kappa[static_cast<std::size_t>(j)];
            double uij = fj.hess(i, j) / (ki * ki * kj * kj);
            if (i == j) uij += 2.0 * fj.grad[static_cast<std::size_t>(i)] / (ki * ki * ki);
            const double h = (2.0 * du[static_cast<std::size_t>(i)] * du[static_cast<std::size_t>(j)] - u * uij) / (u * u * u);
            out.hess(i, j) = h;
            out.hess(j, i) = h;
          }
      }
    }
    return out;
  }

  std::string name_;
  PsiExpression psi_;
  int n_;
  DomainCone cone_;
  std::optional<double> homogeneity_;
  std::shared_ptr<const SymmetricFunctionSpec> inner_;
};

inline SymmetricFunctionSpec inverse_transform(SymmetricFunctionSpec f) {
  return SymmetricFunctionSpec::inverse_of(std::move(f));
}

/// Relative coalescence threshold below which the divided difference
/// switches to its removable-singularity limit.
inline constexpr double kCoalescenceThreshold = 1e-6;

/// (f_i - f_j) / (kappa_i - kappa_j), with the limit f_ii - f_ij at
/// coalescing eigenvalues (the degenerate segment of the integral
/// representation).
inline double divided_difference(const SymmetricFunctionSpec& f, std::span<const double> kappa, int i, int j) {
  if (i == j) throw Error("divided difference requires distinct indices");
  const double ki = kappa[static_cast<std::size_t>(i)];
  const double kj = kappa[static_cast<std::size_t>(j)];
  const double scale = std::max({1.0, std::abs(ki), std::abs(kj)});
  if (std::abs(ki - kj) > kCoalescenceThreshold * scale) {
    const ScalarJet jet = f.eval(kappa, 1);
    return (jet.grad[static_cast<std::size_t>(i)] - jet.grad[static_cast<std::size_t>(j)]) / (ki - kj);
  }
  const ScalarJet jet = f.eval(kappa, 2);
  return jet.hess(i, i) - jet.hess(i, j);
}

namespace detail {

/// 16-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGL16Nodes = {
    0.0950125098376374401853193, 0.2816035507792589132304605, 0.4580167776572273863424194,
    0.6178762444026437484466718, 0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr std::array<double, 8> kGL16Weights = {
    0.1894506104550684962853967, 0.1826034150449235888667637, 0.1691565193950025381893121,
    0.1495959888165767320815017, 0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

template <typename F>
double gauss_legendre_01(F&& f) {
  double acc = 0.0;
  for (std::size_t q = 0; q < kGL16Nodes.size(); ++q) {
    const double x = kGL16Nodes[q];
    const double w = 0.5 * kGL16Weights[q];
    acc += w * f(0.5 * (1.0 + x));
    acc += w * f(0.5 * (1.0 - x));
  }
  return acc;
}

}  // namespace detail

/// Integral representation of the divided difference:
/// 1/2 int_0^1 (f_ii - 2 f_ij + f_jj) along the segment
/// sigma(t) = kappa + t (kappa_j - kappa_i)/2 (e_i - e_j).
/// 16-node Gauss-Legendre, exact for the polynomial integrands it is
/// cross-checked against. All exposed cones are convex (Gamma_k is a Garding
/// cone), so the segment stays inside whenever kappa does; the per-node
/// evaluation still reports DomainViolation if it ever leaves.
inline double integral_divided_difference(const SymmetricFunctionSpec& f, std::span<const double> kappa, int i,
                                          int j) {
  if (i == j) throw Error("divided difference requires distinct indices");
  std::vector<double> sigma(kappa.begin(), kappa.end());
  const double half_step = 0.5 * (kappa[static_cast<std::size_t>(j)] - kappa[static_cast<std::size_t>(i)]);
  return detail::gauss_legendre_01([&](double t) {
    sigma[static_cast<std::size_t>(i)] = kappa[static_cast<std::size_t>(i)] + t * half_step;
    sigma[static_cast<std::size_t>(j)] = kappa[static_cast<std::size_t>(j)] - t * half_step;
    const ScalarJet jet = f.eval(sigma, 2);  // throws DomainViolation if the segment exits the cone
    return 0.5 * (jet.hess(i, i) - 2.0 * jet.hess(i, j) + jet.hess(j, j));
  });
}

namespace detail {

/// Symbolic Newton recursion: s_k as a psi expression in P_1, ..., P_k.
inline std::vector<PsiExpression> elementary_psi_chain(int k) {
  std::vector<PsiExpression> s;
  s.push_back(PsiExpression::constant(1.0));
  for (int j = 1; j <= k; ++j) {
    PsiExpression acc = PsiExpression::constant(0.0);
    double sign = 1.0;
    for (int i = 1; i <= j; ++i) {
      acc = acc + PsiExpression::constant(sign / j) * s[static_cast<std::size_t>(j - i)] * PsiExpression::variable(i);
      sign = -sign;
    }
    s.push_back(acc);
  }
  return s;
}

}  // namespace detail

inline SymmetricFunctionSpec builtin_power_sum(int k, int n) {
  if (k < 1) throw Error("power-sum family requires k >= 1");
  return SymmetricFunctionSpec("p" + std::to_string(k), PsiExpression::variable(k), n, DomainCone::full(),
                               static_cast<double>(k));
}

inline SymmetricFunctionSpec builtin_elementary(int k, int n) {
  if (k < 1 || k > n) throw Error("elementary family requires 1 <= k <= n");
  auto chain = detail::elementary_psi_chain(k);
  return SymmetricFunctionSpec("s" + std::to_string(k), chain[static_cast<std::size_t>(k)], n,
                               DomainCone::gamma_k(k), static_cast<double>(k));
}

/// q_k = s_k / s_{k-1} on Gamma_{k-1} (q_1 = s_1 on all of R^n by the
/// s_0 := 1 convention).
inline SymmetricFunctionSpec builtin_quotient(int k, int n) {
  if (k < 1 || k > n) throw Error("quotient family requires 1 <= k <= n");
  auto chain = detail::elementary_psi_chain(k);
  PsiExpression expr = chain[static_cast<std::size_t>(k)] / chain[static_cast<std::size_t>(k - 1)];
  DomainCone cone = k >= 2 ? DomainCone::gamma_k(k - 1) : DomainCone::full();
  return SymmetricFunctionSpec("q" + std::to_string(k), expr, n, cone, 1.0);
}

/// (s_k / s_l)^{1/(k-l)} on the positive cone, 0 <= l < k <= n, s_0 := 1.
inline SymmetricFunctionSpec builtin_ratio(int k, int l, int n) {
  if (l < 0 || l >= k || k > n) throw Error("ratio family requires 0 <= l < k <= n");
  auto chain = detail::elementary_psi_chain(k);
  PsiExpression expr = PsiExpression::pow(chain[static_cast<std::size_t>(k)] / chain[static_cast<std::size_t>(l)],
                                          1.0 / (k - l));
  return SymmetricFunctionSpec("ratio:" + std::to_string(k) + ":" + std::to_string(l), expr, n,
                               DomainCone::gamma_plus(), 1.0);
}

/// Name-based lookup for the built-in families: "p2", "s3", "q2", "ratio:3:1".
inline SymmetricFunctionSpec builtin(const std::string& name, int n) {
  auto parse_index = [&](std::size_t from) -> int {
    if (from >= name.size()) throw ParseError("missing index in function name '" + name + "'");
    int value = 0;
    for (std::size_t c = from; c < name.size(); ++c) {
      if (name[c] < '0' || name[c] > '9') throw ParseError("bad index in function name '" + name + "'");
      value = value * 10 + (name[c] - '0');
    }
    return value;
  };
  if (name.rfind("ratio:", 0) == 0) {
    const std::size_t sep = name.find(':', 6);
    if (sep == std::string::npos) throw ParseError("ratio spec needs two indices, e.g. ratio:2:1");
    int k = 0, l = 0;
    try {
      k = std::stoi(name.substr(6, sep - 6));
      l = std::stoi(name.substr(sep + 1));
    } catch (const std::exception&) {
      throw ParseError("bad ratio indices in '" + name + "'");
    }
    return builtin_ratio(k, l, n);
  }
  if (name.size() >= 2) {
    switch (name[0]) {
      case 'p': return builtin_power_sum(parse_index(1), n);
      case 's': return builtin_elementary(parse_index(1), n);
      case 'q': return builtin_quotient(parse_index(1), n);
      default: break;
    }
  }
  throw ParseError("unknown built-in function '" + name + "'");
}

}  // namespace isofun
