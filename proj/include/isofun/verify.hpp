#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isofun/bilinear.hpp"
#include "isofun/core.hpp"
#include "isofun/eigen.hpp"
#include "isofun/matrix.hpp"
#include "isofun/opfn.hpp"
#include "isofun/symfn.hpp"

namespace isofun {

/// How a verification suite samples its inputs. Spectra are drawn uniformly
/// from spectrum_range, rejected until they lie in the cone, and kept at
/// pairwise distance >= gap_floor unless a coalescence batch asks otherwise.
struct SampleConfig {
  int dim = 3;
  int samples = 100;
  std::uint64_t seed = 42;
  DomainCone cone = DomainCone::full();
  std::pair<double, double> spectrum_range{-2.0, 2.0};
  double gap_floor = 1e-3;

  void validate() const {
    if (dim < 1) throw Error("sample config: dim must be >= 1");
    if (samples < 1) throw Error("sample config: samples must be >= 1");
    if (!(spectrum_range.first < spectrum_range.second)) throw Error("sample config: empty spectrum range");
    if (gap_floor < 0.0) throw Error("sample config: gap_floor must be >= 0");
  }
};

struct Counterexample {
  std::string function;
  std::vector<std::pair<std::string, SquareMatrix>> matrices;
  std::vector<std::pair<std::string, double>> values;
};

/// Outcome of one verification suite. pass is true exactly when
/// worst_violation <= tolerance; worst_violation is recorded even for
/// passing runs so regressions stay visible.
struct PropertyReport {
  std::string property;
  bool pass = false;
  int samples_run = 0;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::optional<Counterexample> counterexample;
};

namespace detail {

inline PropertyReport finish_report(std::string property, double tolerance, double worst, int samples_run,
                                    std::optional<Counterexample> ce) {
  PropertyReport r;
  r.property = std::move(property);
  r.tolerance = tolerance;
  r.worst_violation = worst;
  r.samples_run = samples_run;
  r.pass = worst <= tolerance;
  r.counterexample = std::move(ce);
  return r;
}

/// Tracks the worst violation and keeps the payload of the sample attaining it.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::optional<Counterexample> ce;

  bool update(double v) {
    if (v > value) {
      value = v;
      return true;
    }
    return false;
  }
};

inline std::vector<double> sample_spectrum(Rng& rng, const SampleConfig& cfg) {
  const auto [lo, hi] = cfg.spectrum_range;
  const int n = cfg.dim;
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<double> kappa(static_cast<std::size_t>(n));
    for (double& x : kappa) x = rng.uniform(lo, hi);
    bool gaps_ok = true;
    for (int i = 0; i < n && gaps_ok; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(kappa[static_cast<std::size_t>(i)] - kappa[static_cast<std::size_t>(j)]) < cfg.gap_floor) {
          gaps_ok = false;
          break;
        }
    if (gaps_ok && in_domain(cfg.cone, kappa)) return kappa;
  }
  // deterministic in-cone fallback: spaced positive values
  std::vector<double> kappa(static_cast<std::size_t>(n));
  const double step = std::max(cfg.gap_floor, 0.25);
  for (int i = 0; i < n; ++i) kappa[static_cast<std::size_t>(i)] = 0.5 + step * i;
  return kappa;
}

inline SquareMatrix random_direction(Rng& rng, int n) {
  while (true) {
    SquareMatrix b(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
    const double norm = frobenius_norm(b);
    if (norm > 1e-9) return b * (1.0 / norm);
  }
}

inline SquareMatrix random_symmetric_direction(Rng& rng, int n) {
  SquareMatrix b(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      b(i, j) = v;
      b(j, i) = v;
    }
  const double norm = frobenius_norm(b);
  return norm > 1e-9 ? b * (1.0 / norm) : SquareMatrix::identity(n) * (1.0 / std::sqrt(n));
}

inline SquareMatrix random_skew_direction(Rng& rng, int n) {
  SquareMatrix b(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      b(i, j) = v;
      b(j, i) = -v;
    }
  return b;
}

/// SPD matrix with the factors needed to build g-selfadjoint samples exactly.
struct SpdWithRoots {
  SquareMatrix g, sqrt, inv_sqrt, inv;
};

inline SpdWithRoots random_spd_with_roots(Rng& rng, int n, double lo = 0.5, double hi = 2.0) {
  SquareMatrix q = random_orthogonal(rng, n);
  SquareMatrix d(n), ds(n), dis(n), di(n);
  for (int i = 0; i < n; ++i) {
    const double v = rng.uniform(lo, hi);
    d(i, i) = v;
    ds(i, i) = std::sqrt(v);
    dis(i, i) = 1.0 / std::sqrt(v);
    di(i, i) = 1.0 / v;
  }
  SquareMatrix qt = transpose(q);
  return {q * d * qt, q * ds * qt, q * dis * qt, q * di * qt};
}

/// g-selfadjoint operator with prescribed positive spectrum, plus its inverse.
struct GSelfAdjointSample {
  SquareMatrix a, a_inv;
};

inline GSelfAdjointSample g_selfadjoint_with_spectrum(Rng& rng, const SpdWithRoots& g,
                                                      std::span<const double> spectrum) {
  const int n = static_cast<int>(spectrum.size());
  SquareMatrix q = random_orthogonal(rng, n);
  SquareMatrix d(n), di(n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = spectrum[static_cast<std::size_t>(i)];
    di(i, i) = 1.0 / spectrum[static_cast<std::size_t>(i)];
  }
  SquareMatrix sym = q * d * transpose(q);
  SquareMatrix sym_inv = q * di * transpose(q);
  return {g.inv_sqrt * sym * g.sqrt, g.inv_sqrt * sym_inv * g.sqrt};
}

inline SampleConfig positive_cone_config(SampleConfig cfg) {
  cfg.cone = DomainCone::gamma_plus();
  if (cfg.spectrum_range.first <= 0.0) {
    const double hi = std::max(cfg.spectrum_range.second, 0.5);
    cfg.spectrum_range = {std::max(0.1, 0.05 * hi), hi <= 0.5 ? 2.5 : hi};
  }
  return cfg;
}

inline Counterexample make_ce(const OperatorFunction& fop) {
  Counterexample ce;
  ce.function = fop.spec().name();
  return ce;
}

}  // namespace detail

/// dF against central finite differences (h = 1e-5), tolerance 1e-6.
inline PropertyReport check_gradient_fd(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1e-6, kStep = 1e-5;
  detail::Worst worst;
  for (int idx = 0; idx < cfg.samples; ++idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, cfg);
    auto [a, es] = random_diagonalisable(cfg.dim, kappa, rng.next_u64());
    const SquareMatrix b = detail::random_direction(rng, cfg.dim);
    const double exact = fop.directional_derivative(a, b);
    const double fd = (fop.value(a + kStep * b) - fop.value(a - kStep * b)) / (2.0 * kStep);
    if (worst.update(rel_gap(exact, fd))) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", a}, {"B", b}};
      ce.values = {{"dF", exact}, {"finite_difference", fd}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("grad", kTol, worst.value, cfg.samples, worst.value > kTol ? worst.ce : std::nullopt);
}

/// d2F(A)(B,B) against second central differences (h = 1e-4), tolerance 1e-4.
inline PropertyReport check_hessian_fd(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1e-4, kStep = 1e-4;
  detail::Worst worst;
  for (int idx = 0; idx < cfg.samples; ++idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, cfg);
    auto [a, es] = random_diagonalisable(cfg.dim, kappa, rng.next_u64());
    const SquareMatrix b = detail::random_direction(rng, cfg.dim);
    const double exact = fop.second_derivative(a, b, b);
    const double fd =
        (fop.value(a + kStep * b) - 2.0 * fop.value(a) + fop.value(a - kStep * b)) / (kStep * kStep);
    if (worst.update(rel_gap(exact, fd))) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", a}, {"B", b}};
      ce.values = {{"d2F", exact}, {"finite_difference", fd}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("hess", kTol, worst.value, cfg.samples, worst.value > kTol ? worst.ce : std::nullopt);
}

/// F(S A S^{-1}) = F(A) on random conjugations; odd samples use
/// non-diagonalisable upper-triangular A (repeated eigenvalue + nilpotent part).
inline PropertyReport check_similarity_invariance(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1e-8;
  detail::Worst worst;
  for (int idx = 0; idx < cfg.samples; ++idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    auto kappa = detail::sample_spectrum(rng, cfg);
    SquareMatrix a(cfg.dim);
    if (idx % 2 == 0 || cfg.dim < 2) {
      a = random_diagonalisable(cfg.dim, kappa, rng.next_u64()).first;
    } else {
      auto jordan = kappa;
      jordan[1] = jordan[0];  // repeated eigenvalue
      if (!in_domain(cfg.cone, jordan)) jordan = kappa;
      a = SquareMatrix::diagonal(jordan);
      for (int i = 0; i < cfg.dim; ++i)
        for (int j = i + 1; j < cfg.dim; ++j) a(i, j) = (j == i + 1) ? 1.0 : rng.uniform(-1.0, 1.0);
    }
    auto [s, s_inv] = random_invertible(rng, cfg.dim);
    const double base = fop.value(a);
    const double conj = fop.value(s * a * s_inv);
    const double viol = std::abs(conj - base) / (1.0 + std::abs(base));
    if (worst.update(viol)) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", a}, {"S", s}};
      ce.values = {{"F_A", base}, {"F_conjugated", conj}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("similarity", kTol, worst.value, cfg.samples,
                               worst.value > kTol ? worst.ce : std::nullopt);
}

/// Strict monotonicity: every eigenvalue of F'(A) is positive on cone samples,
/// and the h-derivative of the pullback pairs positively with rank-one
/// directions. worst_violation is the negated smallest margin.
inline PropertyReport check_monotone(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = -1e-12;  // pass needs strictly positive margins
  detail::Worst worst;
  for (int idx = 0; idx < cfg.samples; ++idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, cfg);
    auto [a, es] = random_diagonalisable(cfg.dim, kappa, rng.next_u64());
    double margin = std::numeric_limits<double>::infinity();
    for (double ev : fop.derivative_eigenvalues(es)) margin = std::min(margin, ev);

    const detail::SpdWithRoots g = detail::random_spd_with_roots(rng, cfg.dim);
    const auto gsa = detail::g_selfadjoint_with_spectrum(rng, g, kappa);
    const InnerProduct ip{BilinearForm(g.g)};
    const BilinearForm h{g.g * gsa.a};
    const CoBilinearForm dphi = eval_on_form_derivative(fop, ip, h);
    for (int probe = 0; probe < 4; ++probe) {
      std::vector<double> xi(static_cast<std::size_t>(cfg.dim));
      double norm = 0.0;
      for (double& x : xi) {
        x = rng.uniform(-1.0, 1.0);
        norm += x * x;
      }
      if (norm < 1e-12) continue;
      SquareMatrix outer(cfg.dim);
      for (int i = 0; i < cfg.dim; ++i)
        for (int j = 0; j < cfg.dim; ++j)
          outer(i, j) = xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(j)] / norm;
      margin = std::min(margin, pair_forms(dphi, BilinearForm(outer)));
    }

    if (worst.update(-margin)) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", a}};
      ce.values = {{"smallest_margin", margin}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("monotone", kTol, worst.value, cfg.samples,
                               worst.value > kTol ? worst.ce : std::nullopt);
}

/// F(lambda A) = lambda^degree F(A) for lambda in {0.5, 2, 10}, tol 1e-10.
inline PropertyReport check_homogeneous(const OperatorFunction& fop, double degree, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1e-10;
  const double lambdas[] = {0.5, 2.0, 10.0};
  detail::Worst worst;
  for (int idx = 0; idx < cfg.samples; ++idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, cfg);
    auto [a, es] = random_diagonalisable(cfg.dim, kappa, rng.next_u64());
    const double base = fop.value(a);
    for (double lam : lambdas) {
      const double scaled = fop.value(a * lam);
      const double expected = std::pow(lam, degree) * base;
      if (worst.update(rel_gap(scaled, expected))) {
        Counterexample ce = detail::make_ce(fop);
        ce.matrices = {{"A", a}};
        ce.values = {{"lambda", lam}, {"F_scaled", scaled}, {"expected", expected}};
        worst.ce = std::move(ce);
      }
    }
  }
  return detail::finish_report("homog", kTol, worst.value, cfg.samples, worst.value > kTol ? worst.ce : std::nullopt);
}

/// Concavity along directions symmetric in an eigenbasis of A:
/// d2F(A)(eta, eta) <= 1e-10 ||eta||^2.
inline PropertyReport check_concave_symmetric_dirs(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1e-10;
  detail::Worst worst;
  for (int idx = 0; idx < cfg.samples; ++idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, cfg);
    auto [a, es] = random_diagonalisable(cfg.dim, kappa, rng.next_u64());
    const SquareMatrix t = detail::random_symmetric_direction(rng, cfg.dim);
    const SquareMatrix eta = es.basis * t * es.basis_inverse;
    const double norm2 = frobenius_norm(eta) * frobenius_norm(eta);
    const double value = fop.second_derivative(a, eta, eta);
    if (worst.update(value / std::max(norm2, 1e-30))) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", a}, {"eta", eta}};
      ce.values = {{"d2F", value}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("concave", kTol, worst.value, cfg.samples, worst.value > kTol ? worst.ce : std::nullopt);
}

/// Reproduces the convexity counterexample: f = p_2 is convex in the
/// eigenvalues, yet d2F(A)(eta, eta) = 2 tr(eta^2) < 0 for skew eta in an
/// eigenbasis of A. The classic witness eta = [[0,1],[-1,0]] gives exactly -4;
/// symmetric eta must stay nonnegative. The witness is reported as the
/// counterexample payload.
inline PropertyReport demo_nonconvexity_skew(const SampleConfig& cfg) {
  cfg.validate();
  if (cfg.dim < 2) throw Error("nonconvexity demo requires dim >= 2");
  constexpr double kTol = 1e-10;
  const OperatorFunction fop(builtin_power_sum(2, cfg.dim));

  std::vector<double> witness_spectrum(static_cast<std::size_t>(cfg.dim));
  for (int i = 0; i < cfg.dim; ++i) witness_spectrum[static_cast<std::size_t>(i)] = 1.0 + i;
  const SquareMatrix a0 = SquareMatrix::diagonal(witness_spectrum);
  SquareMatrix eta0(cfg.dim);
  eta0(0, 1) = 1.0;
  eta0(1, 0) = -1.0;
  const double witness = fop.second_derivative(a0, eta0, eta0);

  double max_skew = -std::numeric_limits<double>::infinity();
  double min_sym = std::numeric_limits<double>::infinity();
  for (int idx = 0; idx < cfg.samples; ++idx) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, cfg);
    auto [a, es] = random_diagonalisable(cfg.dim, kappa, rng.next_u64());
    const SquareMatrix skew = es.basis * detail::random_skew_direction(rng, cfg.dim) * es.basis_inverse;
    if (frobenius_norm(skew) > 1e-9) max_skew = std::max(max_skew, fop.second_derivative(a, skew, skew));
    const SquareMatrix sym = es.basis * detail::random_symmetric_direction(rng, cfg.dim) * es.basis_inverse;
    min_sym = std::min(min_sym, fop.second_derivative(a, sym, sym));
  }

  const double worst = std::max({std::abs(witness + 4.0), max_skew, -min_sym});
  Counterexample ce;
  ce.function = fop.spec().name();
  ce.matrices = {{"A", a0}, {"eta", eta0}};
  ce.values = {{"d2F", witness}, {"max_skew_d2F", max_skew}, {"min_symmetric_d2F", min_sym}};
  return detail::finish_report("nonconvex-skew", kTol, worst, cfg.samples, std::move(ce));
}

/// Gradient inequality for positive, strictly monotone, 1-homogeneous f on
/// the positive cone: dF(A)(ad_g(eta) A^{-1} eta) >= (dF(A)eta)^2 / F(A)
/// for g-selfadjoint A and arbitrary eta, up to slack 1e-9 * scale.
inline PropertyReport check_invconc_i(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1e-9;
  const SampleConfig pos = detail::positive_cone_config(cfg);
  detail::Worst worst;
  for (int idx = 0; idx < pos.samples; ++idx) {
    Rng rng(derive_seed(pos.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, pos);
    const detail::SpdWithRoots g = detail::random_spd_with_roots(rng, pos.dim);
    const auto gsa = detail::g_selfadjoint_with_spectrum(rng, g, kappa);
    const SquareMatrix eta = detail::random_direction(rng, pos.dim);

    const SquareMatrix fprime = fop.derivative(gsa.a);
    const double f_value = fop.value(gsa.a);
    const SquareMatrix ad_eta = g.inv * transpose(eta) * g.g;
    const double lhs = trace_of_product(fprime, ad_eta * gsa.a_inv * eta);
    const double df_eta = trace_of_product(fprime, eta);
    const double rhs = df_eta * df_eta / f_value;

    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    if (worst.update((rhs - lhs) / scale)) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", gsa.a}, {"g", g.g}, {"eta", eta}};
      ce.values = {{"lhs", lhs}, {"rhs", rhs}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("invconc1", kTol, worst.value, pos.samples,
                               worst.value > kTol ? worst.ce : std::nullopt);
}

/// Curvature inequality for inverse concave f:
/// d2F(A)(eta,eta) + 2 dF(A)(eta A^{-1} eta) >= 2 (dF(A)eta)^2 / F(A)
/// for g-selfadjoint A and g-selfadjoint eta.
inline PropertyReport check_invconc_ii(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1e-9;
  const SampleConfig pos = detail::positive_cone_config(cfg);
  detail::Worst worst;
  for (int idx = 0; idx < pos.samples; ++idx) {
    Rng rng(derive_seed(pos.seed, static_cast<std::uint64_t>(idx)));
    const auto kappa = detail::sample_spectrum(rng, pos);
    const detail::SpdWithRoots g = detail::random_spd_with_roots(rng, pos.dim);
    const auto gsa = detail::g_selfadjoint_with_spectrum(rng, g, kappa);
    const SquareMatrix t = detail::random_symmetric_direction(rng, pos.dim);
    const SquareMatrix eta = g.inv_sqrt * t * g.sqrt;  // g-selfadjoint direction

    const SquareMatrix fprime = fop.derivative(gsa.a);
    const double f_value = fop.value(gsa.a);
    const double lhs = fop.second_derivative(gsa.a, eta, eta) +
                       2.0 * trace_of_product(fprime, eta * gsa.a_inv * eta);
    const double df_eta = trace_of_product(fprime, eta);
    const double rhs = 2.0 * df_eta * df_eta / f_value;

    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    if (worst.update((rhs - lhs) / scale)) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", gsa.a}, {"g", g.g}, {"eta", eta}};
      ce.values = {{"lhs", lhs}, {"rhs", rhs}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("invconc2", kTol, worst.value, pos.samples,
                               worst.value > kTol ? worst.ce : std::nullopt);
}

/// Loss of regularity of F(A) = |tr(A^2)|^{3/2} away from symmetric matrices:
/// along x -> [[0,x],[1,0]] the second difference quotient D(h) diverges like
/// 2^{5/2} h^{-1/2} (D(h)/D(4h) -> 2), while along the symmetric line
/// x -> [[0,x],[x,0]] it vanishes linearly (D(4h)/D(h) -> 4). The function is
/// still C^1 at zero: F(0) = 0 and F'(0) = 0.
inline PropertyReport demo_regularity_loss(std::span<const double> steps) {
  if (steps.empty()) throw Error("regularity demo needs at least one step");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] <= 0.0) throw Error("regularity demo steps must be positive");
    if (i > 0 && steps[i] >= steps[i - 1]) throw Error("regularity demo steps must be decreasing");
  }
  constexpr double kTol = 0.02;
  const SymmetricFunctionSpec spec("psi:pow abs P2 1.5",
                                   PsiExpression::pow(PsiExpression::abs(PsiExpression::variable(2)), 1.5), 2,
                                   DomainCone::full());
  const OperatorFunction fop(spec);

  const auto on_line = [&](double x, bool symmetric) {
    SquareMatrix a(2);
    a(0, 1) = x;
    a(1, 0) = symmetric ? x : 1.0;
    return fop.value(a);
  };
  const auto second_diff = [&](double h, bool symmetric) {
    return (on_line(h, symmetric) + on_line(-h, symmetric) - 2.0 * on_line(0.0, symmetric)) / (h * h);
  };

  double worst = 0.0;
  Counterexample ce;
  ce.function = spec.name();
  for (double h : steps) {
    const double ratio_nonsym = second_diff(h, false) / second_diff(4.0 * h, false);
    const double ratio_sym = second_diff(4.0 * h, true) / second_diff(h, true);
    worst = std::max({worst, std::abs(ratio_nonsym / 2.0 - 1.0), std::abs(ratio_sym / 4.0 - 1.0)});
    ce.values.emplace_back("D_ratio_nonsym_h=" + std::to_string(h), ratio_nonsym);
    ce.values.emplace_back("D_ratio_sym_h=" + std::to_string(h), ratio_sym);
  }

  // C^1 at the origin: value and derivative both vanish
  const SquareMatrix zero(2);
  worst = std::max({worst, std::abs(fop.value(zero)), frobenius_norm(fop.derivative(zero))});
  ce.values.emplace_back("F_at_zero", fop.value(zero));

  PropertyReport r = detail::finish_report("regularity", kTol, worst, static_cast<int>(steps.size()), std::move(ce));
  return r;
}

inline PropertyReport demo_regularity_loss() {
  const double steps[] = {1e-2, 1e-4, 1e-6};
  return demo_regularity_loss(std::span<const double>(steps));
}

/// Cross-check of the eigenbasis second-derivative representation against the
/// trace form, of F'(A)'s spectrum against grad f, and of the commutator
/// [F'(A), A] = 0. Runs a wide-gap batch (tolerance 1e-8) and a coalescent
/// batch with spectral gap 1e-7 (tolerance 1e-4); violations are normalized by
/// their batch tolerance, so the reported threshold is 1.
inline PropertyReport check_eigen_consistency(const OperatorFunction& fop, const SampleConfig& cfg) {
  cfg.validate();
  constexpr double kTol = 1.0;
  detail::Worst worst;
  int runs = 0;
  for (int idx = 0; idx < cfg.samples; ++idx) {
    const bool coalescent = idx % 3 == 2;
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
    SampleConfig gapped = cfg;
    gapped.gap_floor = std::max(cfg.gap_floor, 1e-3);
    auto kappa = detail::sample_spectrum(rng, gapped);
    if (coalescent && cfg.dim >= 2) {
      kappa[1] = kappa[0] + 1e-7;
      if (!in_domain(cfg.cone, kappa)) kappa[1] = kappa[0];  // stay in cone, keep the coalescence
    }
    auto [a, es] = random_diagonalisable(cfg.dim, kappa, rng.next_u64());
    const SquareMatrix eta = detail::random_direction(rng, cfg.dim);
    const double tol = coalescent ? 1e-4 : 1e-8;

    const double trace_form = fop.second_derivative(a, eta, eta);
    const double eigen_form = fop.second_derivative_in_eigenbasis(es, eta);
    double viol = rel_gap(trace_form, eigen_form) / tol;

    // F'(A) in the eigenbasis must be diag(grad f) ...
    const SquareMatrix fprime = fop.derivative(a);
    const SquareMatrix d = es.basis_inverse * fprime * es.basis;
    const std::vector<double> grad = fop.derivative_eigenvalues(es);
    const double dscale = std::max(1.0, max_abs(d));
    for (int i = 0; i < cfg.dim; ++i)
      for (int j = 0; j < cfg.dim; ++j)
        viol = std::max(viol, (i == j ? rel_gap(d(i, i), grad[static_cast<std::size_t>(i)])
                                      : std::abs(d(i, j)) / dscale) /
                                  1e-8);

    // ... and commute with A
    const double comm = frobenius_norm(fprime * a - a * fprime);
    viol = std::max(viol, comm / std::max(1e-30, frobenius_norm(fprime) * frobenius_norm(a)) / 1e-10);

    ++runs;
    if (worst.update(viol)) {
      Counterexample ce = detail::make_ce(fop);
      ce.matrices = {{"A", a}, {"eta", eta}};
      ce.values = {{"d2F_trace_form", trace_form}, {"d2F_eigen_form", eigen_form}};
      worst.ce = std::move(ce);
    }
  }
  return detail::finish_report("eigen-consistency", kTol, worst.value, runs,
                               worst.value > kTol ? worst.ce : std::nullopt);
}

enum class Suite {
  Grad,
  Hess,
  Similarity,
  Monotone,
  Homog,
  Concave,
  NonconvexSkew,
  Invconc1,
  Invconc2,
  Regularity,
  EigenConsistency,
};

inline std::optional<Suite> suite_from_name(std::string_view name) {
  if (name == "grad") return Suite::Grad;
  if (name == "hess") return Suite::Hess;
  if (name == "similarity") return Suite::Similarity;
  if (name == "monotone") return Suite::Monotone;
  if (name == "homog") return Suite::Homog;
  if (name == "concave") return Suite::Concave;
  if (name == "nonconvex-skew") return Suite::NonconvexSkew;
  if (name == "invconc1") return Suite::Invconc1;
  if (name == "invconc2") return Suite::Invconc2;
  if (name == "regularity") return Suite::Regularity;
  if (name == "eigen-consistency") return Suite::EigenConsistency;
  return std::nullopt;
}

inline const char* suite_name(Suite s) {
  switch (s) {
    case Suite::Grad: return "grad";
    case Suite::Hess: return "hess";
    case Suite::Similarity: return "similarity";
    case Suite::Monotone: return "monotone";
    case Suite::Homog: return "homog";
    case Suite::Concave: return "concave";
    case Suite::NonconvexSkew: return "nonconvex-skew";
    case Suite::Invconc1: return "invconc1";
    case Suite::Invconc2: return "invconc2";
    case Suite::Regularity: return "regularity";
    case Suite::EigenConsistency: return "eigen-consistency";
  }
  return "";
}

/// Dispatch a named suite. Homog requires the spec to know its homogeneity
/// degree; NonconvexSkew and Regularity ignore the function argument.
inline PropertyReport run_suite(Suite suite, const OperatorFunction& fop, const SampleConfig& cfg) {
  switch (suite) {
    case Suite::Grad: return check_gradient_fd(fop, cfg);
    case Suite::Hess: return check_hessian_fd(fop, cfg);
    case Suite::Similarity: return check_similarity_invariance(fop, cfg);
    case Suite::Monotone: return check_monotone(fop, cfg);
    case Suite::Homog: {
      const auto degree = fop.spec().homogeneity_degree();
      if (!degree) throw Error("homogeneity suite needs a function with known degree");
      return check_homogeneous(fop, *degree, cfg);
    }
    case Suite::Concave: return check_concave_symmetric_dirs(fop, cfg);
    case Suite::NonconvexSkew: return demo_nonconvexity_skew(cfg);
    case Suite::Invconc1: return check_invconc_i(fop, cfg);
    case Suite::Invconc2: return check_invconc_ii(fop, cfg);
    case Suite::Regularity: return demo_regularity_loss();
    case Suite::EigenConsistency: return check_eigen_consistency(fop, cfg);
  }
  throw Error("unknown suite");
}

}  // namespace isofun
