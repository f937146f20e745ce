#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "isofun/core.hpp"
#include "isofun/symfn.hpp"
#include "test_support.hpp"

using namespace isofun;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> random_tuple(Rng& rng, int n, double lo, double hi) {
  std::vector<double> kappa(static_cast<std::size_t>(n));
  for (double& x : kappa) x = rng.uniform(lo, hi);
  return kappa;
}

}  // namespace

TEST_CASE("power sums") {
  const double ones[] = {1.0, 1.0, 1.0};
  REQUIRE(power_sum(1, ones) == 3.0);
  const double two_three[] = {2.0, 3.0};
  REQUIRE(power_sum(2, two_three) == 13.0);
  const double pm[] = {-1.0, 1.0};
  REQUIRE(power_sum(3, pm) == 0.0);
  REQUIRE_THROWS_AS(power_sum(0, ones), Error);
}

TEST_CASE("elementary symmetric polynomials against subset enumeration") {
  const double k123[] = {1.0, 2.0, 3.0};
  REQUIRE_THAT(elementary(2, k123), WithinAbs(11.0, 1e-13));
  REQUIRE_THAT(elementary(3, k123), WithinAbs(6.0, 1e-13));
  REQUIRE_THROWS_AS(elementary(4, k123), Error);
  REQUIRE_THROWS_AS(elementary(0, k123), Error);

  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const auto kappa = random_tuple(rng, n, -2.0, 2.0);
    REQUIRE(rel_gap(elementary(1, kappa), power_sum(1, kappa)) < 1e-13);
    for (int k = 1; k <= n; ++k) REQUIRE(rel_gap(elementary(k, kappa), oracle::brute_elementary(k, kappa)) < 1e-12);
  }
}

TEST_CASE("newton transform from power sums to elementary polynomials") {
  SECTION("frozen examples") {
    const double p[] = {5.0, 13.0};
    const auto s = newton_elementary(p);
    REQUIRE_THAT(s[0], WithinAbs(5.0, 1e-13));
    REQUIRE_THAT(s[1], WithinAbs(6.0, 1e-13));

    const double zeros[] = {0.0, 0.0, 0.0};
    for (double v : newton_elementary(zeros)) REQUIRE(v == 0.0);

    const double single[] = {4.2};
    REQUIRE(newton_elementary(single)[0] == 4.2);
  }
  SECTION("consistency with direct elementary evaluation") {
    Rng rng(31);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 1 + static_cast<int>(rng.next_u64() % 6);
      const auto kappa = random_tuple(rng, n, -2.0, 2.0);
      std::vector<double> p(static_cast<std::size_t>(n));
      for (int k = 1; k <= n; ++k) p[static_cast<std::size_t>(k - 1)] = power_sum(k, kappa);
      const auto s = newton_elementary(p);
      for (int k = 1; k <= n; ++k) REQUIRE(rel_gap(s[static_cast<std::size_t>(k - 1)], elementary(k, kappa)) < 1e-10);
    }
  }
}

TEST_CASE("symbolic Newton chain matches subset enumeration") {
  // builtin s_k evaluates through the psi-expression recursion; pin it
  // against the independent brute-force oracle
  Rng rng(307);
  for (const int n : {2, 3, 5, 6}) {
    for (int k = 1; k <= n; ++k) {
      const auto f = builtin_elementary(k, n);
      for (int trial = 0; trial < 25; ++trial) {
        const auto kappa = random_tuple(rng, n, 0.3, 2.5);
        REQUIRE(rel_gap(f.value(kappa), oracle::brute_elementary(k, kappa)) < 1e-11);
      }
    }
  }
}

TEST_CASE("domain cones") {
  const double pos[] = {1.0, 2.0, 3.0};
  const double mixed[] = {1.0, -1.0, 3.0};
  REQUIRE(in_domain(DomainCone::gamma_plus(), pos));
  REQUIRE_FALSE(in_domain(DomainCone::gamma_plus(), mixed));
  REQUIRE(in_domain(DomainCone::full(), mixed));

  // s1 = 4 > 0, s2 = 1 > 0
  const double gk_point[] = {-1.0, 2.0, 3.0};
  REQUIRE_THAT(oracle::brute_elementary(2, gk_point), WithinAbs(1.0, 1e-13));
  REQUIRE(in_domain(DomainCone::gamma_k(2), gk_point));
  REQUIRE_FALSE(in_domain(DomainCone::gamma_k(3), gk_point));  // s3 = -6
  REQUIRE_THROWS_AS(DomainCone::gamma_k(0), Error);
}

TEST_CASE("gradients and Hessians of the named examples") {
  SECTION("s1 is linear") {
    const auto f = builtin_elementary(1, 3);
    const double kappa[] = {0.4, 1.7, 2.9};
    for (double g : f.gradient(kappa)) REQUIRE_THAT(g, WithinAbs(1.0, 1e-13));
    REQUIRE(frobenius_norm(f.hessian(kappa)) < 1e-13);
  }
  SECTION("p2 at (2,3)") {
    const auto f = builtin_power_sum(2, 2);
    const double kappa[] = {2.0, 3.0};
    const auto grad = f.gradient(kappa);
    REQUIRE_THAT(grad[0], WithinAbs(4.0, 1e-13));
    REQUIRE_THAT(grad[1], WithinAbs(6.0, 1e-13));
    const SquareMatrix hess = f.hessian(kappa);
    REQUIRE(frobenius_norm(hess - 2.0 * SquareMatrix::identity(2)) < 1e-12);
  }
  SECTION("s2 at (1,2,3)") {
    const auto f = builtin_elementary(2, 3);
    const double kappa[] = {1.0, 2.0, 3.0};
    const auto grad = f.gradient(kappa);
    REQUIRE_THAT(grad[0], WithinAbs(5.0, 1e-12));
    REQUIRE_THAT(grad[1], WithinAbs(4.0, 1e-12));
    REQUIRE_THAT(grad[2], WithinAbs(3.0, 1e-12));
  }
  SECTION("s2 Hessian in two variables is the swap matrix") {
    const auto f = builtin_elementary(2, 2);
    const double kappa[] = {2.0, 0.7};
    const SquareMatrix hess = f.hessian(kappa);
    REQUIRE(frobenius_norm(hess - SquareMatrix{{0, 1}, {1, 0}}) < 1e-12);
  }
}

TEST_CASE("analytic derivatives match finite differences across the families") {
  Rng rng(97);
  const int n = 3;
  const std::vector<SymmetricFunctionSpec> family = {
      builtin_power_sum(2, n),  builtin_power_sum(3, n),  builtin_elementary(2, n),
      builtin_elementary(3, n), builtin_quotient(2, n),   builtin_quotient(3, n),
      builtin_ratio(2, 1, n),   builtin_ratio(2, 0, n),
  };
  for (const auto& f : family) {
    for (int trial = 0; trial < 100; ++trial) {
      auto kappa = random_tuple(rng, n, 0.3, 3.0);  // interior of every cone
      const auto grad = f.gradient(kappa);
      const auto fd_grad = oracle::fd_gradient(f, kappa);
      for (int i = 0; i < n; ++i)
        REQUIRE(rel_gap(grad[static_cast<std::size_t>(i)], fd_grad[static_cast<std::size_t>(i)]) < 1e-6);
      const SquareMatrix hess = f.hessian(kappa);
      const SquareMatrix fd_hess = oracle::fd_hessian(f, kappa);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) REQUIRE(rel_gap(hess(i, j), fd_hess(i, j)) < 1e-4);
    }
  }
}

TEST_CASE("permutation invariance") {
  Rng rng(53);
  const int n = 4;
  const std::vector<SymmetricFunctionSpec> family = {builtin_power_sum(3, n), builtin_elementary(3, n),
                                                     builtin_quotient(2, n), builtin_ratio(3, 1, n)};
  for (const auto& f : family) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto kappa = random_tuple(rng, n, 0.3, 3.0);
      auto permuted = kappa;
      for (int i = n - 1; i > 0; --i)
        std::swap(permuted[static_cast<std::size_t>(i)], permuted[rng.next_u64() % (i + 1)]);
      REQUIRE(rel_gap(f.value(kappa), f.value(permuted)) < 1e-12);
    }
  }
}

TEST_CASE("divided differences") {
  SECTION("constant gradient gives zero") {
    const auto f = builtin_elementary(1, 2);
    const double kappa[] = {0.3, 4.0};
    REQUIRE_THAT(divided_difference(f, kappa, 0, 1), WithinAbs(0.0, 1e-14));
  }
  SECTION("p3 quotient branch") {
    const auto f = builtin_power_sum(3, 2);
    const double kappa[] = {1.0, 2.0};
    REQUIRE_THAT(divided_difference(f, kappa, 0, 1), WithinAbs(9.0, 1e-12));
  }
  SECTION("p3 coalesced branch hits the removable limit") {
    const auto f = builtin_power_sum(3, 2);
    const double kappa[] = {2.0, 2.0};
    REQUIRE_THAT(divided_difference(f, kappa, 0, 1), WithinAbs(12.0, 1e-12));
  }
  SECTION("continuity across the branch threshold") {
    for (const auto& f : {builtin_power_sum(3, 2), builtin_power_sum(4, 2), builtin_elementary(2, 2)}) {
      const double base = 1.3;
      const double quotient_side[] = {base, base + 1e-4};
      const double limit_side[] = {base, base + 1e-8};
      const double wide = divided_difference(f, quotient_side, 0, 1);
      const double tight = divided_difference(f, limit_side, 0, 1);
      REQUIRE(rel_gap(wide, tight) < 1e-4);
    }
    // closed-form check for p3: divided difference is 3(k_i + k_j)
    const auto p3 = builtin_power_sum(3, 2);
    const double near[] = {1.3, 1.3 + 1e-8};
    REQUIRE(rel_gap(divided_difference(p3, near, 0, 1), 3.0 * (near[0] + near[1])) < 1e-6);
  }
  SECTION("index validation") {
    const auto f = builtin_power_sum(2, 2);
    const double kappa[] = {1.0, 2.0};
    REQUIRE_THROWS_AS(divided_difference(f, kappa, 1, 1), Error);
  }
}

TEST_CASE("integral representation of the divided difference") {
  SECTION("zero Hessian integrates to zero") {
    const auto f = builtin_elementary(1, 2);
    const double kappa[] = {0.5, 3.0};
    REQUIRE_THAT(integral_divided_difference(f, kappa, 0, 1), WithinAbs(0.0, 1e-14));
  }
  SECTION("constant integrand for p2") {
    const auto f = builtin_power_sum(2, 3);
    const double kappa[] = {0.4, 2.2, -1.0};
    REQUIRE_THAT(integral_divided_difference(f, kappa, 0, 1), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(integral_divided_difference(f, kappa, 1, 2), WithinAbs(2.0, 1e-12));
  }
  SECTION("matches the quotient for p3 at (1,2)") {
    const auto f = builtin_power_sum(3, 2);
    const double kappa[] = {1.0, 2.0};
    REQUIRE_THAT(integral_divided_difference(f, kappa, 0, 1), WithinAbs(9.0, 1e-12));
  }
  SECTION("quadrature equals quotient for polynomial families") {
    Rng rng(71);
    for (const auto& f : {builtin_power_sum(2, 3), builtin_power_sum(3, 3), builtin_power_sum(4, 3),
                          builtin_elementary(2, 3), builtin_elementary(3, 3)}) {
      const bool full_cone = f.cone().kind == DomainCone::Kind::Full;
      for (int trial = 0; trial < 40; ++trial) {
        auto kappa = full_cone ? random_tuple(rng, 3, -2.0, 2.0) : random_tuple(rng, 3, 0.2, 2.2);
        if (std::abs(kappa[0] - kappa[1]) < 1e-3) continue;
        const double quot = divided_difference(f, kappa, 0, 1);
        const double quad = integral_divided_difference(f, kappa, 0, 1);
        REQUIRE(rel_gap(quot, quad) < 1e-8);
      }
    }
  }
  SECTION("smooth non-polynomial quotients on their Garding cone") {
    Rng rng(73);
    const auto q2 = builtin_quotient(2, 3);
    for (int trial = 0; trial < 40; ++trial) {
      auto kappa = random_tuple(rng, 3, 0.3, 2.5);
      if (std::abs(kappa[0] - kappa[1]) < 1e-2) continue;
      REQUIRE(rel_gap(divided_difference(q2, kappa, 0, 1), integral_divided_difference(q2, kappa, 0, 1)) <
              1e-9);
    }
  }
  SECTION("out-of-cone points report a violation") {
    const auto q2 = builtin_quotient(2, 3);
    const double kappa[] = {-1.0, -2.0, 0.5};
    REQUIRE_THROWS_AS(integral_divided_difference(q2, kappa, 0, 1), DomainViolation);
  }
}

TEST_CASE("inverse transform") {
  SECTION("the top elementary polynomial is self-inverse") {
    const auto f = builtin_elementary(3, 3);
    const auto finv = inverse_transform(builtin_elementary(3, 3));
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
      const auto kappa = random_tuple(rng, 3, 0.2, 3.0);
      REQUIRE(rel_gap(f.value(kappa), finv.value(kappa)) < 1e-12);
    }
  }
  SECTION("inverse of the trace is the harmonic-type mean") {
    const auto finv = inverse_transform(builtin_elementary(1, 2));
    const double ones[] = {1.0, 1.0};
    REQUIRE_THAT(finv.value(ones), WithinAbs(0.5, 1e-14));
    const double twos[] = {2.0, 2.0};
    REQUIRE_THAT(finv.value(twos), WithinAbs(1.0, 1e-14));
  }
  SECTION("gradient and Hessian through the reciprocal chain rule") {
    const auto finv = inverse_transform(builtin_quotient(2, 3));
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
      const auto kappa = random_tuple(rng, 3, 0.3, 3.0);
      const auto grad = finv.gradient(kappa);
      const auto fd = oracle::fd_gradient(finv, kappa);
      for (int i = 0; i < 3; ++i)
        REQUIRE(rel_gap(grad[static_cast<std::size_t>(i)], fd[static_cast<std::size_t>(i)]) < 1e-6);
      const SquareMatrix hess = finv.hessian(kappa);
      const SquareMatrix fd_hess = oracle::fd_hessian(finv, kappa);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(rel_gap(hess(i, j), fd_hess(i, j)) < 1e-4);
    }
  }
  SECTION("homogeneity degree carries over") {
    REQUIRE(inverse_transform(builtin_quotient(2, 3)).homogeneity_degree() == 1.0);
  }
  SECTION("vanishing inner function reports a zero denominator") {
    // f = P1 - 2 vanishes at the reflected point of (1, 1)
    const SymmetricFunctionSpec f("shifted", PsiExpression::variable(1) - PsiExpression::constant(2.0), 2,
                                  DomainCone::gamma_plus());
    const auto finv = inverse_transform(f);
    const double kappa[] = {1.0, 1.0};
    REQUIRE_THROWS_AS(finv.value(kappa), ZeroDenominator);
  }
  SECTION("domain is the positive cone") {
    const auto finv = inverse_transform(builtin_elementary(2, 2));
    const double kappa[] = {1.0, -1.0};
    REQUIRE_THROWS_AS(finv.value(kappa), DomainViolation);
  }
}

TEST_CASE("built-in families") {
  SECTION("q2 value") {
    const auto q2 = builtin_quotient(2, 3);
    const double kappa[] = {1.0, 2.0, 3.0};
    REQUIRE_THAT(q2.value(kappa), WithinRel(11.0 / 6.0, 1e-13));
  }
  SECTION("ratio with the s0 = 1 convention") {
    const auto r20 = builtin_ratio(2, 0, 2);
    const double kappa[] = {2.0, 4.5};
    REQUIRE_THAT(r20.value(kappa), WithinRel(std::sqrt(9.0), 1e-13));
  }
  SECTION("q1 collapses to s1") {
    const auto q1 = builtin_quotient(1, 3);
    const auto s1 = builtin_elementary(1, 3);
    const double kappa[] = {0.2, -1.0, 2.5};
    REQUIRE_THAT(q1.value(kappa), WithinAbs(s1.value(kappa), 1e-13));
  }
  SECTION("invalid indices") {
    REQUIRE_THROWS_AS(builtin_elementary(4, 3), Error);
    REQUIRE_THROWS_AS(builtin_quotient(0, 3), Error);
    REQUIRE_THROWS_AS(builtin_ratio(2, 2, 3), Error);
    REQUIRE_THROWS_AS(builtin("x7", 3), ParseError);
  }
  SECTION("name lookup") {
    REQUIRE(builtin("p2", 3).name() == "p2");
    REQUIRE(builtin("s3", 3).name() == "s3");
    REQUIRE(builtin("q2", 3).name() == "q2");
    REQUIRE(builtin("ratio:3:1", 3).name() == "ratio:3:1");
  }
}

TEST_CASE("homogeneity of the families at the scalar level") {
  Rng rng(83);
  const int n = 3;
  struct Case {
    SymmetricFunctionSpec f;
    double degree;
  };
  const std::vector<Case> cases = {{builtin_elementary(2, n), 2.0}, {builtin_elementary(3, n), 3.0},
                                   {builtin_quotient(2, n), 1.0},   {builtin_quotient(3, n), 1.0},
                                   {builtin_ratio(2, 1, n), 1.0},   {builtin_ratio(3, 1, n), 1.0}};
  for (const auto& [f, degree] : cases) {
    REQUIRE(f.homogeneity_degree() == degree);
    for (int trial = 0; trial < 20; ++trial) {
      const auto kappa = random_tuple(rng, n, 0.3, 3.0);
      for (double lambda : {0.5, 2.0, 10.0}) {
        auto scaled = kappa;
        for (double& x : scaled) x *= lambda;
        REQUIRE(rel_gap(f.value(scaled), std::pow(lambda, degree) * f.value(kappa)) < 1e-10);
      }
    }
  }
}
