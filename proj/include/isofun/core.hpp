#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace isofun {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct SingularMatrix : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct NotSPD : Error {
  using Error::Error;
};
struct NotSelfAdjoint : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};

/// Evaluation outside the function's domain (cone membership, psi domain).
struct DomainViolation : Error {
  using Error::Error;
};
struct NonDifferentiablePoint : DomainViolation {
  using DomainViolation::DomainViolation;
};
struct ZeroDenominator : DomainViolation {
  using DomainViolation::DomainViolation;
};

struct ParseError : Error {
  using Error::Error;
};

/// |a - b| normalized by max(1, |a|, |b|). Agrees with plain relative error
/// for O(1)-or-larger values and degrades to absolute error near zero.
inline double rel_gap(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Sub-seed for the index-th sample of a suite. Samples drawn from
/// derive_seed(seed, i) are independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

/// Seeded generator producing identical streams on every platform
/// (distributions are hand-rolled; std:: distribution objects are not
/// bit-portable across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace isofun
