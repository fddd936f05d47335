#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a component is assembled or parameterized inconsistently
/// (bad penalty kind, missing gradient, malformed configuration file, ...).
/// Distinct from std::invalid_argument, which signals a bad value passed to
/// an otherwise well-configured operation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative routine diverges, exceeds its iteration cap, or
/// produces non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point x counts as feasible for constraint value c(x) when
/// c(x) <= 1e-9 * (1 + |c_ref|), with c_ref the constraint value at the
/// run's starting point.
inline double feasibility_tolerance(double c_ref) {
  return 1e-9 * (1.0 + std::abs(c_ref));
}

/// Deterministic random source. All real-valued draws are derived from
/// mt19937_64 through fixed arithmetic, so a seed pins the exact stream
/// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw from [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Standard normal via Box-Muller on two unit draws.
  double normal() {
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Uniform integer in [0, n). Rejection keeps the draw unbiased.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  /// k distinct values from {0, ..., n-1} via partial Fisher-Yates.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(index(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

  Vector uniform_vector(Eigen::Index n, double lo, double hi) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lopt
