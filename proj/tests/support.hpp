#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <tuple>

#include "hkbounds/discrete_operator.hpp"
#include "hkbounds/domain.hpp"
#include "hkbounds/kernel.hpp"
#include "hkbounds/spectral.hpp"

namespace hkb::testing {

inline constexpr double pi = std::numbers::pi;

inline DiscreteOperator interval_operator(int m, int n, double a = 0.0, double b = 1.0,
                                          Coefficient coeff = Coefficient::constant(1.0)) {
  return build_operator({m, 1, std::move(coeff)}, Grid(Domain::interval(a, b), n));
}

inline DiscreteOperator box_operator(int m, int n) {
  return build_operator({m, 2, Coefficient::constant(1.0)}, Grid(Domain::box(0.0, 1.0, 0.0, 1.0), n));
}

/// Full (or partial) decompositions are expensive; keep one per configuration.
inline std::shared_ptr<const SpectralDecomposition> cached_decomposition(int m, int n, double b = 1.0,
                                                                         std::size_t count = 0) {
  static std::map<std::tuple<int, int, double, std::size_t>, std::shared_ptr<const SpectralDecomposition>> cache;
  auto key = std::make_tuple(m, n, b, count);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const auto op = interval_operator(m, n, 0.0, b);
  auto sd = std::make_shared<const SpectralDecomposition>(
      count == 0 ? eigendecompose(op) : eigendecompose(op, count));
  cache.emplace(key, sd);
  return sd;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist;
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
  return v;
}

namespace oracle {

/// Dirichlet heat kernel of -d^2/dx^2 on (0, L): sum 2/L sin(n pi x/L) sin(n pi y/L) exp(-(n pi/L)^2 t).
inline double laplace_kernel(double t, double x, double y, double L = 1.0) {
  double sum = 0.0;
  for (int n = 1; n < 100000; ++n) {
    const double k = n * pi / L;
    const double w = std::exp(-k * k * t);
    sum += 2.0 / L * std::sin(k * x) * std::sin(k * y) * w;
    if (w < 1e-30) break;
  }
  return sum;
}

/// G(x, x) for -t u'' + u = delta_x on (0, 1) with u(0) = u(1) = 0.
inline double laplace_green(double t, double x) {
  const double a = 1.0 / std::sqrt(t);
  return std::sinh(a * x) * std::sinh(a * (1.0 - x)) / (t * a * std::sinh(a));
}

/// k-th positive root of cos(k) cosh(k) = 1 by bisection (k-th root lies near (k + 1/2) pi).
inline double clamped_beam_root(int k) {
  auto f = [](double z) { return std::cos(z) * std::cosh(z) - 1.0; };
  const double centre = (k + 0.5) * pi;
  auto tol = [](double lo, double hi) { return hi - lo < 1e-14; };
  const auto bracket = boost::math::tools::bisect(f, centre - 0.5, centre + 0.5, tol);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace oracle

}  // namespace hkb::testing
