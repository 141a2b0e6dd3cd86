#pragma once

#include <cstddef>
#include <vector>

#include "hkbounds/discrete_operator.hpp"
#include "hkbounds/domain.hpp"

namespace hkb {

/// The mollifier psi(u) = exp(1 - 1/(1 - u^2)) on (-1, 1), zero elsewhere.
///
/// psi(0) = 1 and 0 <= psi <= 1. Derivatives are exact: psi^{(k)} equals
/// P_k(u) (1-u^2)^{-2k} psi(u) with P_{k+1} = P_k' q^2 + 4k u q P_k - 2u P_k,
/// q = 1 - u^2, P_0 = 1. The constants int psi^2 and int |psi^{(k)}|^2 are
/// integrated once at construction.
class BumpProfile {
 public:
  explicit BumpProfile(int max_order = 4);

  int max_order() const noexcept { return static_cast<int>(energy_.size()) - 1; }
  double value(double u) const { return derivative(0, u); }
  double derivative(int k, double u) const;

  /// int_{-1}^{1} psi(u)^2 du.
  double sq_norm_const() const noexcept { return energy_.front(); }
  /// int_{-1}^{1} |psi^{(m)}(u)|^2 du.
  double energy_const(int m) const;

 private:
  std::vector<std::vector<double>> poly_;  // coefficients of P_k, ascending powers
  std::vector<double> energy_;
};

double bump(const BumpProfile& profile, double u);

/// g_{(x,r)}(y) = prod_axis psi((y_axis - x_axis) / r).
struct TestFunction {
  Point center{};
  double radius = 1.0;
};

struct TestNorms {
  double sq_norm = 0.0;
  double energy = 0.0;
};

/// Exact scalings of the profile constants: |g|^2 = S^N r^N and
/// Q(g) = N E_m S^{N-1} r^{N-2m} for the tensor-product bump, S = int psi^2,
/// E_m = int |psi^{(m)}|^2.
TestNorms testfn_norms(const BumpProfile& profile, double r, int m, int dim);

/// Lower bound |g(x)|^2 / (t Q(g) + |g|^2) for the bump of radius r centred at
/// a point at boundary distance d. `coeff_max` bounds a(x) from above.
/// Throws InvalidArgument when r > d (g leaves the form domain).
double green_from_testfn(double t, double d, double r, int m, int dim, const BumpProfile& profile,
                         double coeff_max = 1.0);

enum class GreenRegime { short_time, long_time };

const char* to_string(GreenRegime regime);

struct GreenLowerBound {
  double value = 0.0;
  double r_used = 0.0;
  GreenRegime regime = GreenRegime::short_time;
};

/// Radius rule r = min(t^{1/2m}, d): short regime when t <= d^{2m}.
GreenLowerBound green_lower_bound(double t, double d, int m, int dim, const BumpProfile& profile,
                                  double coeff_max = 1.0);

/// Nodal samples of g_{(x,r)}.
Vector sample_test_function(const Grid& grid, const TestFunction& tf, const BumpProfile& profile);

/// Discrete pairing: the sampled bump's own discrete Q and mass values, which
/// makes the inequality against the discrete G_t(x,x) exact.
double discrete_green_from_testfn(const DiscreteOperator& op, double t, std::size_t x, double r,
                                  const BumpProfile& profile);

/// Discrete pairing with the same radius rule as green_lower_bound.
GreenLowerBound discrete_green_lower_bound(const DiscreteOperator& op, double t, std::size_t x,
                                           const BumpProfile& profile);

/// Discrete pairing maximised over the radius. Every r <= d(x) certifies, so
/// this searches log r around the continuum optimum r^{2m} = t E_m (2m - N) / S
/// (capped at d) and never returns less than discrete_green_lower_bound.
GreenLowerBound discrete_green_best_bound(const DiscreteOperator& op, double t, std::size_t x,
                                          const BumpProfile& profile);

}  // namespace hkb
