#pragma once

#include <cstddef>

#include "hkbounds/bounds.hpp"
#include "hkbounds/discrete_operator.hpp"
#include "hkbounds/kernel.hpp"
#include "hkbounds/test_functions.hpp"

namespace hkb {

struct BootstrapConfig {
  double alpha = 0.5;
  /// Gauss-Legendre nodes for the s-integral, spread over graded panels.
  int quadrature = 256;
  /// Bisection stops once the bracket on log(delta) is this narrow, i.e. the
  /// relative error of delta* is at most delta_tol.
  double delta_tol = 1e-10;
  /// Maximize delta* over alpha in {0.1, ..., 0.9}; each alpha gives a valid bound.
  bool alpha_sweep = false;

  void validate() const;
};

/// p with p + (1 - p) alpha s = s, i.e. p = s (1 - alpha) / (1 - alpha s).
double p_of(double alpha, double s);

enum class BootstrapStatus { ok, vacuous, calibration_violated };

const char* to_string(BootstrapStatus status);

struct InterpolationCheck {
  double lhs = 0.0;  ///< k(ts, x, x)
  double rhs = 0.0;  ///< U(alpha ts)^{1-p} U(t)^p (k(t)/U(t))^p
  bool holds = false;
  BootstrapStatus status = BootstrapStatus::ok;
};

/// Evaluates both sides of the log-convexity interpolation with actual kernel
/// values. The status is calibration_violated when k(t,x,x) > U(t,x), which is
/// a failure of the template, not of the interpolation.
InterpolationCheck interpolation_check(const KernelEvaluator& ev, const UpperTemplate& upper, double t,
                                       std::size_t x, double alpha, double s);

/// int_0^1 U(alpha t s)/U(t) delta^{p(s)} ds + e^{-1} delta.
double green_heat_rhs(const UpperTemplate& upper, double t, double delta, const BootstrapConfig& cfg);

/// Same quantity parametrized by log(delta), usable far below the double range of delta.
double green_heat_rhs_log(const UpperTemplate& upper, double t, double log_delta, const BootstrapConfig& cfg);

struct DeltaStar {
  double delta = 0.0;
  double log_delta = 0.0;
  BootstrapStatus status = BootstrapStatus::ok;
};

/// Root of green_heat_rhs(delta) = green_ratio on (0, 1]. The returned log_delta
/// is the lower end of the final bracket, so delta* never overshoots the root.
/// status is vacuous when green_ratio exceeds RHS(1).
DeltaStar solve_delta_star(double green_ratio, const UpperTemplate& upper, double t, const BootstrapConfig& cfg);

enum class GreenSource { measured, certified };

const char* to_string(GreenSource source);

struct BootstrapResult {
  double green = 0.0;        ///< G_t(x,x) value fed into the inequality
  double green_ratio = 0.0;  ///< green / U(t, x)
  double upper = 0.0;        ///< U(t, x)
  double delta_star = 0.0;
  double log_delta_star = 0.0;
  double lower = 0.0;  ///< delta* U(t, x)
  double log_lower = 0.0;
  double alpha = 0.0;
  BootstrapStatus status = BootstrapStatus::ok;
};

/// Lower bound delta* U(t, d) from a given Green value.
BootstrapResult bootstrap_from_green(double green, const UpperTemplate& upper, double t, double d,
                                     const BootstrapConfig& cfg);

/// Full chain at grid node x. With GreenSource::certified the Green value comes
/// from the sampled bump (discrete pairing) and never touches kernel values;
/// with measured it is the direct resolvent solve.
BootstrapResult bootstrap_lower_bound(const DiscreteOperator& op, const UpperTemplate& upper, double t,
                                      std::size_t x, const BootstrapConfig& cfg, GreenSource source,
                                      const BumpProfile& profile);

struct GammaTermEstimate {
  double kappa = 0.0;
  /// [ln(1/kappa)]^{theta-1} Gamma(1 - theta/2), the closed form as printed.
  double integral_term = 0.0;
  /// e^{-1} kappa.
  double kappa_term = 0.0;
  /// Gamma(1 - theta) [ln(1/kappa)]^{theta-1}, the exact value of
  /// int_0^inf s^{-theta} kappa^s ds, for comparison with integral_term.
  double exact_integral = 0.0;
};

/// kappa = delta / exp(mu t (1 - theta/2)); requires kappa < 1.
GammaTermEstimate gamma_term_estimate(double theta, double t, double mu, double delta);

}  // namespace hkb
