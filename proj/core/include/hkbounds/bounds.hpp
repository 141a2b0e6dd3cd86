#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

namespace hkb {

/// The three (t, d) zones: t <= d^{2m}, d^{2m} < t < seam, t >= seam.
enum class Regime { short_time, mid_time, long_time };

const char* to_string(Regime regime);
Regime regime_from_string(const std::string& s);

/// Exponents, spectral gap and calibrated constants of every bound template.
///
/// gamma and theta satisfy (N + 2 gamma) / 2m = theta = 1 - eps unless theta
/// is overridden. The seam between the short-time and long-time behaviour
/// sits at t = seam_factor / mu (2 by default; 1 is the alternative reading).
struct BoundParams {
  int N = 1;
  int m = 1;
  double eps = 0.25;
  double gamma = 0.25;
  double theta = 0.75;
  double mu = 1.0;
  double seam_factor = 2.0;
  std::optional<double> C_upper;
  std::optional<double> C_short;
  std::optional<double> C_mid;
  std::optional<double> C_long;

  /// (N + 2 gamma)/2m + eps == 1 holds bit for bit afterwards. gamma is picked
  /// among the doubles nearest m(1 - eps) - N/2; when none works eps itself moves
  /// by at most one ulp of 1.
  static BoundParams make(int N, int m, double eps, double mu, std::optional<double> theta = std::nullopt);

  /// Throws InvalidArgument on any violated invariant.
  void validate() const;
  double seam() const noexcept { return seam_factor / mu; }
  /// (N + 2 gamma) / 2m, the time exponent of the upper template.
  double upper_exponent() const noexcept { return (N + 2.0 * gamma) / (2.0 * m); }
};

/// g(t) = mu exp(-2 mu t) for t > 1/mu and t^{-1} exp(-mu t - 1) for t <= 1/mu.
double g_of_t(double mu, double t);

/// gamma = m (1 - eps) - N/2, so (N + 2 gamma)/(2m) = 1 - eps (exactly in floating
/// point whenever a nearby double allows it). Returns 0 at the
/// endpoint eps = 1 - N/2m, which BoundParams then rejects as degenerate.
double gamma_from_eps(int N, int m, double eps);

/// Two-branch upper template
///   U(t, d) = C / (1 - theta) * t^{-theta} d^{2m theta - N}     for t < seam,
///   U(t, d) = C / (1 - theta) * exp(-mu t) d^{2m theta - N}     for t >= seam.
/// With theta = (N + 2 gamma)/2m this is the two-regime upper bound with
/// prefactor (1 - (N + 2 gamma)/2m)^{-1} = 1/eps. The long branch may carry
/// its own constant; by default both branches share C.
class UpperTemplate {
 public:
  static UpperTemplate from_params(const BoundParams& p);
  static UpperTemplate power(int N, int m, double theta, double mu, double seam_factor, double constant = 1.0);
  /// U(t, d) = c for every t and d (no seam).
  static UpperTemplate constant(double c);

  double value(double t, double d) const;
  /// U(tau, d) / U(t, d); independent of d and of the constant.
  double ratio(double tau, double t) const;
  double time_factor(double t) const;

  double theta() const noexcept { return theta_; }
  double distance_exponent() const noexcept { return 2.0 * m_ * theta_ - N_; }
  double seam() const noexcept { return seam_; }
  double mu() const noexcept { return mu_; }
  double constant() const noexcept { return constant_; }
  double long_constant() const noexcept { return long_constant_; }
  UpperTemplate with_constant(double c) const;
  UpperTemplate with_constants(double short_c, double long_c) const;

 private:
  int N_ = 1;
  int m_ = 1;
  double theta_ = 0.5;
  double mu_ = 1.0;
  double seam_ = 2.0;
  double constant_ = 1.0;
  double long_constant_ = 1.0;
};

/// Calibrated two-regime upper bound; throws Uncalibrated without C_upper.
double upper_bound_U(const BoundParams& p, double t, double d);

/// Both branches of the upper template evaluated at the same t (for seam jump reports).
struct SeamBranches {
  double short_branch = 0.0;
  double long_branch = 0.0;
};
SeamBranches upper_branches(const BoundParams& p, double t, double d);

/// Ties go to the later regime: t = d^{2m} is mid, t = seam is long.
Regime classify_regime(const BoundParams& p, double t, double d);

/// Lower templates with unit constant:
///   short: t^{-N/2m}
///   mid:   d^{2m theta - N} t^{-1} exp(-t / d^{2m})
///   long:  d^{2m - N} exp(-mu t) exp(-(t / d^{2m})^{1/(1-theta)})
double lower_template(const BoundParams& p, Regime regime, double t, double d);

/// Calibrated lower bound for the regime. Throws InvalidArgument when the
/// regime disagrees with classify_regime or d = 0 in mid/long, Uncalibrated
/// when the regime constant is missing.
double lower_bound(const BoundParams& p, Regime regime, double t, double d);

struct CalibrationSample {
  double t = 0.0;
  double d = 0.0;
  double k = 0.0;
};

enum class Direction { upper, lower };

using BoundTemplate = std::function<double(double t, double d)>;

/// upper: smallest C with C * template >= k on every sample;
/// lower: largest C with C * template <= k. Lower-direction samples where the
/// template underflows to zero impose no constraint and are skipped.
double calibrate_constant(std::span<const CalibrationSample> samples, const BoundTemplate& tmpl, Direction direction);

}  // namespace hkb
