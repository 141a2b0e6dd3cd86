#include "hkbounds/bounds.hpp"

#include <cmath>
#include <limits>

#include "hkbounds/errors.hpp"

namespace hkb {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::short_time: return "short";
    case Regime::mid_time: return "mid";
    case Regime::long_time: return "long";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  if (s == "short") return Regime::short_time;
  if (s == "mid") return Regime::mid_time;
  if (s == "long") return Regime::long_time;
  throw InvalidArgument("unknown regime '" + s + "'");
}

double gamma_from_eps(int N, int m, double eps) {
  if (N < 1 || m < 1 || 2 * m <= N) throw InvalidArgument("gamma_from_eps needs 2m > N >= 1");
  const double eps_max = 1.0 - static_cast<double>(N) / (2.0 * m);
  if (!(eps > 0.0) || eps > eps_max) {
    throw InvalidArgument("eps must lie in (0, 1 - N/2m] = (0, " + std::to_string(eps_max) + "]");
  }
  if (eps == eps_max) return 0.0;
  // Any value within a few ulps of m(1 - eps) - N/2 is as good as another; prefer
  // one for which (N + 2 gamma)/2m + eps == 1 holds in floating point.
  const double g = m * (1.0 - eps) - 0.5 * N;
  auto exact = [&](double c) { return (N + 2.0 * c) / (2.0 * m) + eps == 1.0; };
  double up = g, down = g;
  for (int i = 0; i <= 8; ++i) {
    if (exact(up)) return up;
    if (exact(down)) return down;
    up = std::nextafter(up, INFINITY);
    down = std::nextafter(down, -INFINITY);
  }
  return g;
}

BoundParams BoundParams::make(int N, int m, double eps, double mu, std::optional<double> theta) {
  BoundParams p;
  p.N = N;
  p.m = m;
  p.eps = eps;
  p.gamma = gamma_from_eps(N, m, eps);
  // Some eps (m = 3 has examples) admit no such gamma; move eps by an ulp instead.
  if (p.gamma > 0.0 && p.upper_exponent() + eps != 1.0) p.eps = 1.0 - p.upper_exponent();
  p.theta = theta.value_or(1.0 - p.eps);
  p.mu = mu;
  p.validate();
  return p;
}

void BoundParams::validate() const {
  if (N < 1 || m < 1 || 2 * m <= N) throw InvalidArgument("bound parameters need 2m > N >= 1");
  const double eps_max = 1.0 - static_cast<double>(N) / (2.0 * m);
  if (!(eps > 0.0) || eps > eps_max) throw InvalidArgument("eps out of range (0, 1 - N/2m]");
  if (!(gamma > 0.0)) {
    throw InvalidArgument("gamma must be positive (eps = 1 - N/2m gives the degenerate gamma = 0)");
  }
  // theta = N/2m is the short-time endpoint, where the mid template loses its d-power
  if (!(theta >= static_cast<double>(N) / (2.0 * m) && theta < 1.0)) {
    throw InvalidArgument("theta must lie in [N/2m, 1)");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("spectral gap mu must be positive");
  if (!(seam_factor > 0.0)) throw InvalidArgument("seam factor must be positive");
  for (const auto& c : {C_upper, C_short, C_mid, C_long}) {
    if (c && !(*c > 0.0 && std::isfinite(*c))) throw InvalidArgument("calibrated constants must be positive");
  }
}

double g_of_t(double mu, double t) {
  if (!(mu > 0.0) || !(t > 0.0)) throw InvalidArgument("g(t) needs mu > 0 and t > 0");
  double s = mu * t;
  // t = 1/mu evaluated in floating point may miss s = 1 by an ulp; snap so the
  // two branches meet exactly at the seam.
  if (std::abs(s - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) s = 1.0;
  if (s > 1.0) return mu * std::exp(-2.0 * s);
  return (mu / s) * std::exp(-s - 1.0);
}

UpperTemplate UpperTemplate::power(int N, int m, double theta, double mu, double seam_factor, double constant) {
  if (N < 1 || m < 1 || 2 * m <= N) throw InvalidArgument("upper template needs 2m > N >= 1");
  if (!(theta >= static_cast<double>(N) / (2.0 * m) && theta < 1.0)) {
    throw InvalidArgument("upper template exponent theta must lie in [N/2m, 1)");
  }
  if (!(mu > 0.0) || !(seam_factor > 0.0)) throw InvalidArgument("upper template needs mu > 0 and a positive seam");
  if (!(constant > 0.0) || !std::isfinite(constant)) throw InvalidArgument("upper template constant must be positive");
  UpperTemplate u;
  u.N_ = N;
  u.m_ = m;
  u.theta_ = theta;
  u.mu_ = mu;
  u.seam_ = seam_factor / mu;
  u.constant_ = constant;
  u.long_constant_ = constant;
  return u;
}

UpperTemplate UpperTemplate::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("upper template constant must be positive");
  UpperTemplate u;
  u.N_ = 0;
  u.m_ = 1;
  u.theta_ = 0.0;
  u.mu_ = 1.0;
  u.seam_ = std::numeric_limits<double>::infinity();
  u.constant_ = c;
  u.long_constant_ = c;
  return u;
}

UpperTemplate UpperTemplate::from_params(const BoundParams& p) {
  p.validate();
  return power(p.N, p.m, p.upper_exponent(), p.mu, p.seam_factor, p.C_upper.value_or(1.0));
}

UpperTemplate UpperTemplate::with_constant(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("upper template constant must be positive");
  return with_constants(c, c);
}

UpperTemplate UpperTemplate::with_constants(double short_c, double long_c) const {
  for (double c : {short_c, long_c}) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("upper template constant must be positive");
  }
  UpperTemplate u = *this;
  u.constant_ = short_c;
  u.long_constant_ = long_c;
  return u;
}

double UpperTemplate::time_factor(double t) const {
  if (!(t > 0.0)) throw InvalidArgument("upper template needs t > 0");
  const double pref = 1.0 / (1.0 - theta_);
  return t < seam_ ? pref * std::pow(t, -theta_) : pref * std::exp(-mu_ * t);
}

double UpperTemplate::value(double t, double d) const {
  if (!(d >= 0.0)) throw InvalidArgument("upper template needs d >= 0");
  const double dexp = distance_exponent();
  const double dfac = dexp == 0.0 ? 1.0 : std::pow(d, dexp);
  return (t < seam_ ? constant_ : long_constant_) * time_factor(t) * dfac;
}

double UpperTemplate::ratio(double tau, double t) const {
  if (!(tau > 0.0) || !(t > 0.0)) throw InvalidArgument("upper template ratio needs positive times");
  const bool tau_short = tau < seam_;
  const bool t_short = t < seam_;
  if (tau_short && t_short) return std::pow(tau / t, -theta_);
  if (!tau_short && !t_short) return std::exp(-mu_ * (tau - t));
  const double c = long_constant_ / constant_;
  if (tau_short) return std::pow(tau, -theta_) * std::exp(mu_ * t) / c;
  return c * std::exp(-mu_ * tau) * std::pow(t, theta_);
}

double upper_bound_U(const BoundParams& p, double t, double d) {
  if (!p.C_upper) throw Uncalibrated("upper bound constant C_upper is not calibrated");
  return UpperTemplate::from_params(p).value(t, d);
}

SeamBranches upper_branches(const BoundParams& p, double t, double d) {
  if (!p.C_upper) throw Uncalibrated("upper bound constant C_upper is not calibrated");
  const double th = p.upper_exponent();
  const double scale = *p.C_upper / p.eps * std::pow(d, 2.0 * p.gamma);
  return {scale * std::pow(t, -th), scale * std::exp(-p.mu * t)};
}

Regime classify_regime(const BoundParams& p, double t, double d) {
  if (t >= p.seam()) return Regime::long_time;
  if (t < std::pow(d, 2 * p.m)) return Regime::short_time;
  return Regime::mid_time;
}

double lower_template(const BoundParams& p, Regime regime, double t, double d) {
  if (!(t > 0.0)) throw InvalidArgument("lower template needs t > 0");
  const double two_m = 2.0 * p.m;
  switch (regime) {
    case Regime::short_time:
      return std::pow(t, -p.N / two_m);
    case Regime::mid_time: {
      if (!(d > 0.0)) throw InvalidArgument("mid-regime lower template needs d > 0");
      const double d2m = std::pow(d, two_m);
      const double dexp = two_m * p.theta - p.N;
      return std::pow(d, dexp) / t * std::exp(-t / d2m);
    }
    case Regime::long_time: {
      if (!(d > 0.0)) throw InvalidArgument("long-regime lower template needs d > 0");
      const double d2m = std::pow(d, two_m);
      return std::pow(d, two_m - p.N) * std::exp(-p.mu * t - std::pow(t / d2m, 1.0 / (1.0 - p.theta)));
    }
  }
  throw InvalidArgument("unknown regime");
}

double lower_bound(const BoundParams& p, Regime regime, double t, double d) {
  const Regime actual = classify_regime(p, t, d);
  if (actual != regime) {
    throw InvalidArgument(std::string("lower_bound: (t, d) lies in the ") + to_string(actual) +
                          " regime, not " + to_string(regime));
  }
  const std::optional<double>& c =
      regime == Regime::short_time ? p.C_short : regime == Regime::mid_time ? p.C_mid : p.C_long;
  if (!c) throw Uncalibrated(std::string("lower bound constant for the ") + to_string(regime) + " regime");
  return *c * lower_template(p, regime, t, d);
}

double calibrate_constant(std::span<const CalibrationSample> samples, const BoundTemplate& tmpl,
                          Direction direction) {
  if (samples.empty()) throw InvalidArgument("calibrate_constant needs at least one sample");
  double best = direction == Direction::upper ? 0.0 : std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (const auto& s : samples) {
    const double v = tmpl(s.t, s.d);
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("template is not finite and nonnegative at t=" + std::to_string(s.t) +
                            ", d=" + std::to_string(s.d));
    }
    if (v == 0.0) {
      if (direction == Direction::upper && s.k != 0.0) {
        throw InvalidArgument("template vanishes at t=" + std::to_string(s.t) + ", d=" + std::to_string(s.d) +
                              " where k=" + std::to_string(s.k) + "; no finite upper constant exists");
      }
      continue;
    }
    const double ratio = s.k / v;
    best = direction == Direction::upper ? std::max(best, ratio) : std::min(best, ratio);
    ++used;
  }
  if (used == 0) throw InvalidArgument("no sample constrains the constant (template vanishes everywhere)");
  if (!(best > 0.0) || !std::isfinite(best)) {
    throw InvalidArgument("calibrated constant is not positive and finite: " + std::to_string(best));
  }
  return best;
}

}  // namespace hkb
