#include "hkbounds/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hkbounds/errors.hpp"
#include "hkbounds/quadrature.hpp"

namespace hkb {

void BootstrapConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("bootstrap alpha must lie in (0,1)");
  if (quadrature < 64) throw InvalidArgument("bootstrap quadrature needs at least 64 nodes");
  if (!(delta_tol > 0.0 && delta_tol <= 1e-10)) throw InvalidArgument("bootstrap delta_tol must lie in (0, 1e-10]");
}

double p_of(double alpha, double s) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(s > 0.0 && s < 1.0)) {
    throw InvalidArgument("p_of needs alpha and s in (0,1)");
  }
  return s * (1.0 - alpha) / (1.0 - alpha * s);
}

const char* to_string(BootstrapStatus status) {
  switch (status) {
    case BootstrapStatus::ok: return "ok";
    case BootstrapStatus::vacuous: return "vacuous";
    case BootstrapStatus::calibration_violated: return "calibration_violated";
  }
  return "?";
}

const char* to_string(GreenSource source) { return source == GreenSource::measured ? "measured" : "certified"; }

InterpolationCheck interpolation_check(const KernelEvaluator& ev, const UpperTemplate& upper, double t,
                                       std::size_t x, double alpha, double s) {
  const double p = p_of(alpha, s);
  const double d = ev.decomposition().grid.node_boundary_distance(x);
  const double k_t = ev.diagonal(t, x);
  const double u_t = upper.value(t, d);
  const double delta = k_t / u_t;
  InterpolationCheck out;
  out.lhs = ev.diagonal(t * s, x);
  out.rhs = std::pow(upper.value(alpha * t * s, d), 1.0 - p) * std::pow(u_t, p) * std::pow(delta, p);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  out.status = delta > 1.0 ? BootstrapStatus::calibration_violated : BootstrapStatus::ok;
  return out;
}

namespace {

double p_unchecked(double alpha, double s) { return s * (1.0 - alpha) / (1.0 - alpha * s); }

const GaussLegendre& rule(int nodes) {
  thread_local int cached_nodes = 0;
  thread_local GaussLegendre cached(1);
  if (cached_nodes != nodes) {
    cached = GaussLegendre(nodes);
    cached_nodes = nodes;
  }
  return cached;
}

}  // namespace

double green_heat_rhs_log(const UpperTemplate& upper, double t, double log_delta, const BootstrapConfig& cfg) {
  cfg.validate();
  if (!(t > 0.0)) throw InvalidArgument("green_heat_rhs needs t > 0");
  if (!(log_delta <= 0.0)) throw InvalidArgument("green_heat_rhs needs delta in (0, 1]");
  const double alpha = cfg.alpha;
  const double theta = upper.theta();
  const double L = log_delta;
  const int per_panel = std::max(8, cfg.quadrature / 8);
  const auto& gl = rule(per_panel);

  // alpha t s crosses the template seam at s_seam
  const double s_seam = upper.seam() / (alpha * t);
  const double s_short = std::min(1.0, s_seam);

  double integral = 0.0;
  if (s_short > 0.0) {
    // s = S w^{1/(1-theta)} absorbs the s^{-theta} singularity of the short branch.
    const double S = s_short;
    const double power = 1.0 / (1.0 - theta);
    auto integrand = [&](double w) {
      if (w <= 0.0) return 0.0;
      const double s = S * std::pow(w, power);
      const double smooth = upper.ratio(alpha * t * s, t) * std::pow(s, theta);
      return smooth * std::exp(L * p_unchecked(alpha, s));
    };
    // p(s) >= (1 - alpha) s, so delta^{p(s)} decays on the scale s ~ 1/((1-alpha)|L|);
    // grade panels geometrically down to that scale.
    const double s_scale = L < 0.0 ? 1.0 / ((1.0 - alpha) * -L) : 1.0;
    const double w_scale = std::pow(std::min(1.0, s_scale / S), 1.0 - theta);
    int levels = 3;
    while (std::ldexp(1.0, -levels) > 0.25 * w_scale && levels < 1000) ++levels;
    double hi = 1.0;
    for (int k = 1; k <= levels; ++k) {
      const double lo = std::ldexp(1.0, -k);
      integral += gl.integrate(integrand, lo, hi);
      hi = lo;
    }
    integral += gl.integrate(integrand, 0.0, hi);
    integral *= std::pow(S, 1.0 - theta) / (1.0 - theta);
  }
  if (s_seam < 1.0) {
    auto integrand = [&](double s) { return upper.ratio(alpha * t * s, t) * std::exp(L * p_unchecked(alpha, s)); };
    const int panels = 4;
    const double width = (1.0 - s_seam) / panels;
    for (int k = 0; k < panels; ++k) {
      integral += gl.integrate(integrand, s_seam + k * width, s_seam + (k + 1) * width);
    }
  }
  return integral + std::exp(L - 1.0);
}

double green_heat_rhs(const UpperTemplate& upper, double t, double delta, const BootstrapConfig& cfg) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("green_heat_rhs needs delta in (0, 1]");
  return green_heat_rhs_log(upper, t, std::log(delta), cfg);
}

DeltaStar solve_delta_star(double green_ratio, const UpperTemplate& upper, double t, const BootstrapConfig& cfg) {
  cfg.validate();
  if (!(green_ratio > 0.0) || !std::isfinite(green_ratio)) {
    throw InvalidArgument("solve_delta_star needs a positive finite Green ratio");
  }
  auto rhs = [&](double L) { return green_heat_rhs_log(upper, t, L, cfg); };
  const double top = rhs(0.0);
  if (green_ratio > top) {
    return {0.0, -std::numeric_limits<double>::infinity(), BootstrapStatus::vacuous};
  }
  if (green_ratio == top) return {1.0, 0.0, BootstrapStatus::ok};

  double lo = -1.0;
  while (rhs(lo) >= green_ratio) {
    lo *= 4.0;
    if (lo < -1e300) break;
  }
  double hi = 0.0;

  // strict monotonicity in delta is what makes the bracket meaningful
  double prev = rhs(lo);
  for (int k = 1; k <= 8; ++k) {
    const double cur = rhs(lo + (hi - lo) * k / 8.0);
    if (!(cur > prev)) {
      throw std::logic_error("green_heat_rhs is not strictly increasing in delta on the bracket");
    }
    prev = cur;
  }

  while (hi - lo > cfg.delta_tol && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lo)) {
    const double mid = 0.5 * (lo + hi);
    if (rhs(mid) < green_ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {std::exp(lo), lo, BootstrapStatus::ok};
}

BootstrapResult bootstrap_from_green(double green, const UpperTemplate& upper, double t, double d,
                                     const BootstrapConfig& cfg) {
  BootstrapResult out;
  out.green = green;
  out.upper = upper.value(t, d);
  out.green_ratio = green / out.upper;
  std::vector<double> alphas{cfg.alpha};
  if (cfg.alpha_sweep) alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  out.log_delta_star = -std::numeric_limits<double>::infinity();
  out.status = BootstrapStatus::vacuous;
  for (double a : alphas) {
    BootstrapConfig c = cfg;
    c.alpha = a;
    const auto ds = solve_delta_star(out.green_ratio, upper, t, c);
    if (ds.status == BootstrapStatus::ok && ds.log_delta > out.log_delta_star) {
      out.log_delta_star = ds.log_delta;
      out.delta_star = ds.delta;
      out.alpha = a;
      out.status = BootstrapStatus::ok;
    }
  }
  if (out.status == BootstrapStatus::ok) {
    out.log_lower = out.log_delta_star + std::log(out.upper);
    out.lower = out.delta_star * out.upper;
  } else {
    out.alpha = cfg.alpha;
    out.delta_star = 0.0;
    out.lower = 0.0;
    out.log_lower = -std::numeric_limits<double>::infinity();
  }
  return out;
}

BootstrapResult bootstrap_lower_bound(const DiscreteOperator& op, const UpperTemplate& upper, double t,
                                      std::size_t x, const BootstrapConfig& cfg, GreenSource source,
                                      const BumpProfile& profile) {
  const double d = op.grid().node_boundary_distance(x);
  const double green = source == GreenSource::certified ? discrete_green_best_bound(op, t, x, profile).value
                                                        : ResolventSolver(op, t).diagonal(x);
  return bootstrap_from_green(green, upper, t, d, cfg);
}

GammaTermEstimate gamma_term_estimate(double theta, double t, double mu, double delta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("gamma_term_estimate needs theta in (0,1)");
  if (!(delta > 0.0)) throw InvalidArgument("gamma_term_estimate needs delta > 0");
  GammaTermEstimate out;
  out.kappa = delta * std::exp(-mu * t * (1.0 - 0.5 * theta));
  if (!(out.kappa < 1.0)) throw InvalidArgument("gamma_term_estimate needs kappa < 1");
  const double log_inv = -std::log(out.kappa);
  out.integral_term = std::pow(log_inv, theta - 1.0) * std::tgamma(1.0 - 0.5 * theta);
  out.kappa_term = out.kappa / std::numbers::e;
  out.exact_integral = std::tgamma(1.0 - theta) * std::pow(log_inv, theta - 1.0);
  return out;
}

}  // namespace hkb
