#include "hkbounds/test_functions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "hkbounds/errors.hpp"

namespace hkb {

namespace {

using Poly = std::vector<double>;

Poly derivative_poly(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly add(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

double evaluate(const Poly& p, double u) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * u + *it;
  return v;
}

}  // namespace

BumpProfile::BumpProfile(int max_order) {
  if (max_order < 0) throw InvalidArgument("bump profile max order must be nonnegative");
  const Poly q{1.0, 0.0, -1.0};
  const Poly q2 = multiply(q, q);
  poly_.push_back({1.0});
  for (int k = 0; k < max_order; ++k) {
    const Poly& pk = poly_.back();
    Poly next = multiply(derivative_poly(pk), q2);
    next = add(next, multiply(Poly{0.0, 4.0 * k}, multiply(q, pk)));
    next = add(next, multiply(Poly{0.0, -2.0}, pk));
    poly_.push_back(std::move(next));
  }
  for (int k = 0; k <= max_order; ++k) {
    auto f = [this, k](double u) {
      const double v = derivative(k, u);
      return v * v;
    };
    energy_.push_back(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -1.0, 1.0, 20, 1e-13));
  }
}

double BumpProfile::derivative(int k, double u) const {
  if (k < 0 || k >= static_cast<int>(poly_.size())) throw InvalidArgument("bump derivative order out of range");
  if (!(std::abs(u) < 1.0)) return 0.0;
  const double q = 1.0 - u * u;
  // exponent assembled in log space: q^{-2k} blows up exactly where psi vanishes
  return evaluate(poly_[static_cast<std::size_t>(k)], u) * std::exp(1.0 - 1.0 / q - 2.0 * k * std::log(q));
}

double BumpProfile::energy_const(int m) const {
  if (m < 0 || m > max_order()) {
    throw InvalidArgument("derivative order " + std::to_string(m) + " exceeds the profile's configured max " +
                          std::to_string(max_order()));
  }
  return energy_[static_cast<std::size_t>(m)];
}

double bump(const BumpProfile& profile, double u) { return profile.value(u); }

TestNorms testfn_norms(const BumpProfile& profile, double r, int m, int dim) {
  if (!(r > 0.0)) throw InvalidArgument("test function radius must be positive");
  if (dim != 1 && dim != 2) throw InvalidArgument("test functions support N = 1 or 2");
  const double s = profile.sq_norm_const();
  const double e = profile.energy_const(m);
  return {std::pow(s, dim) * std::pow(r, dim), dim * e * std::pow(s, dim - 1) * std::pow(r, dim - 2 * m)};
}

double green_from_testfn(double t, double d, double r, int m, int dim, const BumpProfile& profile,
                         double coeff_max) {
  if (!(t >= 0.0)) throw InvalidArgument("green_from_testfn needs t >= 0");
  if (!(r > 0.0)) throw InvalidArgument("test function radius must be positive");
  if (r > d) {
    throw InvalidArgument("test function radius " + std::to_string(r) + " exceeds boundary distance " +
                          std::to_string(d) + "; g leaves the form domain");
  }
  const auto norms = testfn_norms(profile, r, m, dim);
  return 1.0 / (t * coeff_max * norms.energy + norms.sq_norm);
}

const char* to_string(GreenRegime regime) {
  return regime == GreenRegime::short_time ? "short" : "long";
}

namespace {

GreenLowerBound radius_rule(double t, double d, int m) {
  if (!(t > 0.0)) throw InvalidArgument("green_lower_bound needs t > 0");
  if (!(d > 0.0)) throw InvalidArgument("green_lower_bound needs an interior point");
  const double r_short = std::pow(t, 1.0 / (2.0 * m));
  if (t <= std::pow(d, 2 * m)) return {0.0, std::min(r_short, d), GreenRegime::short_time};
  return {0.0, d, GreenRegime::long_time};
}

}  // namespace

GreenLowerBound green_lower_bound(double t, double d, int m, int dim, const BumpProfile& profile,
                                  double coeff_max) {
  auto out = radius_rule(t, d, m);
  out.value = green_from_testfn(t, d, out.r_used, m, dim, profile, coeff_max);
  return out;
}

Vector sample_test_function(const Grid& grid, const TestFunction& tf, const BumpProfile& profile) {
  return sample(grid, [&](const Point& y) {
    double v = profile.value((y[0] - tf.center[0]) / tf.radius);
    if (grid.dim() == 2 && v != 0.0) v *= profile.value((y[1] - tf.center[1]) / tf.radius);
    return v;
  });
}

double discrete_green_from_testfn(const DiscreteOperator& op, double t, std::size_t x, double r,
                                  const BumpProfile& profile) {
  if (!(t >= 0.0)) throw InvalidArgument("discrete_green_from_testfn needs t >= 0");
  const double d = op.grid().node_boundary_distance(x);
  if (!(r > 0.0) || r > d) {
    throw InvalidArgument("test function radius " + std::to_string(r) + " not in (0, d(x)] with d(x) = " +
                          std::to_string(d));
  }
  const Vector g = sample_test_function(op.grid(), {op.grid().node(x), r}, profile);
  const double gx = g(static_cast<Eigen::Index>(x));
  return gx * gx / (t * quadratic_form(op, g) + op.mass_form(g, g));
}

GreenLowerBound discrete_green_lower_bound(const DiscreteOperator& op, double t, std::size_t x,
                                           const BumpProfile& profile) {
  auto out = radius_rule(t, op.grid().node_boundary_distance(x), op.spec().m);
  out.value = discrete_green_from_testfn(op, t, x, out.r_used, profile);
  return out;
}

GreenLowerBound discrete_green_best_bound(const DiscreteOperator& op, double t, std::size_t x,
                                          const BumpProfile& profile) {
  auto best = discrete_green_lower_bound(op, t, x, profile);
  const int m = op.spec().m;
  const int dim = op.grid().dim();
  const double d = op.grid().node_boundary_distance(x);
  const double r_opt = std::pow(t * profile.energy_const(m) * (2 * m - dim) / profile.sq_norm_const(), 0.5 / m);
  const double hi = std::log(std::min(d, 2.0 * r_opt));
  const double lo = std::log(std::min(d, 0.5 * r_opt));
  auto radius = [&](double log_r) { return std::min(d, std::exp(log_r)); };
  auto value = [&](double log_r) { return discrete_green_from_testfn(op, t, x, radius(log_r), profile); };
  auto consider = [&](double log_r, double v) {
    if (v > best.value) {
      best.value = v;
      best.r_used = radius(log_r);
    }
  };
  if (hi - lo < 1e-6) {
    consider(hi, value(hi));
    return best;
  }
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - golden * (b - a), e = a + golden * (b - a);
  double fc = value(c), fe = value(e);
  for (int i = 0; i < 40 && b - a > 1e-4; ++i) {
    if (fc >= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - golden * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + golden * (b - a);
      fe = value(e);
    }
  }
  consider(c, fc);
  consider(e, fe);
  consider(hi, value(hi));
  return best;
}

}  // namespace hkb
