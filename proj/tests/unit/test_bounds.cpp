#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hkbounds/bounds.hpp"
#include "hkbounds/errors.hpp"
#include "hkbounds/kernel.hpp"
#include "support.hpp"

namespace {

using namespace hkb;
using hkb::testing::pi;

TEST(GOfT, Branches) {
  EXPECT_NEAR(g_of_t(1.0, 2.0), std::exp(-4.0), 1e-17);
  EXPECT_NEAR(g_of_t(1.0, 2.0), 0.018316, 1e-6);
  EXPECT_NEAR(g_of_t(2.0, 0.1), 10.0 * std::exp(-1.2), 1e-14);
  EXPECT_NEAR(g_of_t(2.0, 0.1), 3.0119, 1e-4);
}

TEST(GOfT, ContinuousAtInverseGap) {
  for (double mu : {0.5, 1.0, 2.0, 3.0, 9.869604401089358, 500.0}) {
    const double t = 1.0 / mu;
    EXPECT_EQ(g_of_t(mu, t), mu * std::exp(-2.0)) << "mu=" << mu;
    const double below = g_of_t(mu, t * (1.0 - 1e-12));
    const double above = g_of_t(mu, t * (1.0 + 1e-12));
    EXPECT_NEAR(below, above, 1e-10 * above);
  }
}

TEST(GOfT, Errors) {
  EXPECT_THROW(g_of_t(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(g_of_t(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(g_of_t(-1.0, 1.0), InvalidArgument);
}

TEST(GammaFromEps, Examples) {
  EXPECT_DOUBLE_EQ(gamma_from_eps(1, 1, 0.25), 0.25);
  EXPECT_DOUBLE_EQ((1 + 2 * gamma_from_eps(1, 1, 0.25)) / 2.0, 0.75);
  EXPECT_DOUBLE_EQ(gamma_from_eps(1, 2, 0.5), 0.5);
  EXPECT_EQ(gamma_from_eps(1, 1, 0.5), 0.0);
  EXPECT_EQ(gamma_from_eps(2, 2, 0.5), 0.0);
  EXPECT_THROW(BoundParams::make(1, 1, 0.5, 1.0), InvalidArgument);
  EXPECT_THROW(gamma_from_eps(1, 1, 0.0), InvalidArgument);
  EXPECT_THROW(gamma_from_eps(1, 1, 0.6), InvalidArgument);
  EXPECT_THROW(gamma_from_eps(2, 1, 0.1), InvalidArgument);
}

TEST(GammaFromEps, ExponentConsistency) {
  for (int N : {1, 2}) {
    for (int m : {1, 2, 3}) {
      if (2 * m <= N) continue;
      const double eps_max = 1.0 - N / (2.0 * m);
      for (int i = 1; i < 64; ++i) {
        const double eps = eps_max * i / 64.0;
        const auto p = BoundParams::make(N, m, eps, 1.0);
        EXPECT_EQ(p.upper_exponent() + p.eps, 1.0) << "N=" << N << " m=" << m << " eps=" << eps;
        EXPECT_LE(std::abs(p.eps - eps), std::numeric_limits<double>::epsilon());
      }
    }
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const int m = 1 + static_cast<int>(rng() % 5);
    const double eps = (1.0 - 1.0 / (2.0 * m)) * unit(rng);
    if (eps == 0.0) continue;
    const auto p = BoundParams::make(1, m, eps, 1.0);
    EXPECT_EQ((1 + 2.0 * p.gamma) / (2.0 * m) + p.eps, 1.0) << "m=" << m << " eps=" << eps;
  }
}

BoundParams laplace_params() {
  auto p = BoundParams::make(1, 1, 0.25, pi * pi);
  p.C_upper = 1.0;
  return p;
}

TEST(UpperBound, BoundaryDecay) {
  EXPECT_EQ(upper_bound_U(laplace_params(), 0.01, 0.0), 0.0);
  EXPECT_EQ(upper_bound_U(laplace_params(), 1.0, 0.0), 0.0);
}

TEST(UpperBound, ShortBranchExponents) {
  const auto p = laplace_params();
  ASSERT_LT(0.01, p.seam());
  const double base = upper_bound_U(p, 0.01, 0.2);
  EXPECT_NEAR(base, 4.0 * std::pow(0.01, -0.75) * std::pow(0.2, 0.5), 1e-12 * base);
  EXPECT_NEAR(upper_bound_U(p, 0.02, 0.2) / base, std::pow(2.0, -0.75), 1e-14);
  EXPECT_NEAR(upper_bound_U(p, 0.01, 0.4) / base, std::pow(2.0, 0.5), 1e-14);
}

TEST(UpperBound, LongBranchAndSeamJump) {
  const auto p = laplace_params();
  const double seam = p.seam();
  EXPECT_DOUBLE_EQ(seam, 2.0 / (pi * pi));
  const double d = 0.3;
  const auto branches = upper_branches(p, seam, d);
  EXPECT_NEAR(branches.short_branch, 4.0 * std::pow(seam, -0.75) * std::pow(d, 0.5), 1e-12);
  EXPECT_NEAR(branches.long_branch, 4.0 * std::exp(-2.0) * std::pow(d, 0.5), 1e-12);
  EXPECT_EQ(upper_bound_U(p, seam, d), branches.long_branch);
  EXPECT_EQ(upper_bound_U(p, std::nextafter(seam, 0.0), d), upper_branches(p, std::nextafter(seam, 0.0), d).short_branch);
  EXPECT_GT(branches.short_branch / branches.long_branch, 1.0);
}

TEST(UpperBound, Uncalibrated) {
  auto p = BoundParams::make(1, 1, 0.25, 1.0);
  EXPECT_THROW(upper_bound_U(p, 0.1, 0.2), Uncalibrated);
}

TEST(UpperTemplate, ConstantsPerBranch) {
  const auto u = UpperTemplate::power(1, 2, 0.25, 500.0, 2.0).with_constants(2.0, 8.0);
  const double seam = u.seam();
  EXPECT_NEAR(u.value(0.5 * seam, 0.1), 2.0 / 0.75 * std::pow(0.5 * seam, -0.25), 1e-12);
  EXPECT_NEAR(u.value(2.0 * seam, 0.1), 8.0 / 0.75 * std::exp(-500.0 * 2.0 * seam), 1e-15);
  for (double tau : {0.1 * seam, 0.9 * seam, 1.5 * seam}) {
    for (double t : {0.2 * seam, 3.0 * seam}) {
      EXPECT_NEAR(u.ratio(tau, t), u.value(tau, 0.1) / u.value(t, 0.1), 1e-12 * u.ratio(tau, t));
    }
  }
  EXPECT_EQ(u.distance_exponent(), 0.0);
  const auto flat = UpperTemplate::constant(3.0);
  EXPECT_EQ(flat.value(1e-5, 0.1), 3.0);
  EXPECT_EQ(flat.value(1e5, 0.7), 3.0);
  EXPECT_EQ(flat.ratio(1e-3, 2.0), 1.0);
  EXPECT_THROW(UpperTemplate::power(1, 1, 0.4, 1.0, 2.0), InvalidArgument);
}

TEST(ClassifyRegime, Examples) {
  auto p = BoundParams::make(1, 1, 0.25, 1.0);
  EXPECT_EQ(classify_regime(p, 3.0, 0.1), Regime::long_time);
  EXPECT_EQ(classify_regime(p, 3.0, 100.0), Regime::long_time);
  p.mu = 10.0;
  EXPECT_EQ(classify_regime(p, 0.01, 0.5), Regime::short_time);
  EXPECT_EQ(classify_regime(p, 0.1, 0.2), Regime::mid_time);
  // ties go to the later regime; 0.2^2 is not 0.04 in binary, so tie on exact values
  EXPECT_EQ(classify_regime(p, 0.0625, 0.25), Regime::mid_time);
  EXPECT_EQ(classify_regime(p, std::nextafter(0.0625, 0.0), 0.25), Regime::short_time);
  EXPECT_EQ(classify_regime(p, 0.2, 0.9), Regime::long_time);
  p.mu = 8.0;
  EXPECT_EQ(classify_regime(p, 0.25, 0.9), Regime::long_time);
  EXPECT_EQ(classify_regime(p, std::nextafter(0.25, 0.0), 0.9), Regime::short_time);
  p.mu = 10.0;
  p.seam_factor = 1.0;
  EXPECT_EQ(classify_regime(p, 0.1, 0.9), Regime::long_time);
}

TEST(CalibrateConstant, Examples) {
  const BoundTemplate tmpl = [](double t, double d) { return d / t; };
  std::vector<CalibrationSample> exact;
  for (double t : {0.1, 0.2, 0.5}) exact.push_back({t, 0.3, 0.3 / t});
  EXPECT_DOUBLE_EQ(calibrate_constant(exact, tmpl, Direction::upper), 1.0);
  EXPECT_DOUBLE_EQ(calibrate_constant(exact, tmpl, Direction::lower), 1.0);

  const std::vector<CalibrationSample> one = {{1.0, 4.0, 2.0}};
  EXPECT_DOUBLE_EQ(calibrate_constant(one, tmpl, Direction::lower), 0.5);
  EXPECT_DOUBLE_EQ(calibrate_constant(one, tmpl, Direction::upper), 0.5);

  const std::vector<CalibrationSample> mixed = {{1.0, 1.0, 2.0}, {1.0, 1.0, 0.5}};
  EXPECT_DOUBLE_EQ(calibrate_constant(mixed, tmpl, Direction::upper), 2.0);
  EXPECT_DOUBLE_EQ(calibrate_constant(mixed, tmpl, Direction::lower), 0.5);
}

TEST(CalibrateConstant, Errors) {
  const BoundTemplate tmpl = [](double, double d) { return d; };
  EXPECT_THROW(calibrate_constant(std::vector<CalibrationSample>{}, tmpl, Direction::upper), InvalidArgument);
  const std::vector<CalibrationSample> zero = {{1.0, 0.0, 2.0}};
  EXPECT_THROW(calibrate_constant(zero, tmpl, Direction::upper), InvalidArgument);
}

// Two-regime upper template against the 1D Laplacian diagonal: the constant barely moves when the
// sample grid is refined.
double calibrate_laplace(int t_count, int x_count) {
  const auto sd = hkb::testing::cached_decomposition(1, 400);
  const KernelEvaluator ev(sd);
  auto p = BoundParams::make(1, 1, 0.25, sd->lambda(0));
  const auto shape = UpperTemplate::from_params(p);
  std::vector<CalibrationSample> samples;
  for (int i = 0; i < t_count; ++i) {
    const double t = 1e-3 * std::pow(1e3, i / (t_count - 1.0));
    for (int j = 0; j < x_count; ++j) {
      const double x = 0.05 + 0.45 * j / (x_count - 1.0);
      const std::size_t node = sd->grid.nearest_node({x, 0.0});
      samples.push_back({t, sd->grid.node_boundary_distance(node), ev.diagonal(t, node)});
    }
  }
  return calibrate_constant(samples, [&](double t, double d) { return shape.value(t, d); }, Direction::upper);
}

TEST(CalibrateConstant, LaplacianUpperConstantIsStable) {
  const double coarse = calibrate_laplace(10, 10);
  const double fine = calibrate_laplace(20, 20);
  EXPECT_TRUE(std::isfinite(coarse));
  EXPECT_GT(coarse, 0.0);
  EXPECT_LT(std::abs(fine - coarse), 0.05 * coarse);
}

TEST(LowerTemplate, ShortTimeRate) {
  auto p = BoundParams::make(1, 1, 0.25, 1.0);
  EXPECT_NEAR(lower_template(p, Regime::short_time, 0.04, 0.5), 5.0, 1e-14);
  EXPECT_NEAR(lower_template(p, Regime::short_time, 0.01, 0.5) / lower_template(p, Regime::short_time, 0.04, 0.5),
              2.0, 1e-14);
}

TEST(LowerTemplate, MidDegeneratesAtShortExponent) {
  auto p = BoundParams::make(1, 1, 0.25, 1.0, 0.5);
  for (double d : {0.1, 0.2, 0.3}) {
    const double T = 0.15;
    EXPECT_NEAR(lower_template(p, Regime::mid_time, T, d), std::exp(-T / (d * d)) / T, 1e-14 / T);
  }
}

TEST(LowerTemplate, LongAsymptoticSlope) {
  auto p = BoundParams::make(1, 1, 0.25, 2.0);
  const double d = 0.9;  // d = 0.5 pushes exp(-(T/d^2)^4) below the smallest double
  const double power = 1.0 / (1.0 - p.theta);
  auto excess = [&](double T) { return std::log(lower_template(p, Regime::long_time, T, d)) + p.mu * T; };
  const double T1 = 2.0, T2 = 4.0;
  const double expected = -(std::pow(T2 / (d * d), power) - std::pow(T1 / (d * d), power));
  EXPECT_NEAR(excess(T2) - excess(T1), expected, 2e-2 * std::abs(expected));
  const double slope = std::log(-(excess(T2) - std::log(d))) - std::log(-(excess(T1) - std::log(d)));
  EXPECT_NEAR(slope / std::log(T2 / T1), power, 2e-2 * power);
}

TEST(LowerTemplate, DecreasingWithinRegime) {
  for (int m : {1, 2}) {
    auto p = BoundParams::make(1, m, 0.25, 1.0);
    const double d = 0.5;
    const double edge = std::pow(d, 2 * m);
    const double seam = p.seam();
    auto check = [&](Regime r, double lo, double hi) {
      double prev = INFINITY;
      for (int i = 0; i <= 50; ++i) {
        const double t = lo * std::pow(hi / lo, i / 50.0);
        const double v = lower_template(p, r, t, d);
        EXPECT_LE(v, prev);
        prev = v;
      }
    };
    check(Regime::short_time, 1e-6, edge);
    check(Regime::mid_time, edge, seam * 0.999);
    check(Regime::long_time, seam, 10 * seam);
    p.C_upper = 1.0;
    double prev = INFINITY;
    for (int i = 0; i <= 50; ++i) {
      const double t = 1e-6 * std::pow(10 * seam / 1e-6, i / 50.0);
      const double u = upper_bound_U(p, t, d);
      EXPECT_LE(u, prev);
      prev = u;
    }
  }
}

TEST(LowerBound, RegimeChecks) {
  auto p = BoundParams::make(1, 1, 0.25, 10.0);
  EXPECT_THROW(lower_bound(p, Regime::short_time, 0.01, 0.5), Uncalibrated);
  p.C_short = 2.0;
  p.C_mid = 3.0;
  p.C_long = 4.0;
  EXPECT_NEAR(lower_bound(p, Regime::short_time, 0.01, 0.5), 2.0 * 10.0, 1e-12);
  EXPECT_NEAR(lower_bound(p, Regime::mid_time, 0.1, 0.2), 3.0 * lower_template(p, Regime::mid_time, 0.1, 0.2), 1e-12);
  EXPECT_NEAR(lower_bound(p, Regime::long_time, 0.3, 0.2), 4.0 * lower_template(p, Regime::long_time, 0.3, 0.2),
              1e-15);
  EXPECT_THROW(lower_bound(p, Regime::mid_time, 0.01, 0.5), InvalidArgument);
  EXPECT_THROW(lower_bound(p, Regime::short_time, 0.3, 0.5), InvalidArgument);
  EXPECT_THROW(lower_bound(p, Regime::mid_time, 0.1, 0.0), InvalidArgument);
}

TEST(Regime, StringRoundTrip) {
  for (auto r : {Regime::short_time, Regime::mid_time, Regime::long_time}) EXPECT_EQ(regime_from_string(to_string(r)), r);
  EXPECT_THROW(regime_from_string("forever"), InvalidArgument);
}

}  // namespace
