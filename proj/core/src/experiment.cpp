#include "hkbounds/experiment.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "hkbounds/errors.hpp"
#include "hkbounds/kernel.hpp"
#include "hkbounds/spectral.hpp"
#include "hkbounds/test_functions.hpp"

namespace hkb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Flag check_le(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return Flag::na;
  return a <= b + kFlagSlack * std::abs(b) ? Flag::pass : Flag::fail;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string("none"); }

void note(ReportRow& row, const std::string& what) {
  row.status = row.status == "ok" ? what : row.status + "; " + what;
}

}  // namespace

const char* to_string(Flag flag) {
  switch (flag) {
    case Flag::na:
      return "na";
    case Flag::pass:
      return "pass";
    case Flag::fail:
      return "fail";
  }
  return "na";
}

Flag flag_from_string(const std::string& s) {
  if (s == "pass") return Flag::pass;
  if (s == "fail") return Flag::fail;
  if (s == "na") return Flag::na;
  throw InvalidArgument("unknown flag '" + s + "'");
}

bool ExperimentResult::valid() const {
  for (const auto& r : rows) {
    if (r.status != "ok") return false;
    if (r.routes == Flag::fail || r.green_cert == Flag::fail || r.bootstrap_ok == Flag::fail) return false;
  }
  return true;
}

double ExperimentResult::sandwich_pass_rate() const {
  std::size_t total = 0;
  std::size_t pass = 0;
  for (const auto& r : rows) {
    for (Flag f : {r.upper_ok, r.lower_ok}) {
      if (f == Flag::na) continue;
      ++total;
      pass += f == Flag::pass;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(pass) / static_cast<double>(total);
}

std::vector<std::pair<std::string, std::string>> ExperimentResult::echo() const {
  return {
      {"mu", fmt(params.mu)},
      {"gamma", fmt(params.gamma)},
      {"theta", fmt(params.theta)},
      {"seam_time", fmt(params.seam())},
      {"C_upper", fmt(params.C_upper)},
      {"C_short", fmt(params.C_short)},
      {"C_mid", fmt(params.C_mid)},
      {"C_long", fmt(params.C_long)},
      {"bootstrap_theta", fmt(boot_upper.theta())},
      {"bootstrap_C", fmt(boot_upper.constant())},
      {"bootstrap_C_long", fmt(boot_upper.long_constant())},
  };
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, Stage stages) {
  cfg.validate();
  const Grid grid = cfg.make_grid();
  const DiscreteOperator op = build_operator(cfg.make_operator_spec(), grid);
  auto sd = std::make_shared<const SpectralDecomposition>(eigendecompose(op, cfg.eigen_count));
  const KernelEvaluator ev(sd);
  const BumpProfile profile(std::max(cfg.m, 4));

  ExperimentResult out;
  out.config = cfg;
  out.params = BoundParams::make(cfg.N, cfg.m, cfg.eps, spectral_gap(*sd), cfg.theta);
  out.params.seam_factor = cfg.seam_factor;
  out.params.validate();
  const BoundParams& params = out.params;

  const auto ts = cfg.time_grid();
  const auto nodes = cfg.sample_nodes(grid);
  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution coin(cfg.calibration_fraction);

  const bool want_k = has_stage(stages, Stage::kernel) || has_stage(stages, Stage::bounds) ||
                      has_stage(stages, Stage::bootstrap);
  const bool want_green = has_stage(stages, Stage::green) || has_stage(stages, Stage::bootstrap);

  out.rows.reserve(ts.size() * nodes.size());
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    const double t = ts[ti];
    std::optional<ResolventSolver> solver;
    if (want_green) solver.emplace(op, t);
    for (std::size_t xi = 0; xi < nodes.size(); ++xi) {
      ReportRow row;
      row.t = t;
      row.node = nodes[xi];
      const Point p = grid.node(row.node);
      row.x = p[0];
      row.y = grid.dim() == 2 ? p[1] : 0.0;
      row.d = grid.node_boundary_distance(row.node);
      row.calibration = cfg.split == "interleave" ? (ti % 2 == 0 && xi % 2 == 0) : coin(rng);
      row.regime = classify_regime(params, t, row.d);
      row.k = row.g_spectral = row.g_solve = row.g_variational = row.g_certified = kNaN;
      row.upper = row.delta = row.delta_star = row.log_delta_star = kNaN;
      row.boot_upper = row.boot_lower = row.lower = kNaN;

      if (want_k) {
        try {
          row.k = ev.diagonal(t, row.node);
        } catch (const std::exception& e) {
          note(row, std::string("kernel: ") + e.what());
        }
      }
      if (want_green) {
        try {
          row.g_solve = solver->diagonal(row.node);
          if (sd->complete) row.g_spectral = spectral_green(*sd, t, row.node);
          if (cfg.variational && has_stage(stages, Stage::green)) {
            row.g_variational = variational_green(op, t, row.node).value;
          }
          row.g_certified = discrete_green_best_bound(op, t, row.node, profile).value;
        } catch (const std::exception& e) {
          note(row, std::string("green: ") + e.what());
        }
        if (std::isfinite(row.g_solve)) {
          bool agree = true;
          bool any = false;
          if (std::isfinite(row.g_spectral)) {
            any = true;
            agree = agree && std::abs(row.g_spectral - row.g_solve) <= 1e-8 * row.g_solve;
          }
          if (std::isfinite(row.g_variational)) {
            any = true;
            agree = agree && std::abs(row.g_variational - row.g_solve) <= 1e-4 * row.g_solve;
          }
          if (any) row.routes = agree ? Flag::pass : Flag::fail;
          row.green_cert = check_le(row.g_certified, row.g_solve);
        }
      }
      out.rows.push_back(std::move(row));
    }
  }

  // Calibration set: the calibration rows plus, at every calibration node, the
  // regime edges t = d^{2m} and t = seam approached from both sides, so each
  // template sees the extremes of its own regime.
  struct CalSample {
    CalibrationSample s;
    Regime regime;
  };
  std::vector<CalSample> calib;
  std::set<std::size_t> calib_nodes;
  for (const auto& r : out.rows) {
    if (!r.calibration || r.status != "ok" || !std::isfinite(r.k)) continue;
    calib.push_back({{r.t, r.d, r.k}, r.regime});
    calib_nodes.insert(r.node);
  }
  if (want_k) {
    const double below = 1.0 - 1e-9;
    for (std::size_t node : calib_nodes) {
      const double d = grid.node_boundary_distance(node);
      for (double t : {std::pow(d, 2.0 * cfg.m) * below, std::pow(d, 2.0 * cfg.m), params.seam() * below,
                       params.seam()}) {
        if (t < cfg.t_min || t > cfg.t_max) continue;
        try {
          calib.push_back({{t, d, ev.diagonal(t, node)}, classify_regime(params, t, d)});
        } catch (const TruncationError&) {
          // edge sample outside the accurate range; the rows still calibrate
        }
      }
    }
  }
  auto calibration_samples = [&](auto&& keep) {
    std::vector<CalibrationSample> s;
    for (const auto& c : calib) {
      if (keep(c)) s.push_back(c.s);
    }
    return s;
  };

  if (has_stage(stages, Stage::bounds)) {
    BoundParams unit = params;
    unit.C_upper = 1.0;
    const UpperTemplate shape = UpperTemplate::from_params(unit);
    const auto all = calibration_samples([](const CalSample&) { return true; });
    if (!all.empty()) {
      out.params.C_upper = calibrate_constant(all, [&](double t, double d) { return shape.value(t, d); },
                                              Direction::upper);
    }
    for (Regime regime : {Regime::short_time, Regime::mid_time, Regime::long_time}) {
      const auto s = calibration_samples([&](const CalSample& c) { return c.regime == regime; });
      if (s.empty()) continue;
      const double c = calibrate_constant(
          s, [&](double t, double d) { return lower_template(params, regime, t, d); }, Direction::lower);
      if (!std::isfinite(c)) continue;
      (regime == Regime::short_time ? out.params.C_short
       : regime == Regime::mid_time ? out.params.C_mid
                                    : out.params.C_long) = c;
    }
    for (auto& r : out.rows) {
      if (!std::isfinite(r.k)) continue;
      try {
        if (params.C_upper) {
          r.upper = upper_bound_U(params, r.t, r.d);
          r.delta = r.k / r.upper;
        }
      } catch (const std::exception& e) {
        note(r, std::string("upper: ") + e.what());
      }
      try {
        r.lower = lower_bound(params, r.regime, r.t, r.d);
      } catch (const Uncalibrated&) {
        // no calibration sample fell in this regime
      } catch (const std::exception& e) {
        note(r, std::string("lower: ") + e.what());
      }
      if (!r.calibration) {
        r.upper_ok = check_le(r.k, r.upper);
        r.lower_ok = check_le(r.lower, r.k);
      }
    }
  }

  const double boot_theta = cfg.bootstrap_theta.value_or(cfg.N / (2.0 * cfg.m));
  out.boot_upper = UpperTemplate::power(cfg.N, cfg.m, boot_theta, params.mu, cfg.seam_factor);
  if (has_stage(stages, Stage::bootstrap)) {
    const UpperTemplate shape = out.boot_upper;
    const auto tmpl = [&](double t, double d) { return shape.value(t, d); };
    const double seam = shape.seam();
    const auto early = calibration_samples([&](const CalSample& c) { return c.s.t < seam; });
    const auto late = calibration_samples([&](const CalSample& c) { return c.s.t >= seam; });
    if (early.empty() && late.empty()) throw InvalidArgument("calibration split selected no usable rows");
    const double c_early = early.empty() ? 0.0 : calibrate_constant(early, tmpl, Direction::upper);
    const double c_late = late.empty() ? 0.0 : calibrate_constant(late, tmpl, Direction::upper);
    out.boot_upper = shape.with_constants(early.empty() ? c_late : c_early, late.empty() ? c_early : c_late);
    for (auto& r : out.rows) {
      const double green = cfg.bootstrap_green == GreenSource::certified ? r.g_certified : r.g_solve;
      if (!std::isfinite(green)) continue;
      try {
        const auto b = bootstrap_from_green(green, out.boot_upper, r.t, r.d, cfg.bootstrap);
        r.boot_upper = b.upper;
        r.delta_star = b.delta_star;
        r.log_delta_star = b.log_delta_star;
        r.boot_lower = b.lower;
        r.boot_status = b.status;
        if (std::isfinite(r.k) && r.k > r.boot_upper * (1.0 + kFlagSlack)) {
          r.boot_status = BootstrapStatus::calibration_violated;
        }
        if (!r.calibration && r.boot_status != BootstrapStatus::vacuous) {
          r.bootstrap_ok = check_le(r.boot_lower, r.k);
        }
      } catch (const std::exception& e) {
        note(r, std::string("bootstrap: ") + e.what());
      }
    }
  }
  return out;
}

}  // namespace hkb
