// hkbounds: config-driven runner for the heat-kernel bound pipeline.
//
//   hkbounds verify --preset laplace1d --out out/
//   hkbounds bounds --config run.cfg --set t.count=30
//   hkbounds plot --input out/report.csv
//
// Exit status: 0 when every validity flag passes and no row errored, 1 when a
// validity flag failed or a row errored, 2 on a global failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hkbounds/config.hpp"
#include "hkbounds/errors.hpp"
#include "hkbounds/experiment.hpp"
#include "hkbounds/report.hpp"
#include "hkbounds/spectral.hpp"
#include "hkbounds/svg.hpp"

namespace fs = std::filesystem;
using namespace hkb;

namespace {

struct CommonArgs {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", a.preset, "laplace1d | beam1d | laplace2d | varcoef1d")
      ->check(CLI::IsMember({"laplace1d", "beam1d", "laplace2d", "varcoef1d"}));
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--set", a.overrides, "override a config key, key=value (repeatable)");
}

ExperimentConfig load(const CommonArgs& a) {
  ExperimentConfig cfg = a.preset.empty() ? ExperimentConfig{} : ExperimentConfig::from_preset(a.preset);
  if (!a.config.empty()) cfg = ExperimentConfig::from_file(a.config, cfg);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

void print_counts(const ExperimentResult& res) {
  std::size_t fail[5] = {0, 0, 0, 0, 0};
  std::size_t errored = 0;
  std::size_t vacuous = 0;
  for (const auto& r : res.rows) {
    fail[0] += r.routes == Flag::fail;
    fail[1] += r.green_cert == Flag::fail;
    fail[2] += r.upper_ok == Flag::fail;
    fail[3] += r.lower_ok == Flag::fail;
    fail[4] += r.bootstrap_ok == Flag::fail;
    errored += r.status != "ok";
    vacuous += r.boot_status == BootstrapStatus::vacuous;
  }
  std::printf("rows %zu  errored %zu  vacuous %zu\n", res.rows.size(), errored, vacuous);
  std::printf("failures: routes %zu  green_cert %zu  upper %zu  lower %zu  bootstrap %zu\n", fail[0], fail[1],
              fail[2], fail[3], fail[4]);
  std::printf("sandwich pass rate %.4f\n", res.sandwich_pass_rate());
  for (const auto& [k, v] : res.echo()) std::printf("%s = %s\n", k.c_str(), v.c_str());
}

// Rows at the sample node farthest from the boundary.
std::vector<ReportRow> centre_rows(const std::vector<ReportRow>& rows) {
  std::vector<ReportRow> out;
  std::size_t node = 0;
  double dmax = -1.0;
  for (const auto& r : rows) {
    if (r.d > dmax) {
      dmax = r.d;
      node = r.node;
    }
  }
  for (const auto& r : rows) {
    if (r.node == node) out.push_back(r);
  }
  return out;
}

int run_stage(const CommonArgs& a, Stage stage, const std::string& name) {
  const auto cfg = load(a);
  const auto res = run_experiment(cfg, stage);
  const fs::path csv = cfg.out_dir / (name + ".csv");
  emit_csv(res.rows, csv, report_echo(res));
  print_counts(res);
  std::printf("wrote %s\n", csv.string().c_str());
  return res.valid() ? 0 : 1;
}

int cmd_spectrum(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto op = build_operator(cfg.make_operator_spec(), cfg.make_grid());
  const auto sd = eigendecompose(op, cfg.eigen_count);
  const fs::path csv = cfg.out_dir / "spectrum.csv";
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  for (const auto& [k, v] : cfg.resolved()) out << "# " << k << " = " << v << '\n';
  out << "index,lambda,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < sd.count(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, sd.lambda(i), eigen_residual(op, sd, i));
    out << buf;
  }
  std::printf("modes %zu  mu %.12g  complete %s\n", sd.count(), spectral_gap(sd), sd.complete ? "yes" : "no");
  for (std::size_t i = 0; i < std::min<std::size_t>(sd.count(), 5); ++i) {
    std::printf("lambda_%zu = %.12g\n", i, sd.lambda(i));
  }
  std::printf("wrote %s\n", csv.string().c_str());
  return 0;
}

void write_plots(const std::vector<ReportRow>& rows, const EchoBlock& echo, const fs::path& dir) {
  PlotOptions opt;
  for (const auto& [k, v] : echo) {
    if (k == "operator.m") opt.m = std::stoi(v);
    if (k == "seam_time") opt.seam = std::stod(v);
  }
  for (auto kind : {PlotKind::sandwich, PlotKind::exponent, PlotKind::regime_map}) {
    const fs::path p = dir / (std::string(to_string(kind)) + ".svg");
    try {
      emit_svg(rows, kind, p, opt);
      std::printf("wrote %s\n", p.string().c_str());
    } catch (const InvalidArgument& e) {
      std::printf("skipped %s: %s\n", p.string().c_str(), e.what());
    }
  }
}

int cmd_verify(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto res = run_experiment(cfg, Stage::all);
  const fs::path csv = cfg.out_dir / "report.csv";
  const auto echo = report_echo(res);
  emit_csv(res.rows, csv, echo);
  print_counts(res);
  const auto centre = centre_rows(res.rows);
  const double two_m = 2.0 * cfg.m;
  std::vector<ReportRow> short_rows;
  for (const auto& r : centre) {
    if (r.t < std::pow(r.d, two_m) && r.t < res.params.seam()) short_rows.push_back(r);
  }
  try {
    const auto fk = fit_exponent(short_rows, Predictor::t, 0.0, INFINITY);
    const auto fb = fit_exponent(short_rows, Predictor::t, 0.0, INFINITY,
                                 [](const ReportRow& r) { return r.boot_lower; });
    std::printf("short-time slope at x=%.4g: k %.4f +/- %.4f, bootstrap lower %.4f +/- %.4f (target %.4f)\n",
                centre.front().x, fk.slope, fk.std_error, fb.slope, fb.std_error, -cfg.N / two_m);
  } catch (const std::exception& e) {
    std::printf("short-time slope: %s\n", e.what());
  }
  write_plots(res.rows, echo, cfg.out_dir);
  std::printf("wrote %s\n", csv.string().c_str());
  return res.valid() ? 0 : 1;
}

int cmd_plot(const std::string& input, const std::string& out) {
  const auto rep = read_csv(input);
  const fs::path dir = out.empty() ? fs::path(input).parent_path() : fs::path(out);
  if (!dir.empty()) fs::create_directories(dir);
  write_plots(rep.rows, rep.echo, dir.empty() ? fs::path(".") : dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-kernel bound pipeline: spectra, kernels, Green bounds, calibrated sandwiches, bootstrap"};
  app.require_subcommand(1);

  CommonArgs a;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and residuals of the discrete operator");
  auto* kernel = app.add_subcommand("kernel", "heat kernel diagonal over the (t, x) grid");
  auto* green = app.add_subcommand("green", "three resolvent routes and the certified Green bound");
  auto* bounds = app.add_subcommand("bounds", "calibrate and check the upper and lower templates");
  auto* bootstrap = app.add_subcommand("bootstrap", "bootstrap lower bound from the Green bound");
  auto* verify = app.add_subcommand("verify", "full pipeline, report CSV, fitted exponents and plots");
  for (auto* c : {spectrum, kernel, green, bounds, bootstrap, verify}) add_common(c, a);

  std::string input;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "SVG plots from a report CSV");
  plot->add_option("--input", input, "report CSV written by verify")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "output directory (default: next to the input)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectrum) return cmd_spectrum(a);
    if (*kernel) return run_stage(a, Stage::kernel, "kernel");
    if (*green) return run_stage(a, Stage::green, "green");
    if (*bounds) return run_stage(a, Stage::kernel | Stage::bounds, "bounds");
    if (*bootstrap) return run_stage(a, Stage::kernel | Stage::bootstrap, "bootstrap");
    if (*verify) return cmd_verify(a);
    if (*plot) return cmd_plot(input, plot_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hkbounds: %s\n", e.what());
    return 2;
  }
  return 2;
}
