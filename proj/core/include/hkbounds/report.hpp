#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hkbounds/experiment.hpp"

namespace hkb {

using EchoBlock = std::vector<std::pair<std::string, std::string>>;

/// CSV columns, in file order:
///
///   t, node, x, y, d, set, regime, k, g_spectral, g_solve, g_variational,
///   g_certified, upper, delta, delta_star, log_delta_star, boot_upper,
///   boot_lower, lower, boot_status, flag_routes, flag_green_cert,
///   flag_upper, flag_lower, flag_bootstrap, status
///
/// `set` is calibration or verification. Reals use 17 significant digits and
/// NaN marks a value that was not computed. The file starts with `# key = value`
/// comment lines holding the echo block.
const std::vector<std::string>& csv_columns();

void emit_csv(std::span<const ReportRow> rows, const std::filesystem::path& path, const EchoBlock& echo = {});

struct CsvReport {
  EchoBlock echo;
  std::vector<ReportRow> rows;
};

CsvReport read_csv(const std::filesystem::path& path);

/// Echo block for a finished run: resolved config followed by calibrated constants.
EchoBlock report_echo(const ExperimentResult& result);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Least squares of log y against log x. Needs at least 5 points, all positive.
ExponentFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

enum class Predictor { t, d };

using RowValue = std::function<double(const ReportRow&)>;

/// Slope of log(value) against log(t) or log(d) over rows whose predictor lies
/// in [lo, hi]. The default value is k.
ExponentFit fit_exponent(std::span<const ReportRow> rows, Predictor predictor, double lo, double hi,
                         const RowValue& value = {});

}  // namespace hkb
