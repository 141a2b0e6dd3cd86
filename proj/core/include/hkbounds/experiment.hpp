#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hkbounds/bootstrap.hpp"
#include "hkbounds/bounds.hpp"
#include "hkbounds/config.hpp"

namespace hkb {

/// Outcome of one inequality on one row. na means not evaluated: a calibrated
/// check on a calibration row, or an input that is missing or errored.
enum class Flag { na, pass, fail };

const char* to_string(Flag flag);
Flag flag_from_string(const std::string& s);

/// Directional slack allowed by every pass flag: a <= b passes when a <= b + 1e-10 |b|.
inline constexpr double kFlagSlack = 1e-10;

enum class Stage : unsigned { kernel = 1, green = 2, bounds = 4, bootstrap = 8, all = 15 };

constexpr Stage operator|(Stage a, Stage b) {
  return static_cast<Stage>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has_stage(Stage set, Stage s) { return (static_cast<unsigned>(set) & static_cast<unsigned>(s)) != 0; }

/// One (t, x) sample. Quantities that were not computed are NaN.
struct ReportRow {
  double t = 0.0;
  std::size_t node = 0;
  double x = 0.0;
  double y = 0.0;
  double d = 0.0;
  bool calibration = false;
  Regime regime = Regime::short_time;
  double k = 0.0;
  double g_spectral = 0.0;
  double g_solve = 0.0;
  double g_variational = 0.0;
  double g_certified = 0.0;
  double upper = 0.0;         ///< calibrated U(t, x)
  double delta = 0.0;         ///< k / U
  double delta_star = 0.0;
  double log_delta_star = 0.0;
  double boot_upper = 0.0;    ///< calibrated upper template used by the bootstrap
  double boot_lower = 0.0;    ///< delta* times boot_upper
  double lower = 0.0;         ///< calibrated lower template of the row's regime
  BootstrapStatus boot_status = BootstrapStatus::ok;
  Flag routes = Flag::na;       ///< three Green routes agree (1e-8 spectral, 1e-4 variational)
  Flag green_cert = Flag::na;   ///< certified Green <= G
  Flag upper_ok = Flag::na;     ///< k <= U
  Flag lower_ok = Flag::na;     ///< lower <= k
  Flag bootstrap_ok = Flag::na; ///< delta* U <= k
  std::string status = "ok";
};

struct ExperimentResult {
  ExperimentConfig config;
  BoundParams params;
  UpperTemplate boot_upper;
  std::vector<ReportRow> rows;  ///< ordered by (t, node)

  /// Validity flags: routes, certified Green and bootstrap never fail and no row errored.
  bool valid() const;
  /// Fraction of evaluated sandwich checks (upper and lower) that pass.
  double sandwich_pass_rate() const;
  /// Calibrated constants and spectral data echoed into reports.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Runs the configured pipeline over the (t-grid x x-sample) product.
///
/// Calibration rows are those with even t index and even x-sample index under
/// the interleave split, or a seeded Bernoulli draw under the random split.
/// Constants are fitted on calibration rows only and the calibrated flags are
/// set on the remaining rows only. Row-level errors go to ReportRow::status;
/// failures of the operator or eigensolver propagate.
ExperimentResult run_experiment(const ExperimentConfig& cfg, Stage stages = Stage::all);

}  // namespace hkb
