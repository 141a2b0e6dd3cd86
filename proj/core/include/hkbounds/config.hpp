#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hkbounds/bootstrap.hpp"
#include "hkbounds/discrete_operator.hpp"

namespace hkb {

/// Harness inputs. Read from a flat `key = value` file; `#` starts a comment.
///
/// Keys and defaults (laplace1d preset):
///
///   preset                 laplace1d | beam1d | laplace2d | varcoef1d
///   operator.N             1          spatial dimension (1 or 2)
///   operator.m             1          half-order, operator order is 2m
///   operator.domain        0,1        a,b  or  ax,bx,ay,by
///   operator.coefficient   constant:1 | oscillatory:lo,hi,freq
///   grid.n                 400        interior nodes per axis
///   spectrum.count         all        all | number of lowest eigenpairs
///   bounds.eps             0.25       0 < eps < 1 - N/2m
///   bounds.theta           1-eps      interpolation exponent of the mid/long templates
///   bounds.seam            2          seam at t = seam / mu (1 or 2)
///   bootstrap.theta        N/2m       time exponent of the bootstrap's upper template
///   bootstrap.alpha        0.5
///   bootstrap.alpha_sweep  false
///   bootstrap.quadrature   256
///   bootstrap.delta_tol    1e-10
///   bootstrap.green        certified  certified | measured
///   green.variational      true       run the (slow) variational route
///   t.min, t.max, t.count  1e-4, 1, 20   log-spaced time grid
///   x.rule                 count:20   all | stride:K | count:K | list:x1,x2,...
///                                     (2D list points are written x/y; stride
///                                     always keeps the last node per axis)
///   calibration.split      interleave interleave | random
///   calibration.fraction   0.5        random split only
///   output.dir             out
///   seed                   1
struct ExperimentConfig {
  std::string preset = "laplace1d";
  int N = 1;
  int m = 1;
  std::vector<double> domain{0.0, 1.0};
  std::string coefficient = "constant:1";
  int grid_n = 400;
  std::optional<std::size_t> eigen_count;
  double eps = 0.25;
  std::optional<double> theta;
  double seam_factor = 2.0;
  std::optional<double> bootstrap_theta;
  BootstrapConfig bootstrap;
  GreenSource bootstrap_green = GreenSource::certified;
  bool variational = true;
  double t_min = 1e-4;
  double t_max = 1.0;
  int t_count = 20;
  std::string x_rule = "count:20";
  std::string split = "interleave";
  double calibration_fraction = 0.5;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;

  static ExperimentConfig from_preset(const std::string& name);
  /// Applies the file's keys on top of `base` (a `preset` key first resets to that preset).
  static ExperimentConfig from_file(const std::filesystem::path& path, ExperimentConfig base);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  void validate() const;

  /// Every key with its resolved value, in documentation order.
  std::vector<std::pair<std::string, std::string>> resolved() const;

  Domain make_domain() const;
  Coefficient make_coefficient() const;
  OperatorSpec make_operator_spec() const;
  Grid make_grid() const;
  std::vector<double> time_grid() const;
  /// Grid nodes selected by x.rule, ascending and unique. Throws when empty.
  std::vector<std::size_t> sample_nodes(const Grid& grid) const;
};

}  // namespace hkb
