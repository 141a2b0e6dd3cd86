#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hkbounds/config.hpp"
#include "hkbounds/errors.hpp"

namespace {

using namespace hkb;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hkbounds_config_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Config, PresetsValidate) {
  for (const char* name : {"laplace1d", "beam1d", "laplace2d", "varcoef1d"}) {
    const auto cfg = ExperimentConfig::from_preset(name);
    EXPECT_NO_THROW(cfg.validate()) << name;
    EXPECT_EQ(cfg.preset, name);
  }
  EXPECT_EQ(ExperimentConfig::from_preset("beam1d").m, 2);
  EXPECT_EQ(ExperimentConfig::from_preset("laplace2d").N, 2);
  EXPECT_THROW(ExperimentConfig::from_preset("nope"), InvalidArgument);
}

TEST(Config, FileOverridesPreset) {
  const auto path = scratch("a.cfg");
  std::ofstream(path) << "# comment line\n"
                         "preset = beam1d\n"
                         "grid.n = 64   # trailing comment\n"
                         "\n"
                         "t.min = 1e-5\n"
                         "x.rule = list:0.25,0.5\n"
                         "bootstrap.alpha_sweep = true\n"
                         "bootstrap.green = measured\n";
  const auto cfg = ExperimentConfig::from_file(path);
  EXPECT_EQ(cfg.preset, "beam1d");
  EXPECT_EQ(cfg.m, 2);
  EXPECT_EQ(cfg.grid_n, 64);
  EXPECT_EQ(cfg.t_min, 1e-5);
  EXPECT_TRUE(cfg.bootstrap.alpha_sweep);
  EXPECT_EQ(cfg.bootstrap_green, GreenSource::measured);
  const auto nodes = cfg.sample_nodes(cfg.make_grid());
  ASSERT_EQ(nodes.size(), 2u);
  EXPECT_NEAR(cfg.make_grid().node(nodes[0])[0], 0.25, 1.0 / 65);
}

TEST(Config, RejectsBadInput) {
  ExperimentConfig cfg;
  EXPECT_THROW(cfg.set("no.such.key", "1"), InvalidArgument);
  EXPECT_THROW(cfg.set("grid.n", "ten"), InvalidArgument);
  EXPECT_THROW(cfg.set("grid.n", "10.5"), InvalidArgument);
  EXPECT_THROW(cfg.set("green.variational", "maybe"), InvalidArgument);
  const auto path = scratch("bad.cfg");
  std::ofstream(path) << "grid.n 40\n";
  EXPECT_THROW(ExperimentConfig::from_file(path), InvalidArgument);
  EXPECT_THROW(ExperimentConfig::from_file(scratch("missing.cfg")), InvalidArgument);
}

TEST(Config, ValidationRejectsBeforeComputation) {
  auto bad = [](const std::string& key, const std::string& value) {
    ExperimentConfig cfg;
    cfg.set(key, value);
    return cfg;
  };
  EXPECT_THROW(bad("x.rule", "list:").validate(), InvalidArgument);
  EXPECT_THROW(bad("x.rule", "count:0").validate(), InvalidArgument);
  EXPECT_THROW(bad("x.rule", "list:1.5").validate(), InvalidArgument);
  EXPECT_THROW(bad("t.min", "0").validate(), InvalidArgument);
  EXPECT_THROW(bad("t.count", "1").validate(), InvalidArgument);
  EXPECT_THROW(bad("bounds.eps", "0.5").validate(), InvalidArgument);
  EXPECT_THROW(bad("operator.m", "0").validate(), InvalidArgument);
  EXPECT_THROW(bad("operator.domain", "1,0").validate(), InvalidArgument);
  EXPECT_THROW(bad("operator.coefficient", "oscillatory:0,1,2").validate(), InvalidArgument);
  EXPECT_THROW(bad("bootstrap.alpha", "1.2").validate(), InvalidArgument);
  EXPECT_THROW(bad("calibration.split", "halves").validate(), InvalidArgument);
}

TEST(Config, TimeGridIsLogSpaced) {
  ExperimentConfig cfg;
  cfg.t_min = 1e-4;
  cfg.t_max = 1.0;
  cfg.t_count = 5;
  const auto ts = cfg.time_grid();
  ASSERT_EQ(ts.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ts[static_cast<std::size_t>(i)], std::pow(10.0, -4 + i), 1e-15 * std::pow(10.0, -4 + i));
  EXPECT_EQ(ts.front(), 1e-4);
  EXPECT_EQ(ts.back(), 1.0);
}

TEST(Config, SampleRules) {
  ExperimentConfig cfg;
  cfg.grid_n = 99;
  const Grid grid = cfg.make_grid();
  cfg.x_rule = "all";
  EXPECT_EQ(cfg.sample_nodes(grid).size(), 99u);
  cfg.x_rule = "stride:10";
  const auto strided = cfg.sample_nodes(grid);
  ASSERT_EQ(strided.size(), 11u);  // 0, 10, ..., 90 and the last node 98
  EXPECT_EQ(strided.front(), 0u);
  EXPECT_EQ(strided[9], 90u);
  EXPECT_EQ(strided.back(), 98u);
  cfg.x_rule = "count:7";
  const auto seven = cfg.sample_nodes(grid);
  EXPECT_EQ(seven.size(), 7u);
  EXPECT_TRUE(std::is_sorted(seven.begin(), seven.end()));
  cfg.x_rule = "list:0.5,0.5,0.1";
  EXPECT_EQ(cfg.sample_nodes(grid).size(), 2u);

  auto two = ExperimentConfig::from_preset("laplace2d");
  two.x_rule = "list:0.5/0.25,0.1/0.9";
  const auto nodes = two.sample_nodes(two.make_grid());
  ASSERT_EQ(nodes.size(), 2u);
}

TEST(Config, ResolvedEchoesEveryKeyAndRoundTrips) {
  auto cfg = ExperimentConfig::from_preset("varcoef1d");
  cfg.set("bounds.theta", "0.6");
  cfg.set("seed", "42");
  const auto resolved = cfg.resolved();
  EXPECT_GE(resolved.size(), 20u);
  const auto path = scratch("echo.cfg");
  {
    std::ofstream out(path);
    for (const auto& [k, v] : resolved) out << k << " = " << v << "\n";
  }
  const auto back = ExperimentConfig::from_file(path);
  EXPECT_EQ(back.resolved(), resolved);
}

}  // namespace
