#include "hkbounds/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hkbounds/errors.hpp"

namespace hkb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw InvalidArgument("config key '" + key + "': expected an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_preset(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "laplace1d") return c;
  if (name == "varcoef1d") {
    c.coefficient = "oscillatory:1,2,5";
    return c;
  }
  if (name == "beam1d") {
    c.m = 2;
    // keeps t K + M conditioned well enough for 1e-8 route agreement
    c.grid_n = 200;
    c.t_min = 1e-6;
    c.t_max = 0.02;
    return c;
  }
  if (name == "laplace2d") {
    // order 2m must exceed N = 2, so the planar preset is the clamped (m = 2) form
    c.N = 2;
    c.m = 2;
    c.domain = {0.0, 1.0, 0.0, 1.0};
    c.grid_n = 24;
    c.t_min = 1e-6;
    c.t_max = 0.01;
    c.t_count = 12;
    c.x_rule = "stride:2";
    c.variational = false;
    return c;
  }
  throw InvalidArgument("unknown preset '" + name + "' (laplace1d, beam1d, laplace2d, varcoef1d)");
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [k, v] : entries) {
    if (k == "preset") base = from_preset(v);
  }
  for (const auto& [k, v] : entries) {
    if (k != "preset") base.set(k, v);
  }
  return base;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  return from_file(path, ExperimentConfig{});
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "preset") {
    *this = from_preset(v);
  } else if (key == "operator.N") {
    N = to_int(key, v);
  } else if (key == "operator.m") {
    m = to_int(key, v);
  } else if (key == "operator.domain") {
    domain.clear();
    for (const auto& s : split_list(v, ',')) domain.push_back(to_double(key, s));
  } else if (key == "operator.coefficient") {
    coefficient = v;
  } else if (key == "grid.n") {
    grid_n = to_int(key, v);
  } else if (key == "spectrum.count") {
    if (v == "all") {
      eigen_count.reset();
    } else {
      eigen_count = static_cast<std::size_t>(to_int(key, v));
    }
  } else if (key == "bounds.eps") {
    eps = to_double(key, v);
  } else if (key == "bounds.theta") {
    if (v == "auto") {
      theta.reset();
    } else {
      theta = to_double(key, v);
    }
  } else if (key == "bounds.seam") {
    seam_factor = to_double(key, v);
  } else if (key == "bootstrap.theta") {
    if (v == "auto") {
      bootstrap_theta.reset();
    } else {
      bootstrap_theta = to_double(key, v);
    }
  } else if (key == "bootstrap.alpha") {
    bootstrap.alpha = to_double(key, v);
  } else if (key == "bootstrap.alpha_sweep") {
    bootstrap.alpha_sweep = to_bool(key, v);
  } else if (key == "bootstrap.quadrature") {
    bootstrap.quadrature = to_int(key, v);
  } else if (key == "bootstrap.delta_tol") {
    bootstrap.delta_tol = to_double(key, v);
  } else if (key == "bootstrap.green") {
    if (v == "certified") {
      bootstrap_green = GreenSource::certified;
    } else if (v == "measured") {
      bootstrap_green = GreenSource::measured;
    } else {
      throw InvalidArgument("bootstrap.green must be certified or measured");
    }
  } else if (key == "green.variational") {
    variational = to_bool(key, v);
  } else if (key == "t.min") {
    t_min = to_double(key, v);
  } else if (key == "t.max") {
    t_max = to_double(key, v);
  } else if (key == "t.count") {
    t_count = to_int(key, v);
  } else if (key == "x.rule") {
    x_rule = v;
  } else if (key == "calibration.split") {
    split = v;
  } else if (key == "calibration.fraction") {
    calibration_fraction = to_double(key, v);
  } else if (key == "output.dir") {
    out_dir = v;
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(to_double(key, v));
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (N != 1 && N != 2) throw InvalidArgument("operator.N must be 1 or 2");
  if (m < 1 || 2 * m <= N) throw InvalidArgument("operator.m must satisfy 2m > N");
  if (domain.size() != static_cast<std::size_t>(2 * N)) {
    throw InvalidArgument("operator.domain needs " + std::to_string(2 * N) + " numbers");
  }
  if (grid_n < 2 * m + 1) throw InvalidArgument("grid.n must be at least 2m+1");
  if (!(t_min > 0.0) || !(t_max > t_min)) throw InvalidArgument("time grid needs 0 < t.min < t.max");
  if (t_count < 2) throw InvalidArgument("t.count must be at least 2");
  if (split != "interleave" && split != "random") throw InvalidArgument("calibration.split must be interleave or random");
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw InvalidArgument("calibration.fraction must lie in (0,1)");
  }
  if (!(seam_factor > 0.0)) throw InvalidArgument("bounds.seam must be positive");
  bootstrap.validate();
  const double eps_max = 1.0 - static_cast<double>(N) / (2.0 * m);
  if (!(eps > 0.0 && eps < eps_max)) throw InvalidArgument("bounds.eps must lie in (0, 1 - N/2m)");
  make_domain();
  make_coefficient();
  (void)sample_nodes(make_grid());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
  std::string dom;
  for (std::size_t i = 0; i < domain.size(); ++i) dom += (i ? "," : "") + fmt(domain[i]);
  const double two_m = 2.0 * m;
  return {
      {"preset", preset},
      {"operator.N", std::to_string(N)},
      {"operator.m", std::to_string(m)},
      {"operator.domain", dom},
      {"operator.coefficient", coefficient},
      {"grid.n", std::to_string(grid_n)},
      {"spectrum.count", eigen_count ? std::to_string(*eigen_count) : "all"},
      {"bounds.eps", fmt(eps)},
      {"bounds.theta", fmt(theta.value_or(1.0 - eps))},
      {"bounds.seam", fmt(seam_factor)},
      {"bootstrap.theta", fmt(bootstrap_theta.value_or(N / two_m))},
      {"bootstrap.alpha", fmt(bootstrap.alpha)},
      {"bootstrap.alpha_sweep", bootstrap.alpha_sweep ? "true" : "false"},
      {"bootstrap.quadrature", std::to_string(bootstrap.quadrature)},
      {"bootstrap.delta_tol", fmt(bootstrap.delta_tol)},
      {"bootstrap.green", to_string(bootstrap_green)},
      {"green.variational", variational ? "true" : "false"},
      {"t.min", fmt(t_min)},
      {"t.max", fmt(t_max)},
      {"t.count", std::to_string(t_count)},
      {"x.rule", x_rule},
      {"calibration.split", split},
      {"calibration.fraction", fmt(calibration_fraction)},
      {"output.dir", out_dir.string()},
      {"seed", std::to_string(seed)},
  };
}

Domain ExperimentConfig::make_domain() const {
  if (N == 1 && domain.size() == 2) return Domain::interval(domain[0], domain[1]);
  if (N == 2 && domain.size() == 4) return Domain::box(domain[0], domain[1], domain[2], domain[3]);
  throw InvalidArgument("operator.domain does not match operator.N");
}

Coefficient ExperimentConfig::make_coefficient() const {
  const auto colon = coefficient.find(':');
  const std::string kind = coefficient.substr(0, colon);
  const std::string args = colon == std::string::npos ? std::string() : coefficient.substr(colon + 1);
  const auto parts = split_list(args, ',');
  if (kind == "constant" && parts.size() == 1) {
    return Coefficient::constant(to_double("operator.coefficient", parts[0]));
  }
  if (kind == "oscillatory" && parts.size() == 3) {
    return Coefficient::oscillatory(to_double("operator.coefficient", parts[0]),
                                    to_double("operator.coefficient", parts[1]),
                                    to_double("operator.coefficient", parts[2]));
  }
  throw InvalidArgument("operator.coefficient must be constant:a or oscillatory:lo,hi,freq; got '" + coefficient +
                        "'");
}

OperatorSpec ExperimentConfig::make_operator_spec() const { return {m, N, make_coefficient()}; }

Grid ExperimentConfig::make_grid() const { return Grid(make_domain(), grid_n); }

std::vector<double> ExperimentConfig::time_grid() const {
  std::vector<double> ts(static_cast<std::size_t>(t_count));
  const double a = std::log(t_min);
  const double b = std::log(t_max);
  for (int i = 0; i < t_count; ++i) ts[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (t_count - 1));
  ts.front() = t_min;
  ts.back() = t_max;
  return ts;
}

std::vector<std::size_t> ExperimentConfig::sample_nodes(const Grid& grid) const {
  const int n = grid.n_per_axis();
  std::set<std::size_t> nodes;
  auto per_axis = [&](const std::vector<int>& idx) {
    if (grid.dim() == 1) {
      for (int i : idx) nodes.insert(grid.flat_index(i));
    } else {
      for (int j : idx)
        for (int i : idx) nodes.insert(grid.flat_index(i, j));
    }
  };
  const auto colon = x_rule.find(':');
  const std::string kind = x_rule.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : x_rule.substr(colon + 1);
  if (kind == "all") {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    per_axis(idx);
  } else if (kind == "stride") {
    const int k = to_int("x.rule", arg);
    if (k < 1) throw InvalidArgument("x.rule stride must be positive");
    std::vector<int> idx;
    for (int i = 0; i < n; i += k) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    per_axis(idx);
  } else if (kind == "count") {
    const int k = to_int("x.rule", arg);
    if (k < 1) throw InvalidArgument("x.rule count must be positive");
    std::vector<int> idx;
    for (int i = 0; i < k; ++i) {
      idx.push_back(std::clamp(static_cast<int>(std::lround((i + 1.0) * (n + 1) / (k + 1))) - 1, 0, n - 1));
    }
    per_axis(idx);
  } else if (kind == "list") {
    for (const auto& item : split_list(arg, ',')) {
      if (item.empty()) continue;
      const auto coords = split_list(item, '/');
      Point p{to_double("x.rule", coords.at(0)), coords.size() > 1 ? to_double("x.rule", coords[1]) : 0.0};
      if (!grid.domain().contains_closed(p) || grid.domain().boundary_distance(p) <= 0.0) {
        throw InvalidArgument("x.rule point " + item + " is not interior");
      }
      nodes.insert(grid.nearest_node(p));
    }
  } else {
    throw InvalidArgument("x.rule must be all, stride:K, count:K or list:...; got '" + x_rule + "'");
  }
  if (nodes.empty()) throw InvalidArgument("x.rule selects no sample points");
  return {nodes.begin(), nodes.end()};
}

}  // namespace hkb
