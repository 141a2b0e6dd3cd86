#include "hkbounds/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hkbounds/errors.hpp"

namespace hkb {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_num(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw InvalidArgument("bad number '" + s + "' in CSV");
  return v;
}

std::string clean(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

BootstrapStatus status_from_string(const std::string& s) {
  for (auto b : {BootstrapStatus::ok, BootstrapStatus::vacuous, BootstrapStatus::calibration_violated}) {
    if (s == to_string(b)) return b;
  }
  throw InvalidArgument("unknown bootstrap status '" + s + "'");
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "t",          "node",           "x",          "y",          "d",
      "set",        "regime",         "k",          "g_spectral", "g_solve",
      "g_variational", "g_certified", "upper",      "delta",      "delta_star",
      "log_delta_star", "boot_upper", "boot_lower", "lower",      "boot_status",
      "flag_routes", "flag_green_cert", "flag_upper", "flag_lower", "flag_bootstrap",
      "status"};
  return cols;
}

void emit_csv(std::span<const ReportRow> rows, const std::filesystem::path& path, const EchoBlock& echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [k, v] : echo) out << "# " << k << " = " << v << '\n';
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << num(r.t) << ',' << r.node << ',' << num(r.x) << ',' << num(r.y) << ',' << num(r.d) << ','
        << (r.calibration ? "calibration" : "verification") << ',' << to_string(r.regime) << ',' << num(r.k)
        << ',' << num(r.g_spectral) << ',' << num(r.g_solve) << ',' << num(r.g_variational) << ','
        << num(r.g_certified) << ',' << num(r.upper) << ',' << num(r.delta) << ',' << num(r.delta_star) << ','
        << num(r.log_delta_star) << ',' << num(r.boot_upper) << ',' << num(r.boot_lower) << ','
        << num(r.lower) << ',' << to_string(r.boot_status) << ',' << to_string(r.routes) << ','
        << to_string(r.green_cert) << ',' << to_string(r.upper_ok) << ',' << to_string(r.lower_ok) << ','
        << to_string(r.bootstrap_ok) << ',' << clean(r.status) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvReport read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvReport rep;
  std::string line;
  bool header = false;
  const auto& cols = csv_columns();
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) rep.echo.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
      continue;
    }
    std::vector<std::string> f;
    std::string item;
    std::istringstream is(line);
    while (std::getline(is, item, ',')) f.push_back(item);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (!header) {
      if (f != cols) throw InvalidArgument(path.string() + ": unexpected CSV header");
      header = true;
      continue;
    }
    if (f.size() != cols.size()) throw InvalidArgument(path.string() + ": row has " + std::to_string(f.size()) + " fields");
    ReportRow r;
    r.t = parse_num(f[0]);
    r.node = static_cast<std::size_t>(std::stoull(f[1]));
    r.x = parse_num(f[2]);
    r.y = parse_num(f[3]);
    r.d = parse_num(f[4]);
    r.calibration = f[5] == "calibration";
    r.regime = regime_from_string(f[6]);
    r.k = parse_num(f[7]);
    r.g_spectral = parse_num(f[8]);
    r.g_solve = parse_num(f[9]);
    r.g_variational = parse_num(f[10]);
    r.g_certified = parse_num(f[11]);
    r.upper = parse_num(f[12]);
    r.delta = parse_num(f[13]);
    r.delta_star = parse_num(f[14]);
    r.log_delta_star = parse_num(f[15]);
    r.boot_upper = parse_num(f[16]);
    r.boot_lower = parse_num(f[17]);
    r.lower = parse_num(f[18]);
    r.boot_status = status_from_string(f[19]);
    r.routes = flag_from_string(f[20]);
    r.green_cert = flag_from_string(f[21]);
    r.upper_ok = flag_from_string(f[22]);
    r.lower_ok = flag_from_string(f[23]);
    r.bootstrap_ok = flag_from_string(f[24]);
    r.status = f[25];
    rep.rows.push_back(std::move(r));
  }
  if (!header) throw InvalidArgument(path.string() + ": missing CSV header");
  return rep;
}

EchoBlock report_echo(const ExperimentResult& result) {
  EchoBlock e = result.config.resolved();
  for (auto& kv : result.echo()) e.push_back(std::move(kv));
  return e;
}

ExponentFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("fit_loglog: size mismatch");
  if (xs.size() < 5) throw InvalidArgument("exponent fit needs at least 5 points in the window");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw InvalidArgument("exponent fit: nonpositive value " + num(ys[i]) + " at predictor " + num(xs[i]));
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("exponent fit: predictor takes a single value");
  ExponentFit fit;
  fit.count = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - fit.intercept - fit.slope * lx[i];
    ssr += e * e;
  }
  fit.std_error = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

ExponentFit fit_exponent(std::span<const ReportRow> rows, Predictor predictor, double lo, double hi,
                         const RowValue& value) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    const double p = predictor == Predictor::t ? r.t : r.d;
    if (p < lo || p > hi) continue;
    xs.push_back(p);
    ys.push_back(value ? value(r) : r.k);
  }
  return fit_loglog(xs, ys);
}

}  // namespace hkb
