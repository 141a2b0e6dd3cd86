#include "hkbounds/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "hkbounds/errors.hpp"
#include "hkbounds/report.hpp"

namespace hkb {

namespace {

constexpr double kW = 720, kH = 480, kL = 80, kR = 160, kT = 30, kB = 60;

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); }
  double py(double y) const { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); }
};

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Frame make_frame(double x0, double x1, double y0, double y1) {
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  const double py = 0.05 * (y1 - y0);
  return {x0, x1, y0 - py, y1 + py};
}

void axes(std::ostringstream& s, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  s << "<rect x='" << kL << "' y='" << kT << "' width='" << kW - kL - kR << "' height='" << kH - kT - kB
    << "' fill='none' stroke='#333'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
    s << "<text x='" << f2(f.px(xv)) << "' y='" << kH - kB + 18 << "' font-size='11' text-anchor='middle'>"
      << f2(xv) << "</text>\n";
    s << "<text x='" << kL - 6 << "' y='" << f2(f.py(yv) + 4) << "' font-size='11' text-anchor='end'>" << f2(yv)
      << "</text>\n";
  }
  s << "<text x='" << (kL + kW - kR) / 2 << "' y='" << kH - 15 << "' font-size='13' text-anchor='middle'>"
    << xlabel << "</text>\n";
  s << "<text x='18' y='" << (kT + kH - kB) / 2 << "' font-size='13' text-anchor='middle' transform='rotate(-90 18 "
    << (kT + kH - kB) / 2 << ")'>" << ylabel << "</text>\n";
}

void polyline(std::ostringstream& s, const Frame& f, const std::vector<std::pair<double, double>>& pts,
              const std::string& color, const std::string& dash = "") {
  if (pts.empty()) return;
  s << "<polyline fill='none' stroke='" << color << "' stroke-width='2'";
  if (!dash.empty()) s << " stroke-dasharray='" << dash << "'";
  s << " points='";
  for (const auto& [x, y] : pts) s << f2(f.px(x)) << ',' << f2(f.py(y)) << ' ';
  s << "'/>\n";
}

void legend(std::ostringstream& s, int slot, const std::string& color, const std::string& label) {
  const double y = kT + 20 + 20 * slot;
  s << "<line x1='" << kW - kR + 12 << "' y1='" << y << "' x2='" << kW - kR + 36 << "' y2='" << y << "' stroke='"
    << color << "' stroke-width='3'/>\n";
  s << "<text x='" << kW - kR + 42 << "' y='" << y + 4 << "' font-size='12'>" << label << "</text>\n";
}

std::vector<ReportRow> focus_rows(std::span<const ReportRow> rows, const PlotOptions& opt) {
  if (rows.empty()) throw InvalidArgument("plot: no rows");
  Point target = opt.focus.value_or(Point{0.5, 0.5});
  std::size_t best = rows.front().node;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double dist = std::hypot(r.x - target[0], r.y == 0.0 ? 0.0 : r.y - target[1]);
    if (dist < best_dist) {
      best_dist = dist;
      best = r.node;
    }
  }
  std::vector<ReportRow> sel;
  for (const auto& r : rows) {
    if (r.node == best && std::isfinite(r.k) && r.k > 0.0) sel.push_back(r);
  }
  std::sort(sel.begin(), sel.end(), [](const ReportRow& a, const ReportRow& b) { return a.t < b.t; });
  return sel;
}

std::string header(const std::string& title) {
  std::ostringstream s;
  s << "<?xml version='1.0' encoding='UTF-8'?>\n<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
    << "' height='" << kH << "' viewBox='0 0 " << kW << ' ' << kH << "'>\n"
    << "<rect width='100%' height='100%' fill='white'/>\n<text x='" << kL << "' y='20' font-size='14'>" << title
    << "</text>\n";
  return s.str();
}

}  // namespace

const char* to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::sandwich:
      return "sandwich";
    case PlotKind::exponent:
      return "exponent";
    case PlotKind::regime_map:
      return "regime_map";
  }
  return "sandwich";
}

PlotKind plot_kind_from_string(const std::string& s) {
  for (auto k : {PlotKind::sandwich, PlotKind::exponent, PlotKind::regime_map}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidArgument("unknown plot kind '" + s + "'");
}

void emit_svg(std::span<const ReportRow> rows, PlotKind kind, const std::filesystem::path& path,
              const PlotOptions& options) {
  std::ostringstream s;
  if (kind == PlotKind::sandwich || kind == PlotKind::exponent) {
    const auto sel = focus_rows(rows, options);
    if (kind == PlotKind::sandwich && sel.size() < 2) {
      throw InvalidArgument("sandwich plot needs at least two times at the chosen point, got " +
                            std::to_string(sel.size()));
    }
    std::vector<std::pair<double, double>> k, up, lo, boot;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    auto add = [&](std::vector<std::pair<double, double>>& v, double t, double val) {
      if (!std::isfinite(val) || val <= 0.0) return;
      v.emplace_back(std::log10(t), std::log10(val));
      ymin = std::min(ymin, v.back().second);
      ymax = std::max(ymax, v.back().second);
    };
    for (const auto& r : sel) {
      add(k, r.t, r.k);
      if (kind == PlotKind::sandwich) {
        add(up, r.t, r.upper);
        add(lo, r.t, r.lower);
        add(boot, r.t, r.boot_lower);
      }
    }
    const std::string where = "x = " + f2(sel.empty() ? 0.0 : sel.front().x) +
                              (sel.empty() || sel.front().y == 0.0 ? "" : ", y = " + f2(sel.front().y));
    if (kind == PlotKind::sandwich) {
      const Frame f = make_frame(k.front().first, k.back().first, ymin, ymax);
      s << header("heat kernel diagonal and bounds at " + where);
      axes(s, f, "log10 t", "log10 value");
      polyline(s, f, up, "#c0392b");
      polyline(s, f, k, "#222222");
      polyline(s, f, lo, "#2471a3");
      polyline(s, f, boot, "#27ae60", "6,4");
      legend(s, 0, "#c0392b", "upper U");
      legend(s, 1, "#222222", "k(t,x,x)");
      legend(s, 2, "#2471a3", "lower template");
      legend(s, 3, "#27ae60", "bootstrap lower");
    } else {
      std::vector<double> ts, ks;
      for (const auto& r : sel) {
        ts.push_back(r.t);
        ks.push_back(r.k);
      }
      const auto fit = fit_loglog(ts, ks);
      const Frame f = make_frame(k.front().first, k.back().first, ymin, ymax);
      s << header("exponent fit at " + where + ": slope " + f2(fit.slope) + " +/- " + f2(fit.std_error));
      axes(s, f, "log10 t", "log10 k");
      for (const auto& [x, y] : k) {
        s << "<circle cx='" << f2(f.px(x)) << "' cy='" << f2(f.py(y)) << "' r='3.5' fill='#222'/>\n";
      }
      const double a = fit.intercept / std::log(10.0);
      polyline(s, f, {{f.x0, a + fit.slope * f.x0}, {f.x1, a + fit.slope * f.x1}}, "#c0392b", "6,4");
      legend(s, 0, "#222222", "k(t,x,x)");
      legend(s, 1, "#c0392b", "fitted line");
    }
  } else {
    if (rows.empty()) throw InvalidArgument("regime map needs at least one row");
    double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin, dmax = 0.0;
    for (const auto& r : rows) {
      tmin = std::min(tmin, std::log10(r.t));
      tmax = std::max(tmax, std::log10(r.t));
      dmax = std::max(dmax, r.d);
    }
    if (options.seam > 0.0) tmax = std::max(tmax, std::log10(options.seam) + 0.2);
    const Frame f = make_frame(tmin, tmax, 0.0, dmax);
    s << header("regimes in the (t, d) plane");
    axes(s, f, "log10 t", "d(x)");
    const char* colors[] = {"#2471a3", "#f39c12", "#c0392b"};
    for (const auto& r : rows) {
      s << "<circle cx='" << f2(f.px(std::log10(r.t))) << "' cy='" << f2(f.py(r.d)) << "' r='3' fill='"
        << colors[static_cast<int>(r.regime)] << "'/>\n";
    }
    std::vector<std::pair<double, double>> curve;
    for (int i = 0; i <= 200; ++i) {
      const double d = std::max(dmax * i / 200.0, 1e-300);
      const double lt = 2.0 * options.m * std::log10(d);
      if (lt >= f.x0 && lt <= f.x1) curve.emplace_back(lt, d);
    }
    polyline(s, f, curve, "#555", "4,3");
    if (options.seam > 0.0) {
      const double ls = std::log10(options.seam);
      polyline(s, f, {{ls, f.y0}, {ls, f.y1}}, "#555", "4,3");
    }
    legend(s, 0, colors[0], "short");
    legend(s, 1, colors[1], "mid");
    legend(s, 2, colors[2], "long");
    std::ostringstream seam;
    seam << "t = " << options.seam;
    legend(s, 3, "#555", "t = d^" + std::to_string(2 * options.m) + (options.seam > 0.0 ? ", " + seam.str() : ""));
  }
  s << "</svg>\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << s.str();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace hkb
