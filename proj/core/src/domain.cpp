#include "hkbounds/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hkbounds/errors.hpp"

namespace hkb {

Domain::Domain(int dim, std::array<double, 2> lo, std::array<double, 2> hi)
    : dim_(dim), lo_(lo), hi_(hi) {
  for (int axis = 0; axis < dim_; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    if (!std::isfinite(lo_[a]) || !std::isfinite(hi_[a]) || !(lo_[a] < hi_[a])) {
      throw InvalidArgument("domain bounds must be finite with lower < upper on every axis");
    }
  }
}

Domain Domain::interval(double a, double b) { return Domain(1, {a, 0.0}, {b, 0.0}); }

Domain Domain::box(double ax, double bx, double ay, double by) {
  return Domain(2, {ax, ay}, {bx, by});
}

double Domain::volume() const noexcept {
  double v = 1.0;
  for (int axis = 0; axis < dim_; ++axis) v *= length(axis);
  return v;
}

bool Domain::contains_closed(const Point& x) const noexcept {
  for (int axis = 0; axis < dim_; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    if (!(x[a] >= lo_[a] && x[a] <= hi_[a])) return false;
  }
  return true;
}

double Domain::boundary_distance(const Point& x) const {
  if (!contains_closed(x)) {
    throw InvalidArgument("boundary_distance: point " + std::to_string(x[0]) +
                          (dim_ == 2 ? "," + std::to_string(x[1]) : std::string()) +
                          " lies outside " + describe());
  }
  // For a box the nearest boundary point is always the foot on the nearest face.
  double d = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < dim_; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    d = std::min({d, x[a] - lo_[a], hi_[a] - x[a]});
  }
  return d;
}

std::string Domain::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "(" << lo_[0] << "," << hi_[0] << ")";
  if (dim_ == 2) os << "x(" << lo_[1] << "," << hi_[1] << ")";
  return os.str();
}

Grid::Grid(Domain domain, int n_per_axis) : domain_(domain), n_(n_per_axis) {
  if (n_ < 1) throw InvalidArgument("grid needs at least one interior node per axis");
  for (int axis = 0; axis < domain_.dim(); ++axis) {
    h_[static_cast<std::size_t>(axis)] = domain_.length(axis) / (n_ + 1);
  }
}

std::size_t Grid::size() const noexcept {
  std::size_t s = 1;
  for (int axis = 0; axis < dim(); ++axis) s *= static_cast<std::size_t>(n_);
  return s;
}

double Grid::cell_volume() const noexcept {
  double v = 1.0;
  for (int axis = 0; axis < dim(); ++axis) v *= h_[static_cast<std::size_t>(axis)];
  return v;
}

double Grid::coordinate(int axis, int i) const {
  return domain_.lower(axis) + (i + 1) * spacing(axis);
}

Point Grid::node(std::size_t index) const {
  const auto mi = multi_index(index);
  Point p{coordinate(0, mi[0]), 0.0};
  if (dim() == 2) p[1] = coordinate(1, mi[1]);
  return p;
}

std::array<int, 2> Grid::multi_index(std::size_t index) const {
  if (index >= size()) throw InvalidArgument("grid node index out of range");
  const auto n = static_cast<std::size_t>(n_);
  return {static_cast<int>(index % n), static_cast<int>(index / n)};
}

std::size_t Grid::flat_index(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || (dim() == 1 ? j != 0 : j >= n_)) {
    throw InvalidArgument("grid multi-index out of range");
  }
  return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * static_cast<std::size_t>(j);
}

std::size_t Grid::nearest_node(const Point& x) const {
  std::array<int, 2> idx{0, 0};
  for (int axis = 0; axis < dim(); ++axis) {
    const double u = (x[static_cast<std::size_t>(axis)] - domain_.lower(axis)) / spacing(axis) - 1.0;
    idx[static_cast<std::size_t>(axis)] = std::clamp(static_cast<int>(std::lround(u)), 0, n_ - 1);
  }
  return flat_index(idx[0], idx[1]);
}

double Grid::node_boundary_distance(std::size_t index) const {
  return domain_.boundary_distance(node(index));
}

}  // namespace hkb
