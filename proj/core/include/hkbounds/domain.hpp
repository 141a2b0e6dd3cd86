#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace hkb {

/// A point in R^1 or R^2. One-dimensional code only reads component 0.
using Point = std::array<double, 2>;

/// Bounded domain: an open interval or an axis-aligned open box.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain box(double ax, double bx, double ay, double by);

  int dim() const noexcept { return dim_; }
  double lower(int axis) const { return lo_.at(static_cast<std::size_t>(axis)); }
  double upper(int axis) const { return hi_.at(static_cast<std::size_t>(axis)); }
  double length(int axis) const { return upper(axis) - lower(axis); }
  double volume() const noexcept;

  bool contains_closed(const Point& x) const noexcept;

  /// Euclidean distance from x to the boundary; 0 exactly on the boundary.
  /// Throws InvalidArgument if x lies outside the closed domain.
  double boundary_distance(const Point& x) const;

  std::string describe() const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain(int dim, std::array<double, 2> lo, std::array<double, 2> hi);

  int dim_;
  std::array<double, 2> lo_;
  std::array<double, 2> hi_;
};

inline double boundary_distance(const Domain& domain, const Point& x) {
  return domain.boundary_distance(x);
}

/// Uniform grid of interior nodes, n per axis, spacing h = length / (n + 1).
/// Nodes are numbered with the first axis fastest: index = i + n * j.
class Grid {
 public:
  Grid(Domain domain, int n_per_axis);

  const Domain& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim(); }
  int n_per_axis() const noexcept { return n_; }
  std::size_t size() const noexcept;
  double spacing(int axis) const { return h_.at(static_cast<std::size_t>(axis)); }
  double cell_volume() const noexcept;

  /// Coordinate of interior node i (0-based) along an axis.
  double coordinate(int axis, int i) const;
  Point node(std::size_t index) const;
  std::array<int, 2> multi_index(std::size_t index) const;
  std::size_t flat_index(int i, int j = 0) const;

  /// Node closest to x, clamped to the interior index range.
  std::size_t nearest_node(const Point& x) const;
  double node_boundary_distance(std::size_t index) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Domain domain_;
  int n_;
  std::array<double, 2> h_{};
};

}  // namespace hkb
