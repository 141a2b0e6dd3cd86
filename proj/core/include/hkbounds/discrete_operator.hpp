#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <string>

#include "hkbounds/domain.hpp"

namespace hkb {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Scalar coefficient a(x) multiplying the top-order form, with a label for reports.
struct Coefficient {
  std::function<double(const Point&)> fn;
  std::string name;

  double operator()(const Point& x) const { return fn(x); }

  static Coefficient constant(double value);
  /// a(x) = mid + amp * prod_k sin(2 pi freq x_k); values stay in [lo, hi].
  static Coefficient oscillatory(double lo, double hi, double freq);
};

/// Order-2m operator H with form Q(f) = int a(x) sum_axis |d^m f / dx_axis^m|^2.
struct OperatorSpec {
  int m = 1;
  int dim = 1;
  Coefficient coeff = Coefficient::constant(1.0);
};

/// Discrete stand-in for the form Q on W^{m,2}_0 and the L^2 inner product.
///
/// The stiffness form is assembled "form first": m-fold forward differences of
/// the grid function extended by zero outside the domain, weighted by a(x) at
/// the stencil midpoint and by the cell volume, then the adjoint product
/// K = sum_axis D_axis^T W D_axis. Zero extension makes the clamped conditions
/// (f and its first m-1 derivatives vanish on the boundary) implicit. The mass
/// form is diagonal, h^N on every node.
class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, OperatorSpec spec, SparseMatrix stiffness, Vector mass);

  const Grid& grid() const noexcept { return grid_; }
  const OperatorSpec& spec() const noexcept { return spec_; }
  const SparseMatrix& stiffness() const noexcept { return stiffness_; }
  /// Diagonal of the mass matrix.
  const Vector& mass() const noexcept { return mass_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(mass_.size()); }

  double stiffness_form(const Vector& f, const Vector& g) const;
  double mass_form(const Vector& f, const Vector& g) const;

  /// Smallest and largest sampled coefficient value.
  double coeff_min() const noexcept { return coeff_min_; }
  double coeff_max() const noexcept { return coeff_max_; }

 private:
  void check_size(const Vector& f) const;

  Grid grid_;
  OperatorSpec spec_;
  SparseMatrix stiffness_;
  Vector mass_;
  double coeff_min_ = 0.0;
  double coeff_max_ = 0.0;

  friend DiscreteOperator build_operator(const OperatorSpec&, const Grid&);
};

DiscreteOperator build_operator(const OperatorSpec& spec, const Grid& grid);

/// Q(f) = stiffness(f, f).
double quadratic_form(const DiscreteOperator& op, const Vector& f);

/// Samples f at every grid node.
Vector sample(const Grid& grid, const std::function<double(const Point&)>& f);

struct EllipticityConstants {
  double c_low = 0.0;
  double c_high = 0.0;
  /// max(c_high, 1 / c_low): c^{-1} Q_ref <= Q <= c Q_ref.
  double c = 0.0;
};

/// Extreme generalized eigenvalues of (op.stiffness, reference.stiffness).
/// The reference must be the same-grid operator with a = 1.
EllipticityConstants ellipticity_constants(const DiscreteOperator& op,
                                           const DiscreteOperator& reference);

}  // namespace hkb
