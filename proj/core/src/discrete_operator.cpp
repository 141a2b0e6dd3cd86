#include "hkbounds/discrete_operator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hkbounds/detail/dense_eigen.hpp"
#include "hkbounds/errors.hpp"

namespace hkb {

Coefficient Coefficient::constant(double value) {
  return {[value](const Point&) { return value; }, "constant:" + std::to_string(value)};
}

Coefficient Coefficient::oscillatory(double lo, double hi, double freq) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("oscillatory coefficient needs 0 < lo <= hi");
  const double mid = 0.5 * (lo + hi);
  const double amp = 0.5 * (hi - lo);
  return {[=](const Point& x) {
            const double w = 2.0 * std::numbers::pi * freq;
            return mid + amp * std::sin(w * x[0]) * std::sin(w * x[1] + std::numbers::pi / 2.0);
          },
          "oscillatory:" + std::to_string(lo) + "," + std::to_string(hi) + "," + std::to_string(freq)};
}

DiscreteOperator::DiscreteOperator(Grid grid, OperatorSpec spec, SparseMatrix stiffness, Vector mass)
    : grid_(std::move(grid)), spec_(std::move(spec)), stiffness_(std::move(stiffness)), mass_(std::move(mass)) {}

void DiscreteOperator::check_size(const Vector& f) const {
  if (static_cast<std::size_t>(f.size()) != size()) {
    throw InvalidArgument("grid function has " + std::to_string(f.size()) + " values, grid has " +
                          std::to_string(size()) + " nodes");
  }
}

double DiscreteOperator::stiffness_form(const Vector& f, const Vector& g) const {
  check_size(f);
  check_size(g);
  return f.dot(stiffness_ * g);
}

double DiscreteOperator::mass_form(const Vector& f, const Vector& g) const {
  check_size(f);
  check_size(g);
  // f_i g_i first so the form is symmetric bit for bit
  return f.cwiseProduct(g).dot(mass_);
}

namespace {

std::vector<double> difference_stencil(int m, double h) {
  std::vector<double> c(static_cast<std::size_t>(m) + 1);
  double binom = 1.0;
  const double scale = std::pow(h, -m);
  for (int k = 0; k <= m; ++k) {
    c[static_cast<std::size_t>(k)] = ((m - k) % 2 == 0 ? 1.0 : -1.0) * binom * scale;
    binom = binom * (m - k) / (k + 1);
  }
  return c;
}

}  // namespace

DiscreteOperator build_operator(const OperatorSpec& spec, const Grid& grid) {
  if (spec.m < 1) throw InvalidArgument("operator half-order m must be positive");
  if (spec.dim != grid.dim()) throw InvalidArgument("operator dimension does not match grid");
  if (2 * spec.m <= spec.dim) throw InvalidArgument("operator order 2m must exceed the dimension N");
  if (grid.n_per_axis() < 2 * spec.m + 1) {
    throw InvalidArgument("grid needs at least 2m+1 interior nodes per axis for the difference stencil");
  }
  if (!spec.coeff.fn) throw InvalidArgument("operator coefficient is empty");

  const int n = grid.n_per_axis();
  const int m = spec.m;
  const int lines = grid.dim() == 2 ? n : 1;
  const double vol = grid.cell_volume();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(grid.dim()) * static_cast<std::size_t>(lines) *
                   static_cast<std::size_t>(n + m) * static_cast<std::size_t>((m + 1) * (m + 1)));

  double a_min = std::numeric_limits<double>::infinity();
  double a_max = 0.0;

  for (int axis = 0; axis < grid.dim(); ++axis) {
    const double h = grid.spacing(axis);
    const auto stencil = difference_stencil(m, h);
    for (int line = 0; line < lines; ++line) {
      for (int s = -m; s <= n - 1; ++s) {
        // stencil covers interior positions s..s+m along this axis
        Point mid{};
        const double along = grid.domain().lower(axis) + (s + 1 + 0.5 * m) * h;
        if (grid.dim() == 1) {
          mid = {along, 0.0};
        } else if (axis == 0) {
          mid = {along, grid.coordinate(1, line)};
        } else {
          mid = {grid.coordinate(0, line), along};
        }
        const double a = spec.coeff(mid);
        if (!(a > 0.0) || !std::isfinite(a)) {
          throw InvalidArgument("coefficient must be positive and finite; got " + std::to_string(a));
        }
        a_min = std::min(a_min, a);
        a_max = std::max(a_max, a);
        const double w = a * vol;
        for (int k1 = 0; k1 <= m; ++k1) {
          const int p1 = s + k1;
          if (p1 < 0 || p1 >= n) continue;
          const auto i1 = axis == 0 ? grid.flat_index(p1, grid.dim() == 2 ? line : 0) : grid.flat_index(line, p1);
          for (int k2 = 0; k2 <= m; ++k2) {
            const int p2 = s + k2;
            if (p2 < 0 || p2 >= n) continue;
            const auto i2 = axis == 0 ? grid.flat_index(p2, grid.dim() == 2 ? line : 0) : grid.flat_index(line, p2);
            triplets.emplace_back(static_cast<int>(i1), static_cast<int>(i2),
                                  w * stencil[static_cast<std::size_t>(k1)] * stencil[static_cast<std::size_t>(k2)]);
          }
        }
      }
    }
  }

  const auto size = static_cast<Eigen::Index>(grid.size());
  SparseMatrix stiffness(size, size);
  stiffness.setFromTriplets(triplets.begin(), triplets.end());
  stiffness.makeCompressed();
  Vector mass = Vector::Constant(size, vol);

  DiscreteOperator op(grid, spec, std::move(stiffness), std::move(mass));
  op.coeff_min_ = a_min;
  op.coeff_max_ = a_max;
  return op;
}

double quadratic_form(const DiscreteOperator& op, const Vector& f) { return op.stiffness_form(f, f); }

Vector sample(const Grid& grid, const std::function<double(const Point&)>& f) {
  Vector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v(static_cast<Eigen::Index>(i)) = f(grid.node(i));
  return v;
}

EllipticityConstants ellipticity_constants(const DiscreteOperator& op, const DiscreteOperator& reference) {
  if (!(op.grid() == reference.grid()) || op.spec().m != reference.spec().m) {
    throw InvalidArgument("ellipticity_constants: reference operator must share grid and order");
  }
  // Generalized problem K v = c K_ref v reduced with the Cholesky factor of K_ref.
  const Eigen::MatrixXd ref = Eigen::MatrixXd(reference.stiffness());
  Eigen::LLT<Eigen::MatrixXd> llt(ref);
  if (llt.info() != Eigen::Success) throw InvalidArgument("reference stiffness is not positive definite");
  Eigen::MatrixXd c = Eigen::MatrixXd(op.stiffness());
  llt.matrixL().solveInPlace(c);
  c.transposeInPlace();
  llt.matrixL().solveInPlace(c);
  const auto eig = detail::symmetric_eigen(c, false);
  EllipticityConstants out;
  out.c_low = eig.values(0);
  out.c_high = eig.values(eig.values.size() - 1);
  out.c = std::max(out.c_high, 1.0 / out.c_low);
  return out;
}

}  // namespace hkb
