#include "hkbounds/spectral.hpp"

#include <lapacke.h>

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hkbounds/detail/dense_eigen.hpp"
#include "hkbounds/errors.hpp"

namespace hkb {

namespace detail {

namespace {

// Residual and orthonormality of a spread of returned pairs. Some optimized
// BLAS builds corrupt the back-transformation while the eigenvalues stay right.
bool pairs_look_sane(const Eigen::MatrixXd& a, const DenseEigen& e) {
  const Eigen::Index n = a.rows();
  if (n == 0) return true;
  const double scale = std::max(std::abs(e.values(0)), std::abs(e.values(n - 1)));
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < n; i += std::max<Eigen::Index>(1, n / 48)) cols.push_back(i);
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(n, 16); ++i) cols.push_back(i);
  cols.push_back(n - 1);
  for (Eigen::Index c : cols) {
    const auto z = e.vectors.col(c);
    if (!(std::abs(z.norm() - 1.0) <= 1e-8)) return false;
    const double res = (a.selfadjointView<Eigen::Lower>() * z - e.values(c) * z).norm();
    if (!(res <= 1e-10 * scale * std::sqrt(static_cast<double>(n)))) return false;
    if (c > 0 && !(std::abs(e.vectors.col(c - 1).dot(z)) <= 1e-8)) return false;
  }
  return true;
}

}  // namespace

DenseEigen symmetric_eigen(Eigen::MatrixXd& a, bool want_vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  DenseEigen out;
  out.values.resize(n);
  if (want_vectors) out.vectors.resize(n, n);
  const Eigen::MatrixXd original = want_vectors ? a : Eigen::MatrixXd();
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
  lapack_int found = 0;
  double dummy = 0.0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', 'L', n, a.data(), n, 0.0, 0.0, 0, 0, 0.0,
                     &found, out.values.data(), want_vectors ? out.vectors.data() : &dummy, want_vectors ? n : 1,
                     support.data());
  if (info == 0 && found == n && (!want_vectors || pairs_look_sane(original, out))) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      want_vectors ? original : a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NonConvergence("dense symmetric eigensolver failed");
  out.values = solver.eigenvalues();
  if (want_vectors) out.vectors = solver.eigenvectors();
  return out;
}

}  // namespace detail

namespace {

// Dense solvers resolve eigenvectors only to about eps |K| / gap, which for
// m >= 2 leaves the lowest modes accurate to ~1e-8. Two steps of block inverse
// iteration with the sparse factor of K, followed by Rayleigh-Ritz, bring the
// lowest modes to working precision relative to their own eigenvalues.
void polish_low_modes(const DiscreteOperator& op, Vector& values, Eigen::MatrixXd& vectors) {
  const Eigen::Index n = vectors.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, 48);
  Eigen::Index keep = block == n ? n : std::min<Eigen::Index>(block, 32);
  // Never split a (near-)degenerate eigenspace between refined and untouched vectors.
  while (keep > 0 && keep < n && values(keep) - values(keep - 1) <= 1e-6 * std::abs(values(keep))) --keep;
  if (keep == 0) return;
  Eigen::SimplicialLDLT<SparseMatrix> factor(op.stiffness());
  if (factor.info() != Eigen::Success) return;
  Eigen::MatrixXd x = vectors.leftCols(block);
  Vector theta;
  for (int step = 0; step < 2; ++step) {
    const Eigen::MatrixXd y = factor.solve(op.mass().asDiagonal() * x);
    Eigen::MatrixXd kr = y.transpose() * (op.stiffness() * y);
    Eigen::MatrixXd mr = y.transpose() * (op.mass().asDiagonal() * y);
    kr = 0.5 * (kr + kr.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(kr, mr);
    if (ritz.info() != Eigen::Success) return;
    x = y * ritz.eigenvectors();
    theta = ritz.eigenvalues();
  }
  values.head(keep) = theta.head(keep);
  vectors.leftCols(keep) = x.leftCols(keep);
}

SpectralDecomposition dense_decomposition(const DiscreteOperator& op, std::optional<std::size_t> count) {
  const Vector inv_sqrt_mass = op.mass().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd a = inv_sqrt_mass.asDiagonal() * Eigen::MatrixXd(op.stiffness()) * inv_sqrt_mass.asDiagonal();
  auto eig = detail::symmetric_eigen(a, true);
  eig.vectors = inv_sqrt_mass.asDiagonal() * eig.vectors;
  polish_low_modes(op, eig.values, eig.vectors);
  const auto keep = static_cast<Eigen::Index>(count ? std::min(*count, op.size()) : op.size());
  SpectralDecomposition sd{eig.values.head(keep),
                           eig.vectors.leftCols(keep),
                           op.mass(),
                           op.grid(),
                           keep == static_cast<Eigen::Index>(op.size())};
  return sd;
}

SpectralDecomposition subspace_iteration(const DiscreteOperator& op, std::size_t count, const EigenOptions& opt) {
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto want = static_cast<Eigen::Index>(count);
  const auto block = std::min<Eigen::Index>(n, want + opt.guard_vectors);

  SparseMatrix shifted = op.stiffness();
  if (opt.shift != 0.0) {
    SparseMatrix m(n, n);
    m.setIdentity();
    shifted -= opt.shift * SparseMatrix(op.mass().asDiagonal() * m);
  }
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) throw NonConvergence("shift-invert factorization failed");

  // Rounding in K*x alone is of order eps*|K|*|x|, which for high-order
  // operators on fine grids dwarfs tolerance*lambda*|Mx|.
  double k_norm = 0.0;
  for (Eigen::Index c = 0; c < op.stiffness().outerSize(); ++c) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(op.stiffness(), c); it; ++it) col += std::abs(it.value());
    k_norm = std::max(k_norm, col);
  }

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const Eigen::MatrixXd y = factor.solve(op.mass().asDiagonal() * x);
    const Eigen::MatrixXd ky = op.stiffness() * y;
    const Eigen::MatrixXd my = op.mass().asDiagonal() * y;
    Eigen::MatrixXd kr = y.transpose() * ky;
    Eigen::MatrixXd mr = y.transpose() * my;
    kr = 0.5 * (kr + kr.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(kr, mr);
    if (ritz.info() != Eigen::Success) throw NonConvergence("Rayleigh-Ritz projection failed");
    x = y * ritz.eigenvectors();
    const Vector& theta = ritz.eigenvalues();

    bool converged = true;
    for (Eigen::Index j = 0; j < want && converged; ++j) {
      const Vector mx = op.mass().cwiseProduct(x.col(j));
      const double res = (op.stiffness() * x.col(j) - theta(j) * mx).norm();
      const double floor = 8.0 * std::numeric_limits<double>::epsilon() * k_norm * x.col(j).norm();
      converged = res <= std::max(opt.tolerance * std::abs(theta(j)) * mx.norm(), floor);
    }
    if (converged) {
      return SpectralDecomposition{theta.head(want), x.leftCols(want), op.mass(), op.grid(), want == n};
    }
  }
  throw NonConvergence("shift-invert subspace iteration did not converge in " + std::to_string(opt.max_iterations) +
                       " iterations");
}

}  // namespace

SpectralDecomposition eigendecompose(const DiscreteOperator& op, std::optional<std::size_t> count,
                                     const EigenOptions& options) {
  if (count && (*count == 0 || *count > op.size())) {
    throw InvalidArgument("eigendecompose: count must lie in [1, grid size]");
  }
  // Partial spectra only pay off when the block is small relative to the grid.
  if (!count || 4 * (*count + static_cast<std::size_t>(options.guard_vectors)) >= op.size()) {
    return dense_decomposition(op, count);
  }
  return subspace_iteration(op, *count, options);
}

double spectral_gap(const SpectralDecomposition& sd) {
  if (sd.count() == 0) throw InvalidArgument("spectral_gap: empty decomposition");
  return sd.eigenvalues(0);
}

double eigen_residual(const DiscreteOperator& op, const SpectralDecomposition& sd, std::size_t n) {
  const Vector psi = sd.eigenvectors.col(static_cast<Eigen::Index>(n));
  const double lambda = sd.lambda(n);
  return (op.stiffness() * psi - lambda * op.mass().cwiseProduct(psi)).norm() / lambda;
}

}  // namespace hkb
