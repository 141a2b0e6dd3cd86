#pragma once

#include <cstddef>
#include <optional>

#include "hkbounds/discrete_operator.hpp"

namespace hkb {

/// Lowest eigenpairs of stiffness psi = lambda mass psi.
///
/// Eigenvectors are nodal values normalized so that mass(psi_i, psi_j) = delta_ij.
/// Because the mass form is h^N times the identity, these nodal values are
/// directly the samples of the L^2(Omega)-normalized eigenfunctions; no
/// conversion is needed to compare with continuum formulas.
struct SpectralDecomposition {
  Vector eigenvalues;            ///< ascending
  Eigen::MatrixXd eigenvectors;  ///< column n is psi_n
  Vector mass;                   ///< diagonal mass of the source operator
  Grid grid;
  bool complete = false;         ///< every eigenpair of the discrete operator is present

  std::size_t count() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  double lambda(std::size_t n) const { return eigenvalues(static_cast<Eigen::Index>(n)); }
  double psi(std::size_t n, std::size_t node) const {
    return eigenvectors(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(n));
  }
};

struct EigenOptions {
  int max_iterations = 300;
  double tolerance = 1e-9;  ///< relative residual for the shift-invert iteration, floored at rounding level
  int guard_vectors = 8;    ///< extra block vectors beyond the requested count
  double shift = 0.0;
};

/// Full decomposition (count empty) by dense symmetric reduction; partial
/// decompositions use a shift-invert block subspace iteration with
/// Rayleigh-Ritz projection. Throws NonConvergence past the iteration cap.
SpectralDecomposition eigendecompose(const DiscreteOperator& op, std::optional<std::size_t> count = std::nullopt,
                                     const EigenOptions& options = {});

/// mu = lambda_0, the infimum of Q(f) / |f|^2.
double spectral_gap(const SpectralDecomposition& sd);

/// |stiffness psi_n - lambda_n mass psi_n| / lambda_n in the Euclidean norm.
double eigen_residual(const DiscreteOperator& op, const SpectralDecomposition& sd, std::size_t n);

}  // namespace hkb
