#pragma once

#include <Eigen/Dense>

namespace hkb::detail {

/// All eigenvalues (ascending) and, optionally, orthonormal eigenvectors of a
/// dense symmetric matrix, via LAPACK dsyevr. Returned pairs are spot-checked
/// and Eigen's solver takes over when they fail. Only the lower triangle is
/// read; the input is overwritten.
struct DenseEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

DenseEigen symmetric_eigen(Eigen::MatrixXd& a, bool want_vectors);

}  // namespace hkb::detail
