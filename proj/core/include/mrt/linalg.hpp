#pragma once

#include <Eigen/Dense>

namespace mrt {

struct SymmetricEigen {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< column i pairs with values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Only the upper
/// triangle is read. Throws ComputationError if max_sweeps is exhausted.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& A, double tol = 1e-15, int max_sweeps = 64);

}  // namespace mrt
