#pragma once

#include "robustpr/signal.hpp"

namespace robustpr {

struct SymmetricEigen {
  RealVector values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< column k pairs with values[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix. Sweeps until the
/// off-diagonal Frobenius norm drops below tol * ||A||_F (or max_sweeps).
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-15, int max_sweeps = 100);

/// Largest |eigenvalue| of a symmetric matrix.
double symmetric_spectral_norm(const Eigen::MatrixXd& a);

}  // namespace robustpr
