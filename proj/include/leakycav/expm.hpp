#pragma once

#include <Eigen/Dense>

namespace leakycav {

// Scaling and squaring around a diagonal Pade approximant of degree
// 3, 5, 7, 9 or 13, picked from the 1-norm (Higham 2005 thresholds).
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& A);

// exp(A) through the eigendecomposition; A must be diagonalizable.
Eigen::MatrixXcd expm_eig(const Eigen::MatrixXd& A);

}  // namespace leakycav
