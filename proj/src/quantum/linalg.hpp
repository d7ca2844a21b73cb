#pragma once

#include <Eigen/Dense>

namespace tcsim::quantum::detail {

struct HermitianEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};
HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& matrix);

/// Complex Schur factorization A = Z T Z^H. For a normal (e.g. unitary)
/// matrix T is diagonal and the columns of Z are orthonormal eigenvectors.
struct SchurForm {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd vectors;
  double off_diagonal = 0.0;  // max |T_ij|, i != j
};
SchurForm complex_schur(const Eigen::MatrixXcd& matrix);

}  // namespace tcsim::quantum::detail
