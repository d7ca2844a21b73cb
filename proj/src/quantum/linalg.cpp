#include "linalg.hpp"

#include <complex>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include "tcsim/core/errors.hpp"

namespace tcsim::quantum::detail {

HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& matrix) {
  const auto n = static_cast<lapack_int>(matrix.rows());
  HermitianEigen out;
  out.vectors = matrix;
  out.values.resize(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n,
                                         out.values.data());
  if (info != 0) throw NumericalError("zheevd failed with info " + std::to_string(info));
  return out;
}

SchurForm complex_schur(const Eigen::MatrixXcd& matrix) {
  const auto n = static_cast<lapack_int>(matrix.rows());
  Eigen::MatrixXcd t = matrix;
  SchurForm out;
  out.eigenvalues.resize(n);
  out.vectors.resize(n, n);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, t.data(), n, &sdim,
                    out.eigenvalues.data(), out.vectors.data(), n);
  if (info != 0) throw NumericalError("zgees failed with info " + std::to_string(info));
  for (lapack_int j = 0; j < n; ++j)
    for (lapack_int i = 0; i < j; ++i) out.off_diagonal = std::max(out.off_diagonal, std::abs(t(i, j)));
  return out;
}

}  // namespace tcsim::quantum::detail
