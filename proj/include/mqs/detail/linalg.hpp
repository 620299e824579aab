#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <complex>
#include <string>
#include <vector>

#include "mqs/error.hpp"

// Complex drivers only: the real ones and zheevd route through dgemm, which some OpenBLAS
// AVX-512 kernels get wrong.

namespace mqs::detail {

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXcd vectors;
};

inline void check_info(lapack_int info, const char* routine) {
  if (info != 0) throw Error(std::string(routine) + " failed, info=" + std::to_string(info));
}

inline lapack_complex_double* lp(Eigen::MatrixXcd& m) { return reinterpret_cast<lapack_complex_double*>(m.data()); }

inline EigenDecomposition hermitian_eigen(Eigen::MatrixXcd a, bool vectors = true) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EigenDecomposition out;
  out.values.resize(n);
  if (n == 0) return out;
  if (vectors) out.vectors.resize(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  Eigen::MatrixXcd dummy(1, 1);
  check_info(LAPACKE_zheevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'A', 'L', n, lp(a), n, 0.0, 0.0, 0, 0, 0.0,
                            &found, out.values.data(), vectors ? lp(out.vectors) : lp(dummy), n, support.data()),
             "zheevr");
  if (found != n) throw Error("zheevr returned " + std::to_string(found) + " of " + std::to_string(n) + " eigenvalues");
  return out;
}

inline Eigen::VectorXd hermitian_eigenvalues(Eigen::MatrixXcd a) { return hermitian_eigen(std::move(a), false).values; }

inline Eigen::VectorXd singular_values(Eigen::MatrixXcd a) {
  const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd s(std::min(m, n));
  if (m > 0 && n > 0)
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, lp(a), m, s.data(), nullptr, 1, nullptr, 1), "zgesdd");
  return s;
}

}  // namespace mqs::detail
