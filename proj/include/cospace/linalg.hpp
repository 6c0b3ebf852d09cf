#pragma once

#include <cmath>
#include <string>

#include "cospace/types.hpp"

namespace cospace {

// Flips each row so its first entry with |x| > tol is positive.
inline void canonicalize_row_signs(Matrix& rows, double tol = 1e-12) {
  for (Index i = 0; i < rows.rows(); ++i) {
    for (Index j = 0; j < rows.cols(); ++j) {
      if (std::abs(rows(i, j)) > tol) {
        if (rows(i, j) < 0.0) rows.row(i) *= -1.0;
        break;
      }
    }
  }
}

// Solves A X = B for symmetric positive definite A.
inline Matrix spd_solve(const Matrix& a, const Matrix& b, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-15)) {
    throw NumericalError(std::string(what) + ": system matrix is not numerically positive definite");
  }
  Matrix x = llt.solve(b);
  if (!x.allFinite()) throw NumericalError(std::string(what) + ": solution is not finite");
  return x;
}

}  // namespace cospace
