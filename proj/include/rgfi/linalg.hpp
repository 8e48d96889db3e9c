#pragma once

#include "rgfi/graph.hpp"

namespace rgfi {

/// Relative singular-value cutoff used by every pseudoinverse in the library.
inline constexpr double kPinvRcond = 1e-10;

struct LeastSquares {
  Vector x;
  Index rank = 0;
  bool rank_deficient = false;
};

/// Minimum-norm solution of min ||A x - b|| through an SVD whose singular
/// values below rcond * sigma_max are discarded.
LeastSquares pinv_solve(const Matrix& a, const Vector& b, double rcond = kPinvRcond);

/// Numerical rank of a symmetric positive-semidefinite matrix: eigenvalues
/// above rel_tol * lambda_max.
Index psd_rank(const Matrix& a, double rel_tol = 1e-10);

/// Column-major vectorization.
inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }
inline Matrix unvec(const Vector& v, Index rows) {
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

}  // namespace rgfi
