#include "rgfi/linalg.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace rgfi {

LeastSquares pinv_solve(const Matrix& a, const Vector& b, double rcond) {
  if (a.rows() != b.size()) throw std::invalid_argument("pinv_solve: dimension mismatch");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rcond);
  LeastSquares out;
  out.x = svd.solve(b);
  out.rank = svd.rank();
  out.rank_deficient = out.rank < std::min(a.rows(), a.cols());
  return out;
}

Index psd_rank(const Matrix& a, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0;
  return (ev.array() > rel_tol * top).count();
}

}  // namespace rgfi
