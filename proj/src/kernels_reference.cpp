#include <unsupported/Eigen/KroneckerProduct>

#include "rgfi/kernels.hpp"

namespace rgfi::reference {

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Matrix assemble_step1_system(const Matrix& gram, std::span<const kernels::CommuteTerm> terms) {
  const Index n = gram.rows();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix a = kron(gram, eye);
  for (const auto& t : terms) {
    const Matrix& b = *t.b;
    const Matrix bt = b.transpose();
    a += t.weight * (kron(b * bt, eye) + kron(eye, bt * b) - kron(bt, bt) - kron(b, b));
  }
  return a;
}

Matrix commutator_operator(const Matrix& b) {
  const Matrix eye = Matrix::Identity(b.rows(), b.cols());
  return kron(b.transpose(), eye) - kron(eye, b);
}

void serial_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace rgfi::reference
