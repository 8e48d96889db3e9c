#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "rgfi/graph.hpp"

// Dense data-parallel kernels shared by the solvers. Each kernel has an
// OpenMP implementation here and a serial reference in rgfi::reference that
// is built from explicit Kronecker products; the tests check that both agree
// and bench/ times them against each other.

namespace rgfi::kernels {

/// Weighted commutator penalty w * ||B H - H B||_F^2 seen as a quadratic in
/// vec(H).
struct CommuteTerm {
  const Matrix* b;
  double weight;
};

/// N^2 x N^2 normal-equation matrix of
///   ||Y - H X||_F^2 + sum_k w_k ||B_k H - H B_k||_F^2,
/// i.e. (X X^T (x) I) + sum_k w_k (B B^T (+) B^T B - B^T (x) B^T - B (x) B),
/// from the Gram matrix X X^T.
Matrix assemble_step1_system(const Matrix& gram, std::span<const CommuteTerm> terms);

/// Number of threads a loop of `work` independent units should use.
int threads_for(std::size_t work);

/// Runs body(i) for i in [0, count) on the OpenMP pool. Exceptions thrown by
/// the body are captured and the first one is rethrown after the loop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rgfi::kernels

namespace rgfi::reference {

Matrix kron(const Matrix& a, const Matrix& b);

/// Serial counterpart of kernels::assemble_step1_system.
Matrix assemble_step1_system(const Matrix& gram, std::span<const kernels::CommuteTerm> terms);

/// Dense B^T (x) I - I (x) B, the operator mapping vec(S) to vec(S B - B S).
Matrix commutator_operator(const Matrix& b);

/// Serial loop with the same contract as kernels::parallel_for.
void serial_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rgfi::reference
