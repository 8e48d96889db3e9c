#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rgfi/graph.hpp"

namespace rgfi {

/// Sparse storage of the columns of Sigma = B^T (+) (-B) = B^T (x) I - I (x) B
/// restricted to off-diagonal entries of S. Sigma maps vec(S) to
/// vec(S B - B S), and column (i,j) has its support on row i and column j of
/// the N x N residual, so it holds at most 2N - 1 stored entries.
///
/// With `symmetric_pairs` each variable is an unordered pair {i,j} (i < j)
/// and its column is sigma_(i,j) + sigma_(j,i).
///
/// Variables are ordered row-major over the off-diagonal entries.
class SparseKronColumns {
 public:
  SparseKronColumns(const Matrix& b, bool symmetric_pairs);

  Index n() const { return n_; }
  Index size() const { return static_cast<Index>(vars_.size()); }
  bool symmetric_pairs() const { return sym_; }
  const Link& variable(Index v) const { return vars_[static_cast<std::size_t>(v)]; }

  std::span<const Index> rows(Index v) const {
    return {rows_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  std::span<const double> values(Index v) const {
    return {vals_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  double squared_norm(Index v) const { return norms_[static_cast<std::size_t>(v)]; }

  /// sigma_v^T r
  double dot(Index v, const Vector& r) const;
  /// r += alpha * sigma_v
  void axpy(Index v, double alpha, Vector& r) const;

  /// N^2 x size() dense reconstruction.
  Matrix dense() const;

 private:
  Index n_;
  bool sym_;
  std::vector<Link> vars_;
  std::vector<Index> offsets_;
  std::vector<Index> rows_;
  std::vector<double> vals_;
  std::vector<double> norms_;
};

inline SparseKronColumns build_sigma_columns(const Matrix& h, bool symmetric_pairs = false) {
  return SparseKronColumns(h, symmetric_pairs);
}

/// Scalar data of one coordinate update: the minimized function is
///   prox_weight * |s - s_bar| + sparsity_weight * s + curvature * s^2 + 2 * linear * s
/// over s >= 0. For a single commutator block, curvature = gamma sigma^T sigma
/// and linear = gamma sigma^T r with r the residual of all other coordinates.
struct CoordTerms {
  double s_bar = 0.0;
  double prox_weight = 0.0;
  double sparsity_weight = 0.0;
  double curvature = 0.0;
  double linear = 0.0;

  double objective(double s) const;
};

/// Exact minimizer (projected soft-thresholding). A zero curvature falls back
/// to the piecewise-linear minimizer: s_bar when prox_weight >= sparsity_weight,
/// else 0.
double coord_update(const CoordTerms& t);

/// Same update from the raw quantities of a single block.
double coord_update(double s_bar, const Vector& sigma, const Vector& r, double omega,
                    double omega_bar, double lambda, double beta, double gamma);

/// One quadratic block weight * ||Sigma_B vec(S)||^2 of the denoising cost.
struct QuadraticBlock {
  double weight;
  Matrix b;
  SparseKronColumns columns;

  QuadraticBlock(double w, Matrix mat, bool symmetric_pairs)
      : weight(w), b(std::move(mat)), columns(b, symmetric_pairs) {}
};

/// Reweighted-l1 denoising problem over the adjacency set:
///   sum_ij lambda W1_ij |S_ij - Sbar_ij| + beta W2_ij |S_ij|
///     + sum_b weight_b ||S B_b - B_b S||_F^2,  S >= 0, diag(S) = 0.
struct DenoiseProblem {
  Matrix sbar;
  Matrix prox_weights;      // W1 (Omega-bar)
  Matrix sparsity_weights;  // W2 (Omega)
  double lambda = 0.0;
  double beta = 0.0;
  bool symmetric = false;
  std::vector<QuadraticBlock> blocks;

  double objective(const Matrix& s) const;
};

struct CdOptions {
  int max_sweeps = 1000;
  /// stop when no entry moved by more than this in a sweep
  double change_tol = 1e-9;
  /// stop when the relative objective decrease over a sweep falls below this; 0 disables
  double rel_objective_tol = 0.0;
  /// called after every coordinate update with the current iterate (tests only)
  std::function<void(const Matrix&)> on_update;
};

struct CdOutcome {
  Matrix s;
  int sweeps = 0;
  bool converged = false;
  std::vector<Vector> residuals;  // Sigma_b vec(S) per block, maintained incrementally
};

/// Projected cyclic coordinate descent. `s_init` must be feasible.
CdOutcome denoise_coord_descent(const DenoiseProblem& problem, const Matrix& s_init,
                                const CdOptions& options);

}  // namespace rgfi
