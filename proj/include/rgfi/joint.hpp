#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgfi/solver.hpp"

namespace rgfi {

/// K input/output pairs observed through filters on a common graph.
struct MultiSignalSet {
  std::vector<Matrix> xs;
  std::vector<Matrix> ys;
  std::vector<double> alpha;  // empty means all ones

  Index k() const { return static_cast<Index>(xs.size()); }
  void validate(Index n) const;
  double alpha_at(std::size_t k) const { return alpha.empty() ? 1.0 : alpha[k]; }
};

struct JointResult {
  std::vector<Matrix> filters;
  Gso s_hat;
  std::vector<IterationRecord> trace;
  bool converged = false;
};

/// sum_k alpha_k ||Y_k - H_k X_k||^2 + penalties on S + gamma sum_k ||S H_k - H_k S||^2
double joint_objective(const MultiSignalSet& data, const std::vector<Matrix>& filters, const Matrix& s,
                       const Matrix& sbar, const SolverConfig& config, double gamma);

/// Shared-graph identification of K filters. Each filter step solves
/// rfi_step1 with gamma / alpha_k; the denoising step sums the K commutator
/// blocks with the common gamma.
JointResult joint_rfi(const MultiSignalSet& data, const Gso& sbar, const SolverConfig& config);

// ---------------------------------------------------------------------------
// Autoregressive time series  Y_t = sum_{k=1..K} H_k Y_{t-k} + X_t + W_t

struct ArSeries {
  std::vector<Matrix> ys;                 // kappa_max snapshots, N x M each
  std::optional<std::vector<Matrix>> xs;  // exogenous inputs, same shapes
  Index order = 1;                        // memory K

  void validate() const;
  Index n() const { return ys.empty() ? 0 : ys.front().rows(); }
};

struct ArOptions {
  /// true uses the previous iterates for every k (parallel update) instead
  /// of the cyclic Gauss-Seidel order k = 1..K
  bool jacobi = false;
  /// number of passes over k in each filter step
  int passes = 1;
};

/// sum_{t=K}^{kappa_max-1} ||Y_t - X_t - sum_k H_k Y_{t-k}||^2
double ar_fit_cost(const ArSeries& series, const std::vector<Matrix>& filters);

double ar_objective(const ArSeries& series, const std::vector<Matrix>& filters, const Matrix& s,
                    const Matrix& sbar, const SolverConfig& config, double gamma);

JointResult ar_rfi(const ArSeries& series, const Gso& sbar, const SolverConfig& config,
                   const ArOptions& options = {});

/// Unconstrained least-squares AR fit of all H_k at once (no graph prior).
std::vector<Matrix> ar_least_squares(const ArSeries& series);

/// Iterates y_t = sum_k H_k y_{t-k} (+ x_t) for `steps` steps. `history`
/// holds at least K snapshots in chronological order; predictions are fed
/// back for multi-step horizons. Returns the `steps` predictions.
std::vector<Matrix> ar_predict(const std::vector<Matrix>& filters, const std::vector<Matrix>& history,
                               int steps, const std::vector<Matrix>* exogenous = nullptr);

struct ArSynthesis {
  ArSeries series;
  std::vector<Matrix> filters;
};

/// Stable AR(K) data on `s`: H_k = c * sum_r h_kr S^r with random h_k and c
/// scaling sum_k ||H_k||_2 to `radius`. Every step is driven by N(0, I)
/// inputs; with `exogenous` they are returned as X_t, otherwise they act
/// as unobserved innovations. The first `burn_in` snapshots are discarded.
ArSynthesis synthesize_ar(const Matrix& s, Index order, Index filter_order, Index kappa_max, Index m,
                          bool exogenous, std::uint64_t seed, double radius = 0.9, Index burn_in = 50);

}  // namespace rgfi
