#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgfi/graph.hpp"
#include "rgfi/kron_columns.hpp"

namespace rgfi {

/// gamma_t = min(cap, initial * growth^t)
struct GammaSchedule {
  double initial = 1.0;
  double growth = 2.0;
  double cap = 1e4;

  double at(int t) const;
  static GammaSchedule fixed(double gamma) { return {gamma, 1.0, gamma}; }
};

struct SolverConfig {
  double lambda = 1e-3;  // weight of the distance to the observed graph
  double beta = 1e-5;    // sparsity weight
  GammaSchedule gamma;   // commutativity weight
  double delta1 = 1e-3;
  double delta2 = 1e-3;
  int t_max = 20;
  /// early stop once gamma is constant and the relative objective change drops below this
  double rel_tol = 1e-6;
  double inner_tol = 1e-9;
  int inner_max = 1000;
  /// stationarity penalties on the denoising step (Cx, Cy) and on the filter step (Cy)
  double rho_x = 10.0;
  double rho_y = 10.0;
  double rho_h = 0.0;
  /// false freezes the reweighting at all-ones, i.e. plain l1 penalties
  bool reweight = true;
  /// order used by recover_coeffs; 0 means N
  Index filter_order = 0;
  GsoFamily family = GsoFamily::Adjacency;
  bool symmetric = true;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double gamma = 0.0;
  double objective_after_filter = 0.0;  // f(H^(t+1), S^(t))
  double objective = 0.0;               // f(H^(t+1), S^(t+1))
  double step1_ms = 0.0;
  double step2_ms = 0.0;
  int inner_sweeps = 0;
  bool inner_converged = false;
};

/// Timing row of the reduced-complexity solver.
struct PhaseRecord {
  int t = 0;
  std::string phase;  // "filter" or "denoise"
  int inner_iters = 0;
  double wall_ms = 0.0;
  double objective = 0.0;
};

struct RfiResult {
  Matrix h_hat;
  Gso s_hat;
  std::optional<Vector> h_coeffs;
  bool coeffs_rank_deficient = false;
  std::vector<IterationRecord> trace;
  std::vector<PhaseRecord> phases;
  bool converged = false;
};

/// Row-wise CSV of a run: iteration,objective,step1_ms,step2_ms, followed by
/// a blank line and the phase table (t,phase,inner_iters,wall_ms,objective)
/// when the run recorded one.
std::string run_report_csv(const RfiResult& result);

// ---------------------------------------------------------------------------
// Non-robust identification

struct FiResult {
  Vector h;
  bool rank_deficient = false;
};

/// Least-squares filter coefficients of order R with the GSO taken as exact,
/// solved in the graph-frequency domain.
FiResult fi_closed_form(const Matrix& x, const Matrix& y, const Gso& gso, Index order);

/// h = [vec(I), vec(S), ..., vec(S^{R-1})]^+ vec(H)
FiResult recover_coeffs(const Matrix& h, const Matrix& s, Index order);

struct IdentifiabilityReport {
  bool distinct_eigs = false;
  bool excited_frequencies = false;
  double min_gap = 0.0;
  double min_row_energy = 0.0;
};

IdentifiabilityReport identifiability_check(const Matrix& x, const Gso& gso);

// ---------------------------------------------------------------------------
// Robust identification building blocks

/// Extra weighted commutator penalty used by the filter step (stationarity).
struct CommutePenalty {
  Matrix b;
  double weight;
};

/// argmin_H ||Y - H X||_F^2 + gamma ||S H - H S||_F^2 (+ extra penalties),
/// through a Cholesky factorization of the N^2 x N^2 normal equations.
Matrix rfi_step1(const Matrix& x, const Matrix& y, const Matrix& s, double gamma,
                 std::span<const CommutePenalty> extra = {});

struct MmWeights {
  Matrix prox;      // 1 / (|S - Sbar| + delta1)
  Matrix sparsity;  // 1 / (|S| + delta2)
};

MmWeights mm_weights(const Matrix& s, const Matrix& sbar, double delta1, double delta2);
MmWeights unit_weights(Index n);

struct DenoiseStepResult {
  Gso s;
  int sweeps = 0;
  bool converged = false;
};

/// Minimizes the reweighted denoising surrogate over the structural set by
/// coordinate descent started at `s_init` (inner_tol / inner_max from the
/// config). `gamma` weights ||S H - H S||^2; `extra` adds further
/// commutator blocks (stationarity).
DenoiseStepResult denoise_step(std::span<const Matrix> filters, const Matrix& s_init, const Gso& sbar,
                               const MmWeights& weights, const SolverConfig& config, double gamma,
                               std::span<const CommutePenalty> extra = {});
DenoiseStepResult denoise_step(const Matrix& h, const Matrix& s_init, const Gso& sbar,
                               const MmWeights& weights, const SolverConfig& config, double gamma);

/// Builds the denoising surrogate shared by every solver variant.
DenoiseProblem make_denoise_problem(std::span<const Matrix> filters, const Gso& sbar,
                                    const MmWeights& weights, const SolverConfig& config, double gamma,
                                    std::span<const CommutePenalty> extra = {});

/// sum_ij log(|Z_ij| + delta)
double log_penalty(const Matrix& z, double delta);

/// ||Y - HX||^2 + lambda r_d1(S - Sbar) + beta r_d2(S) + gamma ||SH - HS||^2
/// (l1 norms in place of the log penalties when config.reweight is false).
double objective_eval(const Matrix& h, const Matrix& s, const Matrix& x, const Matrix& y,
                      const Matrix& sbar, const SolverConfig& config, double gamma);

/// Penalty part of the objective: the S terms plus gamma * sum_k ||S H_k - H_k S||^2
/// and any extra commutator blocks on S.
double graph_penalty(const Matrix& s, const Matrix& sbar, std::span<const Matrix> filters,
                     const SolverConfig& config, double gamma, std::span<const CommutePenalty> extra = {});

// ---------------------------------------------------------------------------
// Robust solvers

/// Alternating filter identification and MM graph denoising, starting from
/// S^(0) = Sbar.
RfiResult rfi_alternating(const Matrix& x, const Matrix& y, const Gso& sbar, const SolverConfig& config);

/// Stationarity-aware variant: the denoising step also penalizes
/// rho_x ||Cx S - S Cx||^2 + rho_y ||Cy S - S Cy||^2, and the filter step
/// rho_h ||Cy H - H Cy||^2. The first overload uses sample covariances.
RfiResult rfi_alternating_stationary(const Matrix& x, const Matrix& y, const Gso& sbar,
                                     const SolverConfig& config);
RfiResult rfi_alternating_stationary(const Matrix& x, const Matrix& y, const Gso& sbar,
                                     const SolverConfig& config, const Matrix& cov_x, const Matrix& cov_y);

}  // namespace rgfi
