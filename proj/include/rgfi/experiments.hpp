#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgfi/config_file.hpp"
#include "rgfi/efficient.hpp"
#include "rgfi/graph.hpp"

namespace rgfi {

/// The swept variable is fixed by the experiment:
///   filter_order       filter order R
///   perturbation_type  perturbation ratio, one series per perturbation kind
///   baseline_compare   perturbation ratio
///   efficiency         node count N
///   joint_k            number of filters K
///   ar_forecast        prediction horizon
enum class ExperimentId { FilterOrder, PerturbationType, BaselineCompare, Efficiency, JointK, ArForecast };

ExperimentId parse_experiment_id(const std::string& name);
std::string to_string(ExperimentId id);
PerturbationKind parse_perturbation_kind(const std::string& name);
/// Legend suffix: C, D, CD, W, M.
std::string short_name(PerturbationKind kind);

struct ExperimentConfig {
  ExperimentId id = ExperimentId::BaselineCompare;
  std::vector<double> grid;
  int realizations = 64;
  std::uint64_t seed = 1;
  std::vector<std::string> methods;

  std::string graph_model = "er";  // er | small_world
  Index n = 20;
  double p = 0.2;
  Index sw_k = 4;
  double sw_rewire = 0.1;
  bool symmetric = true;

  PerturbationKind perturbation = PerturbationKind::CreateDestroy;
  double perturbation_ratio = 0.1;
  double weight_sigma = 0.0;
  std::vector<PerturbationKind> perturbation_kinds = {PerturbationKind::Create, PerturbationKind::Destroy,
                                                      PerturbationKind::CreateDestroy};

  Index m = 50;
  double noise = 0.05;
  Index filter_order = 4;
  /// true draws h_r = u_r / rho(S)^r, false h_r = u_r
  bool spectral_scaling = false;
  /// rescale h so that ||H||_F = sqrt(N)
  bool normalize_filter = true;
  Index m_k = 15;  // signals per filter in joint_k
  /// RFI-st uses C_x = I and C_y = H H^T instead of sample covariances
  bool true_covariance = true;

  Index ar_order = 3;
  Index series_length = 200;
  double tts = 0.5;
  Index gf_order = 3;

  /// lambda and beta multiplier of the unweighted l1 variants
  double l1_scale = 1.0;

  EfficientConfig solver;  // solver.base drives every robust method
  std::string out_dir = "results";

  void validate() const;
};

/// Reads every key of a flat config file; unknown keys are an error.
/// Experiment keys: experiment, grid, realizations, seed, methods, graph_model,
/// n, p, sw_k, sw_rewire, symmetric, perturbation, perturbation_ratio,
/// weight_sigma, perturbation_kinds, m, noise, filter_order (signal model),
/// spectral_scaling, normalize_filter, m_k, true_covariance, ar_order, series_length, tts, gf_order,
/// l1_scale, out_dir;
/// solver keys are shared with SolverConfig / EfficientConfig except that the
/// coefficient recovery order is `recover_order`.
ExperimentConfig read_experiment_config(config::KeyValues& kv);
ExperimentConfig load_experiment_config(const std::string& path);

struct ResultRow {
  std::string method;
  double grid_value = 0.0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

struct ExperimentOutput {
  std::vector<ResultRow> results;  // deterministic given the config
  std::vector<ResultRow> timings;  // wall-clock milliseconds
};

/// Runs every (grid value, realization) pair, realization r using seed
/// `seed + r`. Rows are ordered by grid value, seed and then the order in
/// which the methods produce them.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Median across seeds of every (method, grid value, metric).
struct SummaryRow {
  std::string method;
  double grid_value = 0.0;
  std::string metric;
  double median = 0.0;
  std::size_t count = 0;
};
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
double median(std::vector<double> values);

/// Header `method,grid_value,seed,metric,value`.
void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
/// Header `method,grid_value,metric,median,count`.
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Coefficients h_r = u_r / rho(S)^r with u_r ~ U(-1, 1), or h_r = u_r when
/// `spectral_scaling` is off.
Vector draw_filter_coeffs(const Matrix& s, Index order, std::uint64_t seed, bool spectral_scaling = true);

/// Independent 64-bit stream derived from a realization seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rgfi
