#pragma once

#include <chrono>
#include <functional>
#include <vector>

#include "rgfi/solver.hpp"

namespace rgfi::detail {

/// Outer loop shared by the single-filter, stationary, joint and
/// autoregressive solvers. The variants only differ in how the filters are
/// updated for a fixed S and in the filter-only part of the objective.
struct AlternatingSpec {
  std::vector<Matrix> filters;
  std::vector<CommutePenalty> denoise_extra;
  std::function<void(const Matrix& s, double gamma, std::vector<Matrix>& filters)> filter_step;
  std::function<double(const std::vector<Matrix>& filters)> filter_cost;
};

struct AlternatingOutput {
  std::vector<Matrix> filters;
  Gso s;
  std::vector<IterationRecord> trace;
  bool converged = false;
};

AlternatingOutput run_alternating(AlternatingSpec spec, const Gso& sbar, const SolverConfig& config);

double elapsed_ms(std::chrono::steady_clock::time_point since);

}  // namespace rgfi::detail
