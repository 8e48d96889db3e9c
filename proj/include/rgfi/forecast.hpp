#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rgfi/joint.hpp"

namespace rgfi {

struct ForecastOptions {
  Index order = 3;    // memory K of the AR models
  double tts = 0.5;   // fraction of the samples used for training
  int horizon = 1;
  /// any of LS, LS-GF, LS-Eval, Copy-Prev-Day, RFI, AR(K)-RFI
  std::vector<std::string> methods = {"LS", "LS-GF", "Copy-Prev-Day", "RFI", "AR(K)-RFI"};
  Index gf_order = 3;  // polynomial order of LS-GF
  SolverConfig solver;
};

struct ForecastRow {
  std::string method;
  int horizon = 1;
  double error = 0.0;  // mean over evaluation steps of nerr(prediction, truth)
};

/// AR filters fitted by each method on the training part of `series`
/// (N x T, one column per time step).
std::vector<Matrix> fit_forecaster(const std::string& method, const Matrix& train,
                                   const std::optional<Matrix>& train_exo, const Gso& sbar,
                                   const ForecastOptions& options);

/// Mean normalized error of `horizon`-step recursive predictions over the
/// evaluation samples first..T-1.
double forecast_error(const std::vector<Matrix>& filters, const Matrix& series, const std::optional<Matrix>& exo,
                      Index first, int horizon);

/// Chronological split, fit on the training samples and evaluation of the
/// recursive predictions on the remaining ones. LS-Eval fits on the
/// evaluation samples themselves.
std::vector<ForecastRow> forecast_experiment(const Matrix& series, const std::optional<Matrix>& exo,
                                             const Gso& sbar, const ForecastOptions& options);

void write_forecast_csv(std::ostream& os, const std::vector<ForecastRow>& rows);

}  // namespace rgfi
