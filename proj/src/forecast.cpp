#include "rgfi/forecast.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "rgfi/linalg.hpp"

namespace rgfi {

namespace {

ArSeries as_series(const Matrix& data, const std::optional<Matrix>& exo, Index order) {
  ArSeries s;
  s.order = order;
  for (Index t = 0; t < data.cols(); ++t) s.ys.push_back(data.col(t));
  if (exo) {
    s.xs.emplace();
    for (Index t = 0; t < exo->cols(); ++t) s.xs->push_back(exo->col(t));
  }
  return s;
}

std::vector<Matrix> fit_polynomial_ar(const ArSeries& series, const Matrix& s, Index gf_order) {
  series.validate();
  const Index kk = series.order, n = series.n();
  const Index count = static_cast<Index>(series.ys.size()) - kk;
  const Index m = series.ys.front().cols();

  std::vector<Matrix> powers{Matrix::Identity(n, n)};
  for (Index l = 1; l < gf_order; ++l) powers.push_back(powers.back() * s);

  Matrix design(n * m * count, kk * gf_order);
  Vector target(n * m * count);
  for (Index c = 0; c < count; ++c) {
    const Index t = kk + c;
    Matrix y = series.ys[t];
    if (series.xs) y -= (*series.xs)[t];
    target.segment(c * n * m, n * m) = vec(y);
    for (Index k = 1; k <= kk; ++k)
      for (Index l = 0; l < gf_order; ++l)
        design.col((k - 1) * gf_order + l).segment(c * n * m, n * m) = vec(powers[l] * series.ys[t - k]);
  }
  const Vector h = pinv_solve(design, target).x;
  std::vector<Matrix> out;
  for (Index k = 0; k < kk; ++k) {
    Matrix hk = Matrix::Zero(n, n);
    for (Index l = 0; l < gf_order; ++l) hk += h(k * gf_order + l) * powers[l];
    out.push_back(std::move(hk));
  }
  return out;
}

}  // namespace

std::vector<Matrix> fit_forecaster(const std::string& method, const Matrix& train,
                                   const std::optional<Matrix>& train_exo, const Gso& sbar,
                                   const ForecastOptions& options) {
  const Index n = train.rows();
  if (method == "Copy-Prev-Day") return {Matrix::Identity(n, n)};
  if (method == "LS" || method == "LS-Eval") return ar_least_squares(as_series(train, train_exo, options.order));
  if (method == "LS-GF")
    return fit_polynomial_ar(as_series(train, train_exo, options.order), sbar.matrix(), options.gf_order);
  if (method == "RFI") return ar_rfi(as_series(train, train_exo, 1), sbar, options.solver).filters;
  if (method == "AR(K)-RFI") return ar_rfi(as_series(train, train_exo, options.order), sbar, options.solver).filters;
  throw std::invalid_argument("unknown forecasting method " + method);
}

double forecast_error(const std::vector<Matrix>& filters, const Matrix& series, const std::optional<Matrix>& exo,
                      Index first, int horizon) {
  if (horizon < 1) throw std::invalid_argument("forecast horizon must be at least 1");
  const Index kk = static_cast<Index>(filters.size());
  const Index start = std::max(first, kk + horizon - 1);
  if (start >= series.cols()) throw std::invalid_argument("not enough samples to evaluate the forecast");
  double total = 0.0;
  Index count = 0;
  for (Index tau = start; tau < series.cols(); ++tau) {
    const Index origin = tau - horizon + 1;  // first predicted step
    std::vector<Matrix> history;
    for (Index j = origin - kk; j < origin; ++j) history.push_back(series.col(j));
    std::vector<Matrix> x;
    if (exo)
      for (Index j = origin; j <= tau; ++j) x.push_back(exo->col(j));
    const auto pred = ar_predict(filters, history, horizon, exo ? &x : nullptr);
    total += nerr(pred.back(), series.col(tau));
    ++count;
  }
  return total / static_cast<double>(count);
}

std::vector<ForecastRow> forecast_experiment(const Matrix& series, const std::optional<Matrix>& exo,
                                             const Gso& sbar, const ForecastOptions& options) {
  if (!(options.tts > 0 && options.tts < 1)) throw std::invalid_argument("tts must lie in (0, 1)");
  if (series.rows() != sbar.n()) throw std::invalid_argument("series and graph differ in node count");
  if (exo && (exo->rows() != series.rows() || exo->cols() != series.cols()))
    throw std::invalid_argument("exogenous inputs must match the series");
  const Index t = series.cols();
  const Index n_train = static_cast<Index>(std::floor(options.tts * static_cast<double>(t)));
  const Index need = options.order + options.horizon;
  if (n_train <= options.order || t - n_train < need)
    throw std::invalid_argument("not enough samples for the requested memory and horizon");

  const Matrix train = series.leftCols(n_train);
  const Matrix eval = series.rightCols(t - n_train);
  std::optional<Matrix> train_exo, eval_exo;
  if (exo) {
    train_exo = exo->leftCols(n_train);
    eval_exo = exo->rightCols(t - n_train);
  }

  std::vector<ForecastRow> rows;
  for (const auto& method : options.methods) {
    const bool on_eval = method == "LS-Eval";
    const auto filters = fit_forecaster(method, on_eval ? eval : train, on_eval ? eval_exo : train_exo, sbar, options);
    const std::string label = method == "AR(K)-RFI" ? "AR(" + std::to_string(options.order) + ")-RFI" : method;
    rows.push_back({label, options.horizon, forecast_error(filters, series, exo, n_train, options.horizon)});
  }
  return rows;
}

void write_forecast_csv(std::ostream& os, const std::vector<ForecastRow>& rows) {
  const auto prec = os.precision(17);
  os << "method,horizon,error\n";
  for (const auto& r : rows) os << r.method << ',' << r.horizon << ',' << r.error << '\n';
  os.precision(prec);
}

}  // namespace rgfi
