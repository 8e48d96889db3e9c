#include "rgfi/joint.hpp"

#include <random>
#include <stdexcept>

#include "alternating.hpp"
#include "rgfi/kernels.hpp"
#include "rgfi/linalg.hpp"

namespace rgfi {

void MultiSignalSet::validate(Index n) const {
  if (xs.empty()) throw std::invalid_argument("joint data needs at least one signal pair");
  if (xs.size() != ys.size()) throw std::invalid_argument("joint data: X and Y lists differ in length");
  if (!alpha.empty() && alpha.size() != xs.size())
    throw std::invalid_argument("joint data: one alpha per pair is required");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k].rows() != n || ys[k].rows() != n || xs[k].cols() != ys[k].cols())
      throw std::invalid_argument("joint data: pair " + std::to_string(k) + " has inconsistent shape");
    if (!(alpha_at(k) > 0)) throw std::invalid_argument("joint data: alpha must be positive");
  }
}

double joint_objective(const MultiSignalSet& data, const std::vector<Matrix>& filters, const Matrix& s,
                       const Matrix& sbar, const SolverConfig& config, double gamma) {
  double f = 0.0;
  for (std::size_t k = 0; k < filters.size(); ++k)
    f += data.alpha_at(k) * (data.ys[k] - filters[k] * data.xs[k]).squaredNorm();
  return f + graph_penalty(s, sbar, filters, config, gamma);
}

JointResult joint_rfi(const MultiSignalSet& data, const Gso& sbar, const SolverConfig& config) {
  const Index n = sbar.n();
  data.validate(n);
  const std::size_t kk = data.xs.size();

  detail::AlternatingSpec spec;
  spec.filters.assign(kk, Matrix::Zero(n, n));
  spec.filter_step = [&](const Matrix& s, double gamma, std::vector<Matrix>& filters) {
    kernels::parallel_for(kk, [&](std::size_t k) {
      filters[k] = rfi_step1(data.xs[k], data.ys[k], s, gamma / data.alpha_at(k));
    });
  };
  spec.filter_cost = [&](const std::vector<Matrix>& filters) {
    double f = 0.0;
    for (std::size_t k = 0; k < kk; ++k)
      f += data.alpha_at(k) * (data.ys[k] - filters[k] * data.xs[k]).squaredNorm();
    return f;
  };
  detail::AlternatingOutput run = detail::run_alternating(std::move(spec), sbar, config);
  return {std::move(run.filters), std::move(run.s), std::move(run.trace), run.converged};
}

// ---------------------------------------------------------------------------

void ArSeries::validate() const {
  if (order < 1) throw std::invalid_argument("AR memory K must be at least 1");
  if (static_cast<Index>(ys.size()) <= order)
    throw std::invalid_argument("AR series needs more snapshots than its memory K");
  const Index n = ys.front().rows(), m = ys.front().cols();
  for (const auto& y : ys)
    if (y.rows() != n || y.cols() != m) throw std::invalid_argument("AR snapshots must share their shape");
  if (xs) {
    if (xs->size() != ys.size()) throw std::invalid_argument("AR exogenous inputs must match the snapshots");
    for (const auto& x : *xs)
      if (x.rows() != n || x.cols() != m) throw std::invalid_argument("AR exogenous inputs must match the snapshots");
  }
}

namespace {

// target Y_t - X_t stacked over t = K..kappa_max-1
Matrix ar_targets(const ArSeries& series) {
  const Index kk = series.order, n = series.n(), m = series.ys.front().cols();
  const Index count = static_cast<Index>(series.ys.size()) - kk;
  Matrix out(n, count * m);
  for (Index c = 0; c < count; ++c) {
    out.middleCols(c * m, m) = series.ys[kk + c];
    if (series.xs) out.middleCols(c * m, m) -= (*series.xs)[kk + c];
  }
  return out;
}

// regressor Y_{t-lag} stacked over t = K..kappa_max-1
Matrix ar_lagged(const ArSeries& series, Index lag) {
  const Index kk = series.order, n = series.n(), m = series.ys.front().cols();
  const Index count = static_cast<Index>(series.ys.size()) - kk;
  Matrix out(n, count * m);
  for (Index c = 0; c < count; ++c) out.middleCols(c * m, m) = series.ys[kk + c - lag];
  return out;
}

}  // namespace

double ar_fit_cost(const ArSeries& series, const std::vector<Matrix>& filters) {
  Matrix r = ar_targets(series);
  for (Index k = 0; k < series.order; ++k) r.noalias() -= filters[k] * ar_lagged(series, k + 1);
  return r.squaredNorm();
}

double ar_objective(const ArSeries& series, const std::vector<Matrix>& filters, const Matrix& s,
                    const Matrix& sbar, const SolverConfig& config, double gamma) {
  return ar_fit_cost(series, filters) + graph_penalty(s, sbar, filters, config, gamma);
}

JointResult ar_rfi(const ArSeries& series, const Gso& sbar, const SolverConfig& config, const ArOptions& options) {
  series.validate();
  if (series.n() != sbar.n()) throw std::invalid_argument("AR series and GSO differ in node count");
  if (options.passes < 1) throw std::invalid_argument("AR options: passes must be at least 1");
  const Index kk = series.order, n = sbar.n();

  const Matrix target = ar_targets(series);
  std::vector<Matrix> lagged;
  for (Index k = 1; k <= kk; ++k) lagged.push_back(ar_lagged(series, k));

  detail::AlternatingSpec spec;
  spec.filters.assign(static_cast<std::size_t>(kk), Matrix::Zero(n, n));
  spec.filter_step = [&](const Matrix& s, double gamma, std::vector<Matrix>& filters) {
    for (int pass = 0; pass < options.passes; ++pass) {
      const std::vector<Matrix> previous = filters;
      const std::vector<Matrix>& others = options.jacobi ? previous : filters;
      auto update = [&](std::size_t k) {
        Matrix r = target;
        for (std::size_t j = 0; j < lagged.size(); ++j)
          if (j != k) r.noalias() -= others[j] * lagged[j];
        filters[k] = rfi_step1(lagged[k], r, s, gamma);
      };
      if (options.jacobi)
        kernels::parallel_for(lagged.size(), update);
      else
        for (std::size_t k = 0; k < lagged.size(); ++k) update(k);
    }
  };
  spec.filter_cost = [&](const std::vector<Matrix>& filters) {
    Matrix r = target;
    for (std::size_t k = 0; k < lagged.size(); ++k) r.noalias() -= filters[k] * lagged[k];
    return r.squaredNorm();
  };
  detail::AlternatingOutput run = detail::run_alternating(std::move(spec), sbar, config);
  return {std::move(run.filters), std::move(run.s), std::move(run.trace), run.converged};
}

std::vector<Matrix> ar_least_squares(const ArSeries& series) {
  series.validate();
  const Index kk = series.order, n = series.n();
  const Matrix target = ar_targets(series);
  Matrix reg(kk * n, target.cols());
  for (Index k = 1; k <= kk; ++k) reg.middleRows((k - 1) * n, n) = ar_lagged(series, k);
  // [H_1 ... H_K] = T R^T (R R^T)^+, solved row by row through the transpose
  const Matrix gram = reg * reg.transpose();
  const Matrix rhs = reg * target.transpose();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
  cod.setThreshold(kPinvRcond);
  const Matrix stacked = cod.solve(rhs).transpose();
  std::vector<Matrix> out;
  for (Index k = 0; k < kk; ++k) out.push_back(stacked.middleCols(k * n, n));
  return out;
}

std::vector<Matrix> ar_predict(const std::vector<Matrix>& filters, const std::vector<Matrix>& history,
                               int steps, const std::vector<Matrix>* exogenous) {
  const std::size_t kk = filters.size();
  if (history.size() < kk) throw std::invalid_argument("ar_predict: history shorter than the AR memory");
  if (steps < 0) throw std::invalid_argument("ar_predict: negative horizon");
  if (exogenous && exogenous->size() < static_cast<std::size_t>(steps))
    throw std::invalid_argument("ar_predict: one exogenous input per step is required");
  if (history.empty()) throw std::invalid_argument("ar_predict: empty history");

  std::vector<Matrix> window(history.end() - static_cast<std::ptrdiff_t>(std::max<std::size_t>(kk, 1)),
                             history.end());
  std::vector<Matrix> out;
  for (int step = 0; step < steps; ++step) {
    Matrix next = Matrix::Zero(history.back().rows(), history.back().cols());
    for (std::size_t k = 0; k < kk; ++k) next.noalias() += filters[k] * window[window.size() - 1 - k];
    if (exogenous) next += (*exogenous)[static_cast<std::size_t>(step)];
    out.push_back(next);
    window.push_back(std::move(next));
    window.erase(window.begin());
  }
  return out;
}

ArSynthesis synthesize_ar(const Matrix& s, Index order, Index filter_order, Index kappa_max, Index m,
                          bool exogenous, std::uint64_t seed, double radius, Index burn_in) {
  if (order < 1 || kappa_max <= order || m < 1 || filter_order < 1)
    throw std::invalid_argument("synthesize_ar: invalid dimensions");
  const Index n = s.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  Eigen::JacobiSVD<Matrix> svd_s(s);
  const double rho = std::max(svd_s.singularValues()(0), 1e-12);
  ArSynthesis out;
  double total = 0.0;
  for (Index k = 0; k < order; ++k) {
    Vector h(filter_order);
    for (Index r = 0; r < filter_order; ++r) h(r) = unif(rng) / std::pow(rho, static_cast<double>(r));
    Matrix hk = *build_filter(s, h).matrix;
    Eigen::JacobiSVD<Matrix> svd(hk);
    total += svd.singularValues()(0);
    out.filters.push_back(std::move(hk));
  }
  for (auto& hk : out.filters) hk *= radius / total;

  auto draw = [&] {
    Matrix z(n, m);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n; ++i) z(i, j) = normal(rng);
    return z;
  };
  std::vector<Matrix> ys, xs;
  for (Index t = 0; t < order; ++t) {
    ys.push_back(draw());
    xs.push_back(Matrix::Zero(n, m));
  }
  for (Index t = order; t < burn_in + kappa_max; ++t) {
    Matrix x = draw();
    Matrix y = x;
    for (Index k = 0; k < order; ++k) y.noalias() += out.filters[k] * ys[t - 1 - k];
    ys.push_back(std::move(y));
    xs.push_back(std::move(x));
  }
  const auto first = static_cast<std::ptrdiff_t>(burn_in);
  out.series.ys.assign(ys.begin() + first, ys.end());
  if (exogenous) out.series.xs = std::vector<Matrix>(xs.begin() + first, xs.end());
  out.series.order = order;
  return out;
}

}  // namespace rgfi
