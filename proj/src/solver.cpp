#include "rgfi/solver.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "alternating.hpp"
#include "rgfi/kernels.hpp"
#include "rgfi/linalg.hpp"

namespace rgfi {

double GammaSchedule::at(int t) const {
  return std::min(cap, initial * std::pow(growth, static_cast<double>(t)));
}

void SolverConfig::validate() const {
  if (lambda < 0 || beta < 0 || rho_x < 0 || rho_y < 0 || rho_h < 0)
    throw std::invalid_argument("solver weights must be non-negative");
  if (gamma.initial < 0 || gamma.growth <= 0 || gamma.cap < 0)
    throw std::invalid_argument("invalid gamma schedule");
  if (!(delta1 > 0) || !(delta2 > 0)) throw std::invalid_argument("delta1 and delta2 must be positive");
  if (t_max < 1) throw std::invalid_argument("t_max must be at least 1");
  if (inner_max < 1) throw std::invalid_argument("inner_max must be at least 1");
  if (filter_order < 0) throw std::invalid_argument("filter_order must be non-negative");
  if (family != GsoFamily::Adjacency)
    throw std::invalid_argument("graph denoising is implemented for the adjacency set only");
}

std::string run_report_csv(const RfiResult& result) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "iteration,objective,step1_ms,step2_ms\n";
  for (const auto& r : result.trace)
    os << r.iteration << ',' << r.objective << ',' << r.step1_ms << ',' << r.step2_ms << '\n';
  if (!result.phases.empty()) {
    os << "\nt,phase,inner_iters,wall_ms,objective\n";
    for (const auto& p : result.phases)
      os << p.t << ',' << p.phase << ',' << p.inner_iters << ',' << p.wall_ms << ',' << p.objective << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

FiResult fi_closed_form(const Matrix& x, const Matrix& y, const Gso& gso, Index order) {
  const Index n = gso.n();
  if (order < 1 || order > n) throw std::invalid_argument("filter order must lie in [1, N]");
  if (x.rows() != n || y.rows() != n || x.cols() != y.cols())
    throw std::invalid_argument("fi_closed_form: dimension mismatch");
  const Index m = x.cols();
  const SpectralDecomp sd = spectral_decomp(gso);
  const CMatrix xt = sd.inv_eigvecs * x.cast<std::complex<double>>();

  // Khatri-Rao product (V^{-1} X)^T (.) V, one column per frequency
  CMatrix kr(n * m, n);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < m; ++c) kr.col(i).segment(c * n, n) = xt(i, c) * sd.eigvecs.col(i);
  const CMatrix theta = kr * sd.vandermonde(order);

  Matrix stacked(2 * n * m, order);
  stacked << theta.real(), theta.imag();
  Vector rhs = Vector::Zero(2 * n * m);
  rhs.head(n * m) = vec(y);
  const LeastSquares ls = pinv_solve(stacked, rhs);
  return {ls.x, ls.rank_deficient};
}

FiResult recover_coeffs(const Matrix& h, const Matrix& s, Index order) {
  const Index n = s.rows();
  if (order < 1 || order > n) throw std::invalid_argument("filter order must lie in [1, N]");
  Matrix basis(n * n, order);
  Matrix power = Matrix::Identity(n, n);
  for (Index r = 0; r < order; ++r) {
    basis.col(r) = vec(power);
    if (r + 1 < order) power = power * s;
  }
  const LeastSquares ls = pinv_solve(basis, vec(h));
  return {ls.x, ls.rank_deficient};
}

IdentifiabilityReport identifiability_check(const Matrix& x, const Gso& gso) {
  if (x.rows() != gso.n()) throw std::invalid_argument("identifiability_check: dimension mismatch");
  const SpectralDecomp sd = spectral_decomp(gso);
  IdentifiabilityReport rep;
  const Index n = gso.n();
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) rep.min_gap = std::min(rep.min_gap, std::abs(sd.eigvals(i) - sd.eigvals(j)));
  rep.distinct_eigs = rep.min_gap > 1e-8;
  const CMatrix xt = sd.inv_eigvecs * x.cast<std::complex<double>>();
  rep.min_row_energy = xt.rowwise().norm().minCoeff();
  rep.excited_frequencies = rep.min_row_energy > 1e-10 * xt.norm();
  return rep;
}

// ---------------------------------------------------------------------------

Matrix rfi_step1(const Matrix& x, const Matrix& y, const Matrix& s, double gamma,
                 std::span<const CommutePenalty> extra) {
  const Index n = s.rows();
  if (x.rows() != n || y.rows() != n || x.cols() != y.cols())
    throw std::invalid_argument("rfi_step1: dimension mismatch");
  if (gamma < 0) throw std::invalid_argument("rfi_step1: gamma must be non-negative");
  if (!x.allFinite() || !y.allFinite() || !s.allFinite())
    throw std::invalid_argument("rfi_step1: non-finite input");

  const Matrix gram = x * x.transpose();
  std::vector<kernels::CommuteTerm> terms;
  if (gamma > 0) terms.push_back({&s, gamma});
  for (const auto& e : extra)
    if (e.weight > 0) terms.push_back({&e.b, e.weight});

  const Matrix rhs_m = y * x.transpose();
  Vector rhs = vec(rhs_m);

  Matrix a = kernels::assemble_step1_system(gram, terms);
  {
    Eigen::LLT<Eigen::Ref<Matrix>> llt(a);
    if (llt.info() == Eigen::Success) {
      llt.solveInPlace(rhs);
      return unvec(rhs, n);
    }
  }
  // singular system: reassemble, add a relative jitter and fall back to LDLT
  a = kernels::assemble_step1_system(gram, terms);
  const double jitter = 1e-12 * a.trace() / static_cast<double>(n * n);
  a.diagonal().array() += jitter > 0 ? jitter : 1e-12;
  Eigen::LDLT<Eigen::Ref<Matrix>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("rfi_step1: factorization failed");
  rhs = ldlt.solve(rhs);
  return unvec(rhs, n);
}

MmWeights mm_weights(const Matrix& s, const Matrix& sbar, double delta1, double delta2) {
  if (!(delta1 > 0) || !(delta2 > 0)) throw std::invalid_argument("mm_weights: deltas must be positive");
  MmWeights w;
  w.prox = ((s - sbar).array().abs() + delta1).inverse().matrix();
  w.sparsity = (s.array().abs() + delta2).inverse().matrix();
  return w;
}

MmWeights unit_weights(Index n) { return {Matrix::Ones(n, n), Matrix::Ones(n, n)}; }

DenoiseProblem make_denoise_problem(std::span<const Matrix> filters, const Gso& sbar,
                                    const MmWeights& weights, const SolverConfig& config, double gamma,
                                    std::span<const CommutePenalty> extra) {
  if (config.symmetric && !sbar.symmetric())
    throw std::invalid_argument("symmetric solver needs a symmetric perturbed GSO");
  if ((weights.prox.array() <= 0).any() || (weights.sparsity.array() <= 0).any())
    throw std::invalid_argument("denoising weights must be strictly positive");
  DenoiseProblem p;
  p.sbar = sbar.matrix();
  p.prox_weights = weights.prox;
  p.sparsity_weights = weights.sparsity;
  p.lambda = config.lambda;
  p.beta = config.beta;
  p.symmetric = config.symmetric;
  if (gamma > 0)
    for (const auto& h : filters) p.blocks.emplace_back(gamma, h, config.symmetric);
  for (const auto& e : extra)
    if (e.weight > 0) p.blocks.emplace_back(e.weight, e.b, config.symmetric);
  return p;
}

DenoiseStepResult denoise_step(std::span<const Matrix> filters, const Matrix& s_init, const Gso& sbar,
                               const MmWeights& weights, const SolverConfig& config, double gamma,
                               std::span<const CommutePenalty> extra) {
  const DenoiseProblem p = make_denoise_problem(filters, sbar, weights, config, gamma, extra);
  CdOptions opt;
  opt.max_sweeps = config.inner_max;
  opt.change_tol = 1e-12;
  opt.rel_objective_tol = config.inner_tol;
  CdOutcome cd = denoise_coord_descent(p, s_init, opt);
  return {Gso(std::move(cd.s), GsoFamily::Adjacency, config.symmetric), cd.sweeps, cd.converged};
}

DenoiseStepResult denoise_step(const Matrix& h, const Matrix& s_init, const Gso& sbar,
                               const MmWeights& weights, const SolverConfig& config, double gamma) {
  return denoise_step(std::span<const Matrix>(&h, 1), s_init, sbar, weights, config, gamma);
}

double log_penalty(const Matrix& z, double delta) { return (z.array().abs() + delta).log().sum(); }

double graph_penalty(const Matrix& s, const Matrix& sbar, std::span<const Matrix> filters,
                     const SolverConfig& config, double gamma, std::span<const CommutePenalty> extra) {
  double f = 0.0;
  if (config.reweight) {
    f += config.lambda * log_penalty(s - sbar, config.delta1) + config.beta * log_penalty(s, config.delta2);
  } else {
    f += config.lambda * (s - sbar).cwiseAbs().sum() + config.beta * s.cwiseAbs().sum();
  }
  for (const auto& h : filters) f += gamma * (s * h - h * s).squaredNorm();
  for (const auto& e : extra) f += e.weight * (s * e.b - e.b * s).squaredNorm();
  return f;
}

double objective_eval(const Matrix& h, const Matrix& s, const Matrix& x, const Matrix& y,
                      const Matrix& sbar, const SolverConfig& config, double gamma) {
  return (y - h * x).squaredNorm() + graph_penalty(s, sbar, std::span<const Matrix>(&h, 1), config, gamma);
}

// ---------------------------------------------------------------------------

namespace detail {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

AlternatingOutput run_alternating(AlternatingSpec spec, const Gso& sbar, const SolverConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  AlternatingOutput out{std::move(spec.filters), sbar, {}, false};
  Matrix s = sbar.matrix();
  const Matrix& sb = sbar.matrix();
  const Index n = sbar.n();

  double f_prev = 0.0;
  double gamma_prev = -1.0;
  for (int t = 0; t < config.t_max; ++t) {
    IterationRecord rec;
    rec.iteration = t;
    rec.gamma = config.gamma.at(t);

    auto t0 = clock::now();
    spec.filter_step(s, rec.gamma, out.filters);
    rec.step1_ms = elapsed_ms(t0);
    const double fit = spec.filter_cost(out.filters);
    rec.objective_after_filter = fit + graph_penalty(s, sb, out.filters, config, rec.gamma, spec.denoise_extra);

    t0 = clock::now();
    const MmWeights w = config.reweight ? mm_weights(s, sb, config.delta1, config.delta2) : unit_weights(n);
    DenoiseStepResult ds = denoise_step(out.filters, s, sbar, w, config, rec.gamma, spec.denoise_extra);
    rec.step2_ms = elapsed_ms(t0);
    rec.inner_sweeps = ds.sweeps;
    rec.inner_converged = ds.converged;
    s = ds.s.matrix();
    rec.objective = fit + graph_penalty(s, sb, out.filters, config, rec.gamma, spec.denoise_extra);
    out.trace.push_back(rec);

    if (t > 0 && rec.gamma == gamma_prev && config.rel_tol > 0 &&
        std::abs(f_prev - rec.objective) <= config.rel_tol * std::abs(rec.objective)) {
      out.converged = true;
      break;
    }
    f_prev = rec.objective;
    gamma_prev = rec.gamma;
  }
  out.s = Gso(std::move(s), GsoFamily::Adjacency, config.symmetric);
  return out;
}

}  // namespace detail

namespace {

RfiResult finish(detail::AlternatingOutput&& run, const SolverConfig& config) {
  RfiResult res{std::move(run.filters.front()), std::move(run.s), std::nullopt, false,
                std::move(run.trace), {}, run.converged};
  const Index order = config.filter_order > 0 ? config.filter_order : res.s_hat.n();
  const FiResult fr = recover_coeffs(res.h_hat, res.s_hat.matrix(), order);
  res.h_coeffs = fr.h;
  res.coeffs_rank_deficient = fr.rank_deficient;
  return res;
}

RfiResult single_filter(const Matrix& x, const Matrix& y, const Gso& sbar, const SolverConfig& config,
                        std::vector<CommutePenalty> denoise_extra, std::vector<CommutePenalty> filter_extra) {
  if (x.rows() != sbar.n() || y.rows() != sbar.n() || x.cols() != y.cols())
    throw std::invalid_argument("solver: dimension mismatch between X, Y and the GSO");
  detail::AlternatingSpec spec;
  spec.filters = {Matrix::Zero(sbar.n(), sbar.n())};
  spec.denoise_extra = std::move(denoise_extra);
  spec.filter_step = [&](const Matrix& s, double gamma, std::vector<Matrix>& filters) {
    filters[0] = rfi_step1(x, y, s, gamma, filter_extra);
  };
  spec.filter_cost = [&](const std::vector<Matrix>& filters) {
    const Matrix& h = filters[0];
    double f = (y - h * x).squaredNorm();
    for (const auto& e : filter_extra) f += e.weight * (e.b * h - h * e.b).squaredNorm();
    return f;
  };
  return finish(detail::run_alternating(std::move(spec), sbar, config), config);
}

}  // namespace

RfiResult rfi_alternating(const Matrix& x, const Matrix& y, const Gso& sbar, const SolverConfig& config) {
  return single_filter(x, y, sbar, config, {}, {});
}

RfiResult rfi_alternating_stationary(const Matrix& x, const Matrix& y, const Gso& sbar,
                                     const SolverConfig& config) {
  return rfi_alternating_stationary(x, y, sbar, config, sample_covariance(x), sample_covariance(y));
}

RfiResult rfi_alternating_stationary(const Matrix& x, const Matrix& y, const Gso& sbar,
                                     const SolverConfig& config, const Matrix& cov_x, const Matrix& cov_y) {
  const Index n = sbar.n();
  if (cov_x.rows() != n || cov_x.cols() != n || cov_y.rows() != n || cov_y.cols() != n)
    throw std::invalid_argument("covariances must be N x N");
  std::vector<CommutePenalty> denoise_extra;
  if (config.rho_x > 0) denoise_extra.push_back({cov_x, config.rho_x});
  if (config.rho_y > 0) denoise_extra.push_back({cov_y, config.rho_y});
  std::vector<CommutePenalty> filter_extra;
  if (config.rho_h > 0) filter_extra.push_back({cov_y, config.rho_h});
  return single_filter(x, y, sbar, config, std::move(denoise_extra), std::move(filter_extra));
}

}  // namespace rgfi
