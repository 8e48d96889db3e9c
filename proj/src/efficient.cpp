#include "rgfi/efficient.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "alternating.hpp"

namespace rgfi {

void EfficientConfig::validate() const {
  base.validate();
  if (tau_max1 < 1 || tau_max2 < 1) throw std::invalid_argument("tau_max1 and tau_max2 must be at least 1");
  if (mu < 0) throw std::invalid_argument("mu must be non-negative (0 selects the automatic step)");
}

Matrix grad_f1(const Matrix& h, const Matrix& s, const Matrix& x, const Matrix& y, double gamma) {
  const Matrix fit = h * x - y;
  Matrix g = 2.0 * fit * x.transpose();
  if (gamma != 0.0) {
    const Matrix c = s * h - h * s;
    g.noalias() += 2.0 * gamma * (s.transpose() * c - c * s.transpose());
  }
  return g;
}

double f1_value(const Matrix& h, const Matrix& s, const Matrix& x, const Matrix& y, double gamma) {
  double f = (y - h * x).squaredNorm();
  if (gamma != 0.0) f += gamma * (s * h - h * s).squaredNorm();
  return f;
}

namespace {

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

double f1_lipschitz(const Matrix& s, const Matrix& x, double gamma) {
  const Matrix gram = x * x.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double sn = spectral_norm(s);
  return 2.0 * std::max(0.0, es.eigenvalues().maxCoeff()) + 8.0 * gamma * sn * sn;
}

GdResult filter_step_gd(const Matrix& h_init, const Matrix& s, const Matrix& x, const Matrix& y,
                        double gamma, double mu, int tau_max1) {
  if (tau_max1 < 1) throw std::invalid_argument("filter_step_gd: tau_max1 must be at least 1");
  if (gamma < 0) throw std::invalid_argument("filter_step_gd: gamma must be non-negative");
  GdResult out;
  out.mu = mu > 0 ? mu : 1.0 / std::max(f1_lipschitz(s, x, gamma), 1e-300);
  out.h = h_init;

  const Matrix gram = x * x.transpose();
  const Matrix yx = y * x.transpose();
  const Matrix st = s.transpose();
  auto gradient = [&](const Matrix& h) {
    Matrix g = 2.0 * (h * gram - yx);
    if (gamma != 0.0) {
      const Matrix c = s * h - h * s;
      g.noalias() += 2.0 * gamma * (st * c - c * st);
    }
    return g;
  };

  double f_prev = f1_value(out.h, s, x, y, gamma);
  int rises = 0;
  for (int tau = 0; tau < tau_max1; ++tau) {
    out.h -= out.mu * gradient(out.h);
    out.iterations = tau + 1;
    const double f = f1_value(out.h, s, x, y, gamma);
    rises = f > f_prev ? rises + 1 : 0;
    if (rises >= 3) {
      out.mu *= 0.5;
      ++out.halvings;
      rises = 0;
    }
    f_prev = f;
  }
  return out;
}

RfiResult efficient_rfi(const Matrix& x, const Matrix& y, const Gso& sbar, const EfficientConfig& config) {
  config.validate();
  const SolverConfig& base = config.base;
  const Index n = sbar.n();
  if (x.rows() != n || y.rows() != n || x.cols() != y.cols())
    throw std::invalid_argument("efficient_rfi: dimension mismatch between X, Y and the GSO");
  using clock = std::chrono::steady_clock;

  const Matrix& sb = sbar.matrix();
  const Index r0 = std::min<Index>(5, n);
  Matrix h = *build_filter(sb, fi_closed_form(x, y, sbar, r0).h).matrix;
  Matrix s = sb;

  RfiResult res{h, sbar, std::nullopt, false, {}, {}, false};
  double f_prev = 0.0;
  double gamma_prev = -1.0;
  for (int t = 0; t < base.t_max; ++t) {
    IterationRecord rec;
    rec.iteration = t;
    rec.gamma = base.gamma.at(t);

    auto t0 = clock::now();
    const GdResult gd = filter_step_gd(h, s, x, y, rec.gamma, config.mu, config.tau_max1);
    h = gd.h;
    rec.step1_ms = detail::elapsed_ms(t0);
    const double fit = (y - h * x).squaredNorm();
    rec.objective_after_filter = fit + graph_penalty(s, sb, std::span<const Matrix>(&h, 1), base, rec.gamma);
    res.phases.push_back({t, "filter", gd.iterations, rec.step1_ms, rec.objective_after_filter});

    t0 = clock::now();
    const MmWeights w = base.reweight ? mm_weights(s, sb, base.delta1, base.delta2) : unit_weights(n);
    const DenoiseProblem problem = make_denoise_problem(std::span<const Matrix>(&h, 1), sbar, w, base, rec.gamma);
    CdOptions opt;
    opt.max_sweeps = config.tau_max2;
    opt.change_tol = 1e-9;
    CdOutcome cd = denoise_coord_descent(problem, s, opt);
    s = std::move(cd.s);
    rec.step2_ms = detail::elapsed_ms(t0);
    rec.inner_sweeps = cd.sweeps;
    rec.inner_converged = cd.converged;
    rec.objective = fit + graph_penalty(s, sb, std::span<const Matrix>(&h, 1), base, rec.gamma);
    res.phases.push_back({t, "denoise", cd.sweeps, rec.step2_ms, rec.objective});
    res.trace.push_back(rec);

    if (t > 0 && rec.gamma == gamma_prev && base.rel_tol > 0 &&
        std::abs(f_prev - rec.objective) <= base.rel_tol * std::abs(rec.objective)) {
      res.converged = true;
      break;
    }
    f_prev = rec.objective;
    gamma_prev = rec.gamma;
  }

  res.h_hat = std::move(h);
  res.s_hat = Gso(std::move(s), GsoFamily::Adjacency, base.symmetric);
  const FiResult fr = recover_coeffs(res.h_hat, res.s_hat.matrix(), base.filter_order > 0 ? base.filter_order : n);
  res.h_coeffs = fr.h;
  res.coeffs_rank_deficient = fr.rank_deficient;
  return res;
}

}  // namespace rgfi
