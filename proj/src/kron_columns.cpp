#include "rgfi/kron_columns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rgfi {

SparseKronColumns::SparseKronColumns(const Matrix& b, bool symmetric_pairs)
    : n_(b.rows()), sym_(symmetric_pairs) {
  if (b.rows() != b.cols()) throw std::invalid_argument("Kronecker columns need a square matrix");
  const Index n = n_;
  for (Index i = 0; i < n; ++i)
    for (Index j = sym_ ? i + 1 : 0; j < n; ++j)
      if (i != j) vars_.emplace_back(i, j);

  const std::size_t per = static_cast<std::size_t>(sym_ ? 4 * n : 2 * n);
  offsets_.reserve(vars_.size() + 1);
  rows_.reserve(vars_.size() * per);
  vals_.reserve(vars_.size() * per);
  offsets_.push_back(0);

  std::vector<std::pair<Index, double>> scratch;
  scratch.reserve(per);
  // sigma_(i,j): +B(j,q) at residual entry (i,q), -B(p,i) at entry (p,j)
  auto push_column = [&](Index i, Index j) {
    for (Index q = 0; q < n; ++q) scratch.emplace_back(i + q * n, b(j, q));
    for (Index p = 0; p < n; ++p) scratch.emplace_back(p + j * n, -b(p, i));
  };
  for (const auto& [i, j] : vars_) {
    scratch.clear();
    push_column(i, j);
    if (sym_) push_column(j, i);
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    double norm = 0.0;
    for (std::size_t k = 0; k < scratch.size();) {
      const Index row = scratch[k].first;
      double v = 0.0;
      for (; k < scratch.size() && scratch[k].first == row; ++k) v += scratch[k].second;
      rows_.push_back(row);
      vals_.push_back(v);
      norm += v * v;
    }
    norms_.push_back(norm);
    offsets_.push_back(static_cast<Index>(rows_.size()));
  }
}

double SparseKronColumns::dot(Index v, const Vector& r) const {
  double acc = 0.0;
  for (Index k = offsets_[v]; k < offsets_[v + 1]; ++k) acc += vals_[k] * r[rows_[k]];
  return acc;
}

void SparseKronColumns::axpy(Index v, double alpha, Vector& r) const {
  for (Index k = offsets_[v]; k < offsets_[v + 1]; ++k) r[rows_[k]] += alpha * vals_[k];
}

Matrix SparseKronColumns::dense() const {
  Matrix out = Matrix::Zero(n_ * n_, size());
  for (Index v = 0; v < size(); ++v)
    for (Index k = offsets_[v]; k < offsets_[v + 1]; ++k) out(rows_[k], v) = vals_[k];
  return out;
}

double CoordTerms::objective(double s) const {
  return prox_weight * std::abs(s - s_bar) + sparsity_weight * s + curvature * s * s + 2.0 * linear * s;
}

double coord_update(const CoordTerms& t) {
  if (t.s_bar < 0.0) throw std::invalid_argument("coord_update: s_bar must be non-negative");
  const double p = t.prox_weight;
  const double slope = t.sparsity_weight + 2.0 * t.linear;
  if (t.curvature <= 0.0) {
    // piecewise linear: slope - p left of s_bar, slope + p right of it
    return (slope - p > 0.0) ? 0.0 : t.s_bar;
  }
  const double upper = -(p + slope) / (2.0 * t.curvature);
  if (t.s_bar < upper) return upper;
  const double lower = (p - slope) / (2.0 * t.curvature);
  if (t.s_bar > lower) return std::max(0.0, lower);
  return t.s_bar;
}

double coord_update(double s_bar, const Vector& sigma, const Vector& r, double omega,
                    double omega_bar, double lambda, double beta, double gamma) {
  CoordTerms t;
  t.s_bar = s_bar;
  t.prox_weight = lambda * omega_bar;
  t.sparsity_weight = beta * omega;
  t.curvature = gamma * sigma.squaredNorm();
  t.linear = gamma * sigma.dot(r);
  return coord_update(t);
}

double DenoiseProblem::objective(const Matrix& s) const {
  double f = lambda * (prox_weights.array() * (s - sbar).array().abs()).sum() +
             beta * (sparsity_weights.array() * s.array().abs()).sum();
  for (const auto& blk : blocks) f += blk.weight * (s * blk.b - blk.b * s).squaredNorm();
  return f;
}

CdOutcome denoise_coord_descent(const DenoiseProblem& problem, const Matrix& s_init,
                                const CdOptions& options) {
  const Index n = problem.sbar.rows();
  if (s_init.rows() != n || s_init.cols() != n) throw std::invalid_argument("denoise: shape mismatch");
  if ((problem.sbar.array() < 0.0).any())
    throw std::invalid_argument("denoise: perturbed adjacency has negative entries");
  if ((s_init.array() < 0.0).any() || (s_init.diagonal().array() != 0.0).any())
    throw std::invalid_argument("denoise: initial point is not an adjacency matrix");
  for (const auto& blk : problem.blocks)
    if (blk.columns.symmetric_pairs() != problem.symmetric)
      throw std::invalid_argument("denoise: block symmetry does not match the problem");

  CdOutcome out;
  out.s = s_init;
  Matrix& s = out.s;
  for (const auto& blk : problem.blocks) {
    const Matrix r = s * blk.b - blk.b * s;
    out.residuals.emplace_back(Eigen::Map<const Vector>(r.data(), r.size()));
  }

  const Index nvars = problem.symmetric ? n * (n - 1) / 2 : n * (n - 1);
  std::vector<double> curvature(static_cast<std::size_t>(nvars), 0.0);
  for (const auto& blk : problem.blocks)
    for (Index v = 0; v < nvars; ++v) curvature[v] += blk.weight * blk.columns.squared_norm(v);

  auto separable = [&](const Matrix& m) {
    return problem.lambda * (problem.prox_weights.array() * (m - problem.sbar).array().abs()).sum() +
           problem.beta * (problem.sparsity_weights.array() * m.array().abs()).sum();
  };
  auto current_objective = [&] {
    double f = separable(s);
    for (std::size_t b = 0; b < problem.blocks.size(); ++b)
      f += problem.blocks[b].weight * out.residuals[b].squaredNorm();
    return f;
  };

  double f_prev = options.rel_objective_tol > 0.0 ? current_objective() : 0.0;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    Index v = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = problem.symmetric ? i + 1 : 0; j < n; ++j) {
        if (i == j) continue;
        const double s_old = s(i, j);
        CoordTerms t;
        t.s_bar = problem.sbar(i, j);
        t.prox_weight = problem.lambda * problem.prox_weights(i, j);
        t.sparsity_weight = problem.beta * problem.sparsity_weights(i, j);
        if (problem.symmetric) {
          t.prox_weight += problem.lambda * problem.prox_weights(j, i);
          t.sparsity_weight += problem.beta * problem.sparsity_weights(j, i);
        }
        t.curvature = curvature[v];
        double lin = 0.0;
        for (std::size_t b = 0; b < problem.blocks.size(); ++b)
          lin += problem.blocks[b].weight * problem.blocks[b].columns.dot(v, out.residuals[b]);
        t.linear = lin - t.curvature * s_old;
        const double s_new = coord_update(t);
        const double delta = s_new - s_old;
        if (delta != 0.0) {
          for (std::size_t b = 0; b < problem.blocks.size(); ++b)
            problem.blocks[b].columns.axpy(v, delta, out.residuals[b]);
          s(i, j) = s_new;
          if (problem.symmetric) s(j, i) = s_new;
          max_change = std::max(max_change, std::abs(delta));
          if (options.on_update) options.on_update(s);
        }
        ++v;
      }
    }
    out.sweeps = sweep + 1;
    if (max_change <= options.change_tol) {
      out.converged = true;
      break;
    }
    if (options.rel_objective_tol > 0.0) {
      const double f = current_objective();
      if (std::abs(f_prev - f) <= options.rel_objective_tol * std::max(1.0, std::abs(f))) {
        out.converged = true;
        break;
      }
      f_prev = f;
    }
  }
  return out;
}

}  // namespace rgfi
