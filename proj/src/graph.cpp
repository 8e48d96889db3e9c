#include "rgfi/graph.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace rgfi {

Gso::Gso(Matrix matrix, GsoFamily family, bool symmetric)
    : matrix_(std::move(matrix)), family_(family), symmetric_(symmetric) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("GSO must be square");
  if (!matrix_.allFinite()) throw std::invalid_argument("GSO has non-finite entries");
  const Index n = matrix_.rows();
  if (family_ == GsoFamily::Adjacency) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        if (i == j && matrix_(i, j) != 0.0)
          throw std::invalid_argument("adjacency GSO has a self-loop at node " + std::to_string(i));
        if (matrix_(i, j) < 0.0)
          throw std::invalid_argument("adjacency GSO has a negative entry");
      }
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j)
        if (i != j && matrix_(i, j) > 0.0)
          throw std::invalid_argument("Laplacian GSO has a positive off-diagonal entry");
      if (std::abs(matrix_.row(i).sum()) > 1e-10)
        throw std::invalid_argument("Laplacian GSO row " + std::to_string(i) + " does not sum to 0");
    }
  }
  if (symmetric_ && (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("GSO flagged symmetric but S != S^T");
}

Index Gso::edge_count() const {
  Index count = 0;
  const Index n = matrix_.rows();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j && matrix_(i, j) != 0.0 && (!symmetric_ || i < j)) ++count;
  return count;
}

CMatrix SpectralDecomp::vandermonde(Index order) const {
  const Index n = eigvals.size();
  CMatrix psi(n, order);
  for (Index i = 0; i < n; ++i) {
    std::complex<double> p = 1.0;
    for (Index j = 0; j < order; ++j) {
      psi(i, j) = p;
      p *= eigvals(i);
    }
  }
  return psi;
}

SpectralDecomp spectral_decomp(const Matrix& s, bool symmetric) {
  SpectralDecomp out;
  if (symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigendecomposition failed");
    out.eigvecs = es.eigenvectors().cast<std::complex<double>>();
    out.eigvals = es.eigenvalues().cast<std::complex<double>>();
    out.inv_eigvecs = es.eigenvectors().transpose().cast<std::complex<double>>();
    return out;
  }
  Eigen::EigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  out.eigvecs = es.eigenvectors();
  out.eigvals = es.eigenvalues();
  Eigen::PartialPivLU<CMatrix> lu(out.eigvecs);
  out.inv_eigvecs = lu.inverse();
  if (!out.inv_eigvecs.allFinite()) throw std::runtime_error("GSO is not diagonalizable");
  return out;
}

GraphFilter build_filter(const Matrix& s, const Vector& h) {
  const Index n = s.rows();
  if (h.size() > n) throw std::invalid_argument("filter order exceeds node count");
  GraphFilter f;
  f.coeffs = h;
  if (h.size() == 0) {
    f.matrix = Matrix::Zero(n, n);
    return f;
  }
  Matrix acc = h(h.size() - 1) * Matrix::Identity(n, n);
  for (Index r = h.size() - 2; r >= 0; --r) {
    acc = acc * s;
    acc.diagonal().array() += h(r);
  }
  f.matrix = std::move(acc);
  return f;
}

SignalSet synthesize_signals(const GraphFilter& filter, Index m, double noise_power,
                             InputDistribution /*dist*/, std::uint64_t seed) {
  if (!filter.matrix) throw std::invalid_argument("filter has no matrix form");
  if (noise_power < 0.0) throw std::invalid_argument("noise power must be non-negative");
  const Matrix& h = *filter.matrix;
  const Index n = h.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SignalSet out;
  out.noise_power = noise_power;
  out.x.resize(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) out.x(i, j) = normal(rng);
  out.y = h * out.x;
  if (noise_power > 0.0) {
    const double sigma =
        std::sqrt(noise_power * out.y.squaredNorm() / static_cast<double>(n * m));
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n; ++i) out.y(i, j) += sigma * normal(rng);
  }
  return out;
}

namespace {

bool has_empty_row(const Matrix& a) {
  for (Index i = 0; i < a.rows(); ++i)
    if ((a.row(i).array() == 0.0).all()) return true;
  return false;
}

}  // namespace

Gso generate_er(Index n, double p, bool symmetric, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("ER graph needs at least 2 nodes");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("link probability must lie in (0,1)");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution link(p);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix a = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = symmetric ? i + 1 : 0; j < n; ++j) {
        if (i == j) continue;
        if (link(rng)) {
          a(i, j) = 1.0;
          if (symmetric) a(j, i) = 1.0;
        }
      }
    }
    if (!has_empty_row(a)) return Gso::adjacency(std::move(a), symmetric);
  }
  throw std::runtime_error("ER generation failed: 100 draws had an isolated row (p too small?)");
}

Gso generate_small_world(Index n, Index k, double rewire_p, std::uint64_t seed) {
  if (k <= 0 || k % 2 != 0 || k >= n) throw std::invalid_argument("small world needs even 0 < k < n");
  if (rewire_p < 0.0 || rewire_p > 1.0) throw std::invalid_argument("rewire probability outside [0,1]");
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 1; d <= k / 2; ++d) {
      const Index j = (i + d) % n;
      a(i, j) = a(j, i) = 1.0;
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (Index d = 1; d <= k / 2; ++d) {
    for (Index i = 0; i < n; ++i) {
      const Index j = (i + d) % n;
      if (a(i, j) == 0.0 || unif(rng) >= rewire_p) continue;
      // the node must still have a free target, otherwise keep the edge
      if ((a.row(i).array() != 0.0).count() >= n - 1) continue;
      Index t;
      do {
        t = pick(rng);
      } while (t == i || a(i, t) != 0.0);
      a(i, j) = a(j, i) = 0.0;
      a(i, t) = a(t, i) = 1.0;
    }
  }
  return Gso::adjacency(std::move(a), true);
}

double nerr(const Eigen::Ref<const Matrix>& estimate, const Eigen::Ref<const Matrix>& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw std::invalid_argument("nerr: shape mismatch");
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("nerr: truth has zero norm");
  return (estimate - truth).squaredNorm() / denom;
}

double commutator_norm(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("commutator_norm: need square matrices of equal size");
  return (a * b - b * a).norm();
}

Matrix sample_covariance(const Matrix& signals) {
  if (signals.cols() < 1) throw std::invalid_argument("sample_covariance: no signals");
  return signals * signals.transpose() / static_cast<double>(signals.cols());
}

}  // namespace rgfi
