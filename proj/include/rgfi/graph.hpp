#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rgfi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

enum class GsoFamily { Adjacency, CombinatorialLaplacian };

/// Dense graph-shift operator with a structural family tag.
///
/// The constructor validates the family invariants:
///   Adjacency              zero diagonal, non-negative entries
///   CombinatorialLaplacian non-positive off-diagonal, zero row sums (1e-10)
/// and, when `symmetric` is set, S == S^T within 1e-12.
/// Violations throw std::invalid_argument.
class Gso {
 public:
  Gso(Matrix matrix, GsoFamily family, bool symmetric);

  static Gso adjacency(Matrix matrix, bool symmetric) {
    return Gso(std::move(matrix), GsoFamily::Adjacency, symmetric);
  }

  const Matrix& matrix() const { return matrix_; }
  GsoFamily family() const { return family_; }
  bool symmetric() const { return symmetric_; }
  Index n() const { return matrix_.rows(); }

  /// Number of links: nonzero off-diagonal entries, counting each undirected
  /// pair once when the operator is symmetric.
  Index edge_count() const;

 private:
  Matrix matrix_;
  GsoFamily family_;
  bool symmetric_;
};

/// Eigendecomposition S = V diag(lambda) V^{-1}. Symmetric operators go
/// through a self-adjoint solver; everything else through the general
/// (complex) solver.
struct SpectralDecomp {
  CMatrix eigvecs;
  CVector eigvals;
  CMatrix inv_eigvecs;

  /// Vandermonde matrix Psi_ij = lambda_i^j, j = 0..order-1.
  CMatrix vandermonde(Index order) const;
};

SpectralDecomp spectral_decomp(const Matrix& s, bool symmetric);
inline SpectralDecomp spectral_decomp(const Gso& gso) {
  return spectral_decomp(gso.matrix(), gso.symmetric());
}

struct GraphFilter {
  std::optional<Vector> coeffs;
  std::optional<Matrix> matrix;
};

/// H = sum_r h_r S^r evaluated with Horner's scheme. Requires len(h) <= N.
GraphFilter build_filter(const Matrix& s, const Vector& h);
inline GraphFilter build_filter(const Gso& gso, const Vector& h) {
  return build_filter(gso.matrix(), h);
}

struct SignalSet {
  Matrix x;
  Matrix y;
  double noise_power = 0.0;
};

enum class InputDistribution { GaussianWhite };

/// X with i.i.d. N(0,1) entries, Y = HX + W where W is white Gaussian with
/// variance chosen so that E||W||_F^2 = noise_power * ||HX||_F^2.
SignalSet synthesize_signals(const GraphFilter& filter, Index m, double noise_power,
                             InputDistribution dist, std::uint64_t seed);

/// Erdos-Renyi adjacency. Retries (at most 100 times) until every row has a
/// nonzero entry; throws std::runtime_error otherwise.
Gso generate_er(Index n, double p, bool symmetric, std::uint64_t seed);

/// Watts-Strogatz small-world graph (undirected, unweighted). `k` must be
/// even and smaller than `n`.
Gso generate_small_world(Index n, Index k, double rewire_p, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Perturbations

enum class PerturbationKind { Create, Destroy, CreateDestroy, WeightNoise, Mixed };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::CreateDestroy;
  double ratio = 0.1;
  double weight_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

using Link = std::pair<Index, Index>;

struct PerturbationResult {
  Gso perturbed;
  std::vector<Link> created;
  std::vector<Link> destroyed;
};

PerturbationResult perturb_detailed(const Gso& gso, const PerturbationSpec& spec);
inline Gso perturb(const Gso& gso, const PerturbationSpec& spec) {
  return perturb_detailed(gso, spec).perturbed;
}

/// Zeroes the listed links (and their mirrors for symmetric operators).
Gso destroy_links(const Gso& gso, const std::vector<Link>& links);

// ---------------------------------------------------------------------------
// Metrics

/// ||estimate - truth||_F^2 / ||truth||_F^2. Throws on zero-norm truth.
double nerr(const Eigen::Ref<const Matrix>& estimate, const Eigen::Ref<const Matrix>& truth);

double commutator_norm(const Matrix& a, const Matrix& b);

/// (1/M) X X^T, the signals being treated as zero mean.
Matrix sample_covariance(const Matrix& signals);

}  // namespace rgfi
