#include <doctest.h>

#include <set>

#include "rgfi/graph.hpp"
#include "support.hpp"

using namespace rgfi;

TEST_CASE("build_filter matches the explicit power sum") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Gso s = generate_er(9, 0.3, seed % 2 == 0, seed);
    const Vector h = test::gaussian(5, 1, 100 + seed);
    const Matrix hm = *build_filter(s, h).matrix;
    CHECK((hm - test::poly_naive(s.matrix(), h)).norm() <= 1e-10 * hm.norm());
  }
}

TEST_CASE("build_filter rejects more than N coefficients") {
  const Gso s = generate_er(4, 0.5, true, 1);
  CHECK_THROWS_AS(build_filter(s, Vector::Ones(5)), std::invalid_argument);
}

TEST_CASE("filters of the same GSO commute") {
  const Gso s = generate_er(12, 0.25, false, 3);
  const Matrix h = *build_filter(s, test::gaussian(4, 1, 4)).matrix;
  CHECK(commutator_norm(s.matrix(), h) <= 1e-10 * h.norm() * s.matrix().norm());
}

TEST_CASE("spectral decomposition reconstructs S") {
  for (bool sym : {true, false}) {
    const Gso s = generate_er(10, 0.3, sym, 7);
    const SpectralDecomp d = spectral_decomp(s);
    const CMatrix rec = d.eigvecs * d.eigvals.asDiagonal() * d.inv_eigvecs;
    CHECK((rec.real() - s.matrix()).norm() < 1e-9);
    CHECK(rec.imag().norm() < 1e-9);
    const CMatrix psi = d.vandermonde(3);
    for (Index i = 0; i < 10; ++i) CHECK(std::abs(psi(i, 2) - d.eigvals(i) * d.eigvals(i)) < 1e-12);
  }
}

TEST_CASE("Gso validates its family") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = 1;
  CHECK_THROWS_AS(Gso::adjacency(a, true), std::invalid_argument);
  a(1, 0) = 1;
  CHECK_NOTHROW(Gso::adjacency(a, true));
  a(2, 2) = 1;
  CHECK_THROWS_AS(Gso::adjacency(a, true), std::invalid_argument);
  a(2, 2) = 0;
  a(0, 1) = a(1, 0) = -1;
  CHECK_THROWS_AS(Gso::adjacency(a, true), std::invalid_argument);

  Matrix l(2, 2);
  l << 1, -1, -1, 1;
  CHECK_NOTHROW(Gso(l, GsoFamily::CombinatorialLaplacian, true));
  l(0, 0) = 2;
  CHECK_THROWS_AS(Gso(l, GsoFamily::CombinatorialLaplacian, true), std::invalid_argument);
}

TEST_CASE("ER graphs are reproducible and have no isolated rows") {
  const Gso a = generate_er(30, 0.1, true, 42);
  const Gso b = generate_er(30, 0.1, true, 42);
  CHECK(a.matrix() == b.matrix());
  CHECK((a.matrix().rowwise().sum().array() > 0).all());
  CHECK(a.matrix() == a.matrix().transpose());
  const Gso c = generate_er(30, 0.1, true, 43);
  CHECK(a.matrix() != c.matrix());
}

TEST_CASE("small-world graph keeps the ring degree on average") {
  const Gso s = generate_small_world(20, 4, 0.1, 5);
  CHECK(s.symmetric());
  CHECK(s.edge_count() == 20 * 4 / 2);
  CHECK_THROWS(generate_small_world(20, 3, 0.1, 5));
}

TEST_CASE("create/destroy perturbation touches the requested number of links") {
  const Gso s = generate_er(20, 0.2, true, 11);
  const Index e = s.edge_count();
  for (auto kind : {PerturbationKind::Create, PerturbationKind::Destroy, PerturbationKind::CreateDestroy}) {
    PerturbationSpec ps;
    ps.kind = kind;
    ps.ratio = 0.15;
    ps.seed = 9;
    const PerturbationResult r = perturb_detailed(s, ps);
    const auto changed = static_cast<Index>(r.created.size() + r.destroyed.size());
    CHECK(changed == std::llround(0.15 * static_cast<double>(e)));
    if (kind == PerturbationKind::Create) CHECK(r.destroyed.empty());
    if (kind == PerturbationKind::Destroy) CHECK(r.created.empty());
    for (const auto& [i, j] : r.created) {
      CHECK(s.matrix()(i, j) == 0.0);
      CHECK(r.perturbed.matrix()(i, j) == 1.0);
    }
    for (const auto& [i, j] : r.destroyed) {
      CHECK(s.matrix()(i, j) == 1.0);
      CHECK(r.perturbed.matrix()(i, j) == 0.0);
    }
    // entries outside the two lists are untouched
    const Matrix diff = (r.perturbed.matrix() - s.matrix()).cwiseAbs();
    CHECK(diff.sum() == doctest::Approx(2.0 * static_cast<double>(changed)));
  }
}

TEST_CASE("weight noise keeps the support and non-negativity") {
  const Gso s = generate_er(15, 0.3, true, 2);
  PerturbationSpec ps;
  ps.kind = PerturbationKind::WeightNoise;
  ps.ratio = 1.0;
  ps.weight_sigma = 0.5;
  ps.seed = 3;
  const Gso p = perturb(s, ps);
  CHECK(((p.matrix().array() != 0) == (s.matrix().array() != 0)).all());
  CHECK((p.matrix().array() >= 0).all());
  CHECK(p.matrix() == p.matrix().transpose());
}

TEST_CASE("destroy_links zeroes both directions") {
  const Gso s = generate_er(8, 0.5, true, 1);
  Index i = 0, j = 0;
  for (Index a = 0; a < 8 && i == j; ++a)
    for (Index b = a + 1; b < 8; ++b)
      if (s.matrix()(a, b) != 0) {
        i = a;
        j = b;
        break;
      }
  const Gso d = destroy_links(s, {{i, j}});
  CHECK(d.matrix()(i, j) == 0.0);
  CHECK(d.matrix()(j, i) == 0.0);
  CHECK(d.edge_count() == s.edge_count() - 1);
}

TEST_CASE("nerr and synthesized noise level") {
  Matrix t = Matrix::Ones(2, 2);
  CHECK(nerr(t, t) == 0.0);
  CHECK(nerr(Matrix::Zero(2, 2), t) == doctest::Approx(1.0));
  CHECK_THROWS(nerr(t, Matrix::Zero(2, 2)));

  const Gso s = generate_er(20, 0.2, true, 4);
  const GraphFilter f = build_filter(s, test::gaussian(3, 1, 5));
  const SignalSet sig = synthesize_signals(f, 4000, 0.1, InputDistribution::GaussianWhite, 6);
  const Matrix clean = *f.matrix * sig.x;
  CHECK((sig.y - clean).squaredNorm() / clean.squaredNorm() == doctest::Approx(0.1).epsilon(0.05));
  CHECK(sample_covariance(sig.x).diagonal().mean() == doctest::Approx(1.0).epsilon(0.05));
}
