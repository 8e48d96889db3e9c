#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rgfi/linalg.hpp"
#include "rgfi/solver.hpp"
#include "support.hpp"

using namespace rgfi;

namespace {

struct Instance {
  Gso s;
  Gso sbar;
  Vector h;
  Matrix hm;
  SignalSet sig;
};

Instance make_instance(Index n, Index order, Index m, double noise, double ratio, std::uint64_t seed) {
  Gso s = generate_er(n, 0.25, true, seed);
  Vector h = test::gaussian(order, 1, seed + 1);
  Matrix hm = *build_filter(s, h).matrix;
  hm *= std::sqrt(static_cast<double>(n)) / hm.norm();
  h *= std::sqrt(static_cast<double>(n)) / (*build_filter(s, h).matrix).norm();
  GraphFilter f;
  f.matrix = hm;
  SignalSet sig = synthesize_signals(f, m, noise, InputDistribution::GaussianWhite, seed + 2);
  PerturbationSpec ps;
  ps.ratio = ratio;
  ps.seed = seed + 3;
  Gso sbar = perturb(s, ps);
  return {std::move(s), std::move(sbar), std::move(h), std::move(hm), std::move(sig)};
}

}  // namespace

TEST_CASE("gamma schedule doubles up to the cap") {
  GammaSchedule g{1.0, 2.0, 10.0};
  CHECK(g.at(0) == 1.0);
  CHECK(g.at(3) == 8.0);
  CHECK(g.at(4) == 10.0);
  CHECK(GammaSchedule::fixed(3.0).at(7) == 3.0);
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.lambda = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.delta1 = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.t_max = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.family = GsoFamily::CombinatorialLaplacian;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("closed-form identification recovers exact coefficients") {
  const Instance in = make_instance(20, 4, 100, 0.0, 0.0, 17);
  const FiResult fr = fi_closed_form(in.sig.x, in.sig.y, in.s, 4);
  CHECK(!fr.rank_deficient);
  CHECK((fr.h - in.h).squaredNorm() / in.h.squaredNorm() < 1e-8);
  const FiResult rc = recover_coeffs(in.hm, in.s.matrix(), 4);
  CHECK((rc.h - in.h).squaredNorm() / in.h.squaredNorm() < 1e-8);
  CHECK_THROWS(fi_closed_form(in.sig.x, in.sig.y, in.s, 21));
}

TEST_CASE("closed-form identification equals least squares on the explicit powers") {
  const Instance in = make_instance(8, 3, 30, 0.2, 0.0, 5);
  const FiResult fr = fi_closed_form(in.sig.x, in.sig.y, in.s, 3);
  Matrix design(8 * 30, 3);
  Matrix p = Matrix::Identity(8, 8);
  for (Index r = 0; r < 3; ++r) {
    design.col(r) = vec(p * in.sig.x);
    p = p * in.s.matrix();
  }
  const Vector oracle = design.colPivHouseholderQr().solve(vec(in.sig.y));
  CHECK((fr.h - oracle).norm() < 1e-8 * oracle.norm());
}

TEST_CASE("identifiability check") {
  const Gso s = generate_er(8, 0.4, true, 3);
  const IdentifiabilityReport ok = identifiability_check(test::gaussian(8, 10, 1), s);
  CHECK(ok.distinct_eigs == (ok.min_gap > 1e-8));
  CHECK(ok.excited_frequencies);
  // complete graph: eigenvalue -1 with multiplicity N-1
  Matrix k = Matrix::Ones(6, 6);
  k.diagonal().setZero();
  const IdentifiabilityReport bad = identifiability_check(test::gaussian(6, 10, 2), Gso::adjacency(k, true));
  CHECK(!bad.distinct_eigs);
  const IdentifiabilityReport silent = identifiability_check(Matrix::Zero(8, 3), s);
  CHECK(!silent.excited_frequencies);
}

TEST_CASE("step 1 matches a least-squares oracle") {
  const Matrix x = test::gaussian(4, 6, 1);
  const Matrix y = test::gaussian(4, 6, 2);
  const Matrix s = generate_er(4, 0.6, true, 3).matrix();
  const Matrix c = test::gaussian(4, 4, 4);
  const double gamma = 2.0, rho = 0.5;
  const std::vector<CommutePenalty> extra{{c, rho}};
  const Matrix h = rfi_step1(x, y, s, gamma, extra);

  Matrix a = Matrix::Zero(24 + 32, 16);
  Vector b = Vector::Zero(24 + 32);
  b.head(24) = vec(y);
  for (Index col = 0; col < 16; ++col) {
    Matrix e = Matrix::Zero(4, 4);
    e(col % 4, col / 4) = 1.0;
    a.col(col).head(24) = vec(e * x);
    a.col(col).segment(24, 16) = std::sqrt(gamma) * vec(s * e - e * s);
    a.col(col).segment(40, 16) = std::sqrt(rho) * vec(c * e - e * c);
  }
  const Vector oracle = a.colPivHouseholderQr().solve(b);
  CHECK((vec(h) - oracle).norm() < 1e-9 * oracle.norm());

  const Matrix xw = test::gaussian(4, 10, 5);
  const Matrix yw = test::gaussian(4, 10, 6);
  const Matrix ls = yw * xw.transpose() * (xw * xw.transpose()).inverse();
  CHECK((rfi_step1(xw, yw, s, 0.0) - ls).norm() < 1e-9 * ls.norm());
}

TEST_CASE("step 1 falls back when the system is singular") {
  const Matrix x = Matrix::Zero(3, 2);
  const Matrix y = Matrix::Zero(3, 2);
  Matrix s = Matrix::Zero(3, 3);
  s(0, 1) = s(1, 0) = 1;
  const Matrix h = rfi_step1(x, y, s, 1.0);
  CHECK(h.allFinite());
  CHECK_THROWS(rfi_step1(x, y, s, -1.0));
}

TEST_CASE("MM weights: direct formulas") {
  Matrix s(1, 1), sb(1, 1);
  s << 0.5;
  sb << 0.2;
  const MmWeights w = mm_weights(s, sb, 0.1, 0.1);
  CHECK(w.prox(0, 0) == doctest::Approx(2.5));
  CHECK(w.sparsity(0, 0) == doctest::Approx(1.0 / 0.6));
  const Matrix a = generate_er(5, 0.5, true, 1).matrix();
  const MmWeights at = mm_weights(a, a, 1e-3, 1e-3);
  CHECK((at.prox.array() == 1e3).all());
  const MmWeights u = unit_weights(3);
  CHECK((u.prox.array() == 1.0).all());
  CHECK((u.sparsity.array() == 1.0).all());
  CHECK_THROWS(mm_weights(a, a, 0.0, 1.0));
}

TEST_CASE("MM linearization is a tangent upper bound of the log penalty") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double delta = std::pow(10.0, test::uniform(rng, -3, 0));
    const double z0 = test::uniform(rng, -2, 2);
    const double w = 1.0 / (std::abs(z0) + delta);
    auto f = [&](double z) { return std::log(std::abs(z) + delta); };
    auto g = [&](double z) { return f(z0) + w * (std::abs(z) - std::abs(z0)); };
    CHECK(g(z0) == doctest::Approx(f(z0)));
    for (int k = 0; k < 50; ++k) {
      const double z = test::uniform(rng, -3, 3);
      CHECK(g(z) >= f(z) - 1e-12);
    }
    // one-sided directional derivatives at z0
    const double eps = 1e-7;
    for (double dir : {-1.0, 1.0}) {
      const double df = (f(z0 + dir * eps) - f(z0)) / eps;
      const double dg = (g(z0 + dir * eps) - g(z0)) / eps;
      CHECK(dg >= df - 1e-5);
    }
  }
  Matrix z = Matrix::Zero(3, 3);
  CHECK(log_penalty(z, 1e-3) == doctest::Approx(9.0 * std::log(1e-3)));
}

TEST_CASE("coordinate update matches a 1-D grid search") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    CoordTerms t;
    t.s_bar = trial % 4 == 0 ? 0.0 : test::uniform(rng, 0, 2);
    t.prox_weight = test::uniform(rng, 0, 3);
    t.sparsity_weight = test::uniform(rng, 0, 1);
    t.curvature = trial % 10 == 0 ? 0.0 : test::uniform(rng, 0.05, 4);
    t.linear = t.curvature == 0.0 ? 0.0 : test::uniform(rng, -3, 3);
    const double s = coord_update(t);
    CHECK(s >= 0.0);
    const double oracle = test::grid_minimize([&](double v) { return t.objective(v); }, 0.0, 50.0);
    CHECK(t.objective(s) <= t.objective(oracle) + 1e-9);
  }
}

TEST_CASE("coordinate update dead zone keeps s_bar") {
  // |2 linear + sparsity| <= prox makes s_bar optimal when the curvature is small
  CoordTerms t;
  t.s_bar = 0.7;
  t.prox_weight = 1.0;
  t.sparsity_weight = 0.1;
  t.curvature = 0.01;
  t.linear = -0.2 - 0.007;  // puts the unconstrained minimizer inside the dead zone
  CHECK(coord_update(t) == 0.7);
  t.prox_weight = 0.0;
  t.linear = 1.0;
  CHECK(coord_update(t) == 0.0);
  // zero curvature, prox dominates
  CoordTerms flat;
  flat.s_bar = 0.4;
  flat.prox_weight = 1.0;
  flat.sparsity_weight = 0.5;
  CHECK(coord_update(flat) == 0.4);
  flat.sparsity_weight = 2.0;
  CHECK(coord_update(flat) == 0.0);
  // raw-quantity overload agrees
  const Vector sigma = test::gaussian(9, 1, 1), r = test::gaussian(9, 1, 2);
  CoordTerms raw;
  raw.s_bar = 0.3;
  raw.prox_weight = 0.5 * 2.0;
  raw.sparsity_weight = 0.1 * 3.0;
  raw.curvature = 1.5 * sigma.squaredNorm();
  raw.linear = 1.5 * sigma.dot(r);
  CHECK(coord_update(0.3, sigma, r, 3.0, 2.0, 0.5, 0.1, 1.5) == coord_update(raw));
}

TEST_CASE("coordinate descent decreases the surrogate and matches a subgradient oracle") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (bool sym : {true, false}) {
      const Gso s = generate_er(5, 0.5, sym, 50 + seed);
      PerturbationSpec ps;
      ps.ratio = 0.3;
      ps.seed = seed;
      const Gso sbar = perturb(s, ps);
      const Matrix h = *build_filter(s, test::gaussian(3, 1, 200 + seed)).matrix;
      SolverConfig c;
      c.lambda = 0.1;
      c.beta = 0.01;
      c.symmetric = sym;
      const MmWeights w = mm_weights(0.9 * sbar.matrix(), sbar.matrix(), 0.1, 0.1);
      const DenoiseProblem p = make_denoise_problem(std::span<const Matrix>(&h, 1), sbar, w, c, 1.0);

      double prev = p.objective(sbar.matrix());
      bool monotone = true;
      CdOptions o;
      o.change_tol = 1e-13;
      o.on_update = [&](const Matrix& cur) {
        const double f = p.objective(cur);
        if (f > prev + 1e-12 * std::abs(prev)) monotone = false;
        prev = f;
      };
      const CdOutcome cd = denoise_coord_descent(p, sbar.matrix(), o);
      CHECK(monotone);
      CHECK((cd.s.array() >= 0).all());
      CHECK(cd.s.diagonal().isZero(0));
      if (sym) CHECK(cd.s == cd.s.transpose());
      // incrementally maintained residual is exact
      CHECK((cd.residuals[0] - vec(cd.s * h - h * cd.s)).norm() < 1e-9);

      const test::SubgradientResult orc = test::subgradient_oracle(p, sbar.matrix(), 30000, 0.5);
      const double f = p.objective(cd.s);
      CHECK(f <= orc.objective + 1e-4 * std::abs(orc.objective));
      CHECK(f >= orc.objective - 1e-3 * std::abs(orc.objective));
    }
  }
}

TEST_CASE("denoising rejects infeasible starts") {
  const Gso sbar = generate_er(4, 0.6, true, 1);
  SolverConfig c;
  const Matrix h = Matrix::Identity(4, 4);
  const DenoiseProblem p =
      make_denoise_problem(std::span<const Matrix>(&h, 1), sbar, unit_weights(4), c, 1.0);
  Matrix bad = sbar.matrix();
  bad(0, 0) = 1.0;
  CHECK_THROWS(denoise_coord_descent(p, bad, {}));
  bad(0, 0) = 0.0;
  bad(0, 1) = -1.0;
  CHECK_THROWS(denoise_coord_descent(p, bad, {}));
}

TEST_CASE("objective at S = Sbar") {
  const Instance in = make_instance(6, 3, 10, 0.1, 0.0, 3);
  SolverConfig c;
  c.beta = 0.0;
  const double f = objective_eval(in.hm, in.s.matrix(), in.sig.x, in.sig.y, in.s.matrix(), c, 0.0);
  CHECK(f == doctest::Approx((in.sig.y - in.hm * in.sig.x).squaredNorm() + c.lambda * 36.0 * std::log(c.delta1)));
}

TEST_CASE("alternating solver: monotone descent at fixed gamma") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance in = make_instance(12, 3, 40, 0.05, 0.1, 100 + seed);
    SolverConfig c;
    c.gamma = GammaSchedule::fixed(1.0);
    c.t_max = 8;
    c.rel_tol = 0;
    const RfiResult r = rfi_alternating(in.sig.x, in.sig.y, in.sbar, c);
    REQUIRE(r.trace.size() == 8);
    for (std::size_t t = 1; t < r.trace.size(); ++t) {
      const double prev = r.trace[t - 1].objective;
      CHECK(r.trace[t].objective_after_filter <= prev + 1e-9 * std::abs(prev));
      CHECK(r.trace[t].objective <= r.trace[t].objective_after_filter + 1e-9 * std::abs(prev));
    }
    CHECK(r.h_coeffs.has_value());
    CHECK(r.s_hat.symmetric());
  }
}

TEST_CASE("alternating solver improves on the perturbed graph") {
  const Instance in = make_instance(15, 3, 60, 0.01, 0.1, 7);
  const RfiResult r = rfi_alternating(in.sig.x, in.sig.y, in.sbar, SolverConfig{});
  CHECK(nerr(r.s_hat.matrix(), in.s.matrix()) < nerr(in.sbar.matrix(), in.s.matrix()));
  const Vector fi = fi_closed_form(in.sig.x, in.sig.y, in.sbar, 3).h;
  CHECK(nerr(r.h_hat, in.hm) < nerr(*build_filter(in.sbar, fi).matrix, in.hm));
}

TEST_CASE("stationary variant with zero weights equals the plain solver") {
  const Instance in = make_instance(10, 3, 30, 0.05, 0.1, 9);
  SolverConfig c;
  c.rho_x = c.rho_y = c.rho_h = 0.0;
  c.t_max = 4;
  const RfiResult a = rfi_alternating(in.sig.x, in.sig.y, in.sbar, c);
  const RfiResult b = rfi_alternating_stationary(in.sig.x, in.sig.y, in.sbar, c);
  CHECK(a.h_hat == b.h_hat);
  CHECK(a.s_hat.matrix() == b.s_hat.matrix());
}

TEST_CASE("run report lists iterations") {
  const Instance in = make_instance(8, 2, 20, 0.05, 0.1, 2);
  SolverConfig c;
  c.t_max = 3;
  const RfiResult r = rfi_alternating(in.sig.x, in.sig.y, in.sbar, c);
  const std::string csv = run_report_csv(r);
  CHECK(csv.rfind("iteration,objective,step1_ms,step2_ms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(1 + r.trace.size()));
}
