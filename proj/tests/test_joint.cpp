#include <doctest.h>

#include "rgfi/joint.hpp"
#include "support.hpp"

using namespace rgfi;

namespace {

MultiSignalSet joint_data(const Gso& s, Index k, Index m, std::uint64_t seed) {
  MultiSignalSet d;
  for (Index i = 0; i < k; ++i) {
    GraphFilter f = build_filter(s, test::gaussian(3, 1, seed + 10 * i));
    const SignalSet sig = synthesize_signals(f, m, 0.01, InputDistribution::GaussianWhite, seed + 10 * i + 1);
    d.xs.push_back(sig.x);
    d.ys.push_back(sig.y);
  }
  return d;
}

Gso perturbed(const Gso& s, std::uint64_t seed) {
  PerturbationSpec ps;
  ps.seed = seed;
  return perturb(s, ps);
}

}  // namespace

TEST_CASE("joint solver with one filter is the single-filter solver") {
  const Gso s = generate_er(10, 0.3, true, 1);
  const MultiSignalSet d = joint_data(s, 1, 25, 2);
  const Gso sbar = perturbed(s, 3);
  SolverConfig c;
  c.t_max = 5;
  const JointResult j = joint_rfi(d, sbar, c);
  const RfiResult r = rfi_alternating(d.xs[0], d.ys[0], sbar, c);
  CHECK(j.filters[0] == r.h_hat);
  CHECK(j.s_hat.matrix() == r.s_hat.matrix());
  REQUIRE(j.trace.size() == r.trace.size());
  for (std::size_t t = 0; t < j.trace.size(); ++t) CHECK(j.trace[t].objective == r.trace[t].objective);
}

TEST_CASE("joint solver: monotone descent at fixed gamma") {
  const Gso s = generate_er(10, 0.3, true, 5);
  const MultiSignalSet d = joint_data(s, 3, 15, 6);
  const Gso sbar = perturbed(s, 7);
  SolverConfig c;
  c.gamma = GammaSchedule::fixed(1.0);
  c.t_max = 6;
  c.rel_tol = 0;
  const JointResult j = joint_rfi(d, sbar, c);
  for (std::size_t t = 1; t < j.trace.size(); ++t)
    CHECK(j.trace[t].objective <= j.trace[t - 1].objective * (1 + 1e-9) + 1e-12);
  const double f = joint_objective(d, j.filters, j.s_hat.matrix(), sbar.matrix(), c, 1.0);
  CHECK(f == doctest::Approx(j.trace.back().objective).epsilon(1e-10));
}

TEST_CASE("joint data validation") {
  const Gso s = generate_er(6, 0.4, true, 1);
  MultiSignalSet d = joint_data(s, 2, 5, 1);
  d.alpha = {1.0};
  CHECK_THROWS(d.validate(6));
  d.alpha = {1.0, -1.0};
  CHECK_THROWS(d.validate(6));
  d.alpha.clear();
  CHECK_NOTHROW(d.validate(6));
  CHECK_THROWS(d.validate(7));
}

TEST_CASE("AR(1) with inputs reduces to the single-filter solver on stacked snapshots") {
  const Gso s = generate_er(8, 0.4, true, 2);
  const ArSynthesis syn = synthesize_ar(s.matrix(), 1, 3, 30, 2, true, 3);
  const Gso sbar = perturbed(s, 4);
  SolverConfig c;
  c.t_max = 4;
  const JointResult a = ar_rfi(syn.series, sbar, c);

  const auto& ys = syn.series.ys;
  const auto& xs = *syn.series.xs;
  Matrix x(8, 2 * (ys.size() - 1)), y(8, 2 * (ys.size() - 1));
  for (std::size_t t = 1; t < ys.size(); ++t) {
    x.middleCols(2 * static_cast<Index>(t - 1), 2) = ys[t - 1];
    y.middleCols(2 * static_cast<Index>(t - 1), 2) = ys[t] - xs[t];
  }
  const RfiResult r = rfi_alternating(x, y, sbar, c);
  CHECK((a.filters[0] - r.h_hat).norm() < 1e-9 * r.h_hat.norm());
  CHECK((a.s_hat.matrix() - r.s_hat.matrix()).norm() < 1e-9);
}

TEST_CASE("AR least squares recovers noiseless dynamics") {
  const Gso s = generate_er(6, 0.4, true, 8);
  const ArSynthesis syn = synthesize_ar(s.matrix(), 2, 3, 80, 1, true, 9);
  const auto fit = ar_least_squares(syn.series);
  for (std::size_t k = 0; k < 2; ++k) CHECK((fit[k] - syn.filters[k]).norm() < 1e-8);
  CHECK(ar_fit_cost(syn.series, syn.filters) < 1e-20);
  double radius = 0;
  for (const auto& h : syn.filters) radius += Eigen::JacobiSVD<Matrix>(h).singularValues()(0);
  CHECK(radius == doctest::Approx(0.9));
}

TEST_CASE("AR solver: Gauss-Seidel and Jacobi both descend") {
  const Gso s = generate_er(8, 0.4, true, 10);
  const ArSynthesis syn = synthesize_ar(s.matrix(), 3, 3, 60, 1, false, 11);
  const Gso sbar = perturbed(s, 12);
  SolverConfig c;
  c.gamma = GammaSchedule::fixed(1.0);
  c.t_max = 5;
  c.rel_tol = 0;
  for (bool jacobi : {false, true}) {
    ArOptions o;
    o.jacobi = jacobi;
    o.passes = jacobi ? 1 : 2;
    const JointResult r = ar_rfi(syn.series, sbar, c, o);
    REQUIRE(r.filters.size() == 3);
    if (!jacobi)
      for (std::size_t t = 1; t < r.trace.size(); ++t)
        CHECK(r.trace[t].objective <= r.trace[t - 1].objective * (1 + 1e-9) + 1e-12);
    const double f = ar_objective(syn.series, r.filters, r.s_hat.matrix(), sbar.matrix(), c, 1.0);
    CHECK(f == doctest::Approx(r.trace.back().objective).epsilon(1e-10));
  }
}

TEST_CASE("AR prediction") {
  const Matrix y0 = test::gaussian(4, 1, 1), y1 = test::gaussian(4, 1, 2);
  const auto copy = ar_predict({Matrix::Identity(4, 4)}, {y0, y1}, 3);
  REQUIRE(copy.size() == 3);
  for (const auto& p : copy) CHECK(p == y1);

  const Matrix h1 = 0.5 * Matrix::Identity(4, 4), h2 = 0.25 * Matrix::Identity(4, 4);
  const std::vector<Matrix> x{Matrix::Ones(4, 1), 2 * Matrix::Ones(4, 1)};
  const auto p = ar_predict({h1, h2}, {y0, y1}, 2, &x);
  const Matrix first = 0.5 * y1 + 0.25 * y0 + x[0];
  CHECK((p[0] - first).norm() < 1e-14);
  CHECK((p[1] - (0.5 * first + 0.25 * y1 + x[1])).norm() < 1e-14);
  CHECK_THROWS(ar_predict({h1, h2}, {y0}, 1));
}

TEST_CASE("AR series validation") {
  ArSeries a;
  a.order = 3;
  a.ys = {Matrix::Zero(2, 1), Matrix::Zero(2, 1), Matrix::Zero(2, 1)};
  CHECK_THROWS(a.validate());
  a.ys.push_back(Matrix::Zero(2, 1));
  CHECK_NOTHROW(a.validate());
  a.ys.push_back(Matrix::Zero(3, 1));
  CHECK_THROWS(a.validate());
}
