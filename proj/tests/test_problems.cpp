#include <doctest.h>

#include <cmath>

#include "lgf/problems.hpp"
#include "lgf/reduction.hpp"
#include "test_util.hpp"

using namespace lgf;

TEST_SUITE("problems") {

TEST_CASE("quadratic construction validates symmetry and definiteness") {
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(QuadraticProblem(asym, Vector::Zero(2)), Error);

  Matrix indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(QuadraticProblem(indef, Vector::Zero(2)), Error);
}

TEST_CASE("heat: zero source modes stay zero and the measurement reproduces bit-for-bit") {
  HeatInverseProblem::Params p;
  p.n_modes = 8;
  p.dt = 0.05;
  p.horizon = 0.5;
  HeatInverseProblem prob(p);

  // homogeneous problem with zero initial condition: identically zero
  HeatInverseProblem::Params hp = p;
  hp.source_amplitude = 0.0;
  HeatInverseProblem homogeneous(hp);
  Vector some_a(2);
  some_a << 1.3, 0.7;
  CHECK(homogeneous.forward_solve(some_a).cwiseAbs().maxCoeff() == 0.0);

  Vector a_true(2);
  a_true << 2.0, 1.0;
  const Matrix again = prob.forward_solve(a_true);
  CHECK((again - prob.measurement()).cwiseAbs().maxCoeff() == 0.0);

  // objective and gradient vanish at the truth (data is noise-free)
  const double z0 = prob.value(a_true);
  const Vector g0 = prob.gradient(a_true);
  CHECK(z0 <= 1e-12 * std::max(1.0, prob.measurement().squaredNorm()));
  CHECK(g0.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("heat: stiffness is symmetric and the objective is positive away from the truth") {
  HeatInverseProblem::Params p;
  p.n_modes = 10;
  p.dt = 0.02;
  p.horizon = 0.4;
  HeatInverseProblem prob(p);

  const Matrix stiff = prob.stiffness((Vector(2) << 1.7, 0.6).finished());
  CHECK((stiff - stiff.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * stiff.cwiseAbs().maxCoeff());

  for (double a1 : {0.5, 1.5, 3.5}) {
    for (double a2 : {0.5, 2.0, 4.0}) {
      if (a1 == 2.0 && a2 == 1.0) continue;
      Vector a(2);
      a << a1, a2;
      const double z = prob.value(a);
      CHECK(std::isfinite(z));
      CHECK(z > 0.0);
    }
  }

  Vector bad(2);
  bad << -1.0, 1.0;
  CHECK_THROWS_AS(prob.value(bad), Error);
}

TEST_CASE("heat: gradient matches central finite differences away from the minimum") {
  HeatInverseProblem::Params p;
  p.n_modes = 12;
  p.dt = 0.02;
  p.horizon = 0.5;
  HeatInverseProblem prob(p);
  Vector a(2);
  a << 3.0, 0.5;
  const Vector g = prob.gradient(a);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    Vector lo = a, hi = a;
    lo[i] -= h;
    hi[i] += h;
    const double fd = (prob.value(hi) - prob.value(lo)) / (2.0 * h);
    CHECK(std::abs(g[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("plaplace: hessian is symmetric and consistent with the gradient") {
  PlaplaceProblem::Params p;
  p.modes_per_dim = 3;
  p.quad_per_dim = 30;
  PlaplaceProblem prob(p);
  const Index n = prob.dim();

  for (std::uint64_t seed : {41, 42, 43}) {
    const Vector a = 0.8 * testutil::random_normal(n, 1, seed).col(0);
    const Matrix h = prob.hessian(a);
    CHECK((h - h.transpose()).norm() <= 1e-9 * h.norm());

    // directional: H d should match finite differences of the gradient
    const Vector d = testutil::random_normal(n, 1, seed + 100).col(0);
    const double step = 1e-6;
    const Vector g_hi = prob.gradient(a + step * d);
    const Vector g_lo = prob.gradient(a - step * d);
    const Vector hd_fd = (g_hi - g_lo) / (2.0 * step);
    const Vector hd = h * d;
    CHECK((hd - hd_fd).norm() <= 1e-4 * std::max(1.0, hd.norm()));
  }
}

TEST_CASE("plaplace: hessian_solve inverts the dense hessian") {
  PlaplaceProblem::Params p;
  p.modes_per_dim = 3;
  p.quad_per_dim = 25;
  PlaplaceProblem prob(p);
  const Vector a = 0.5 * testutil::random_normal(prob.dim(), 1, 51).col(0);
  const Vector rhs = testutil::random_normal(prob.dim(), 1, 52).col(0);
  const Vector x = prob.hessian_solve(a, rhs);
  const Matrix h = prob.hessian(a);
  CHECK((h * x - rhs).norm() <= 1e-8 * rhs.norm());
}

TEST_CASE("plaplace: sigma=0, p_nl=1 reduces to linear Poisson solved by one Newton step") {
  PlaplaceProblem::Params p;
  p.modes_per_dim = 4;
  p.p_nl = 1;
  p.sigma = 0.0;
  p.quad_per_dim = 40;
  PlaplaceProblem prob(p);
  const Index n = prob.dim();

  // direct Galerkin solve of the linear system H a = -g(0)
  const Vector zero = Vector::Zero(n);
  const Matrix h = prob.hessian(zero);
  const Vector g = prob.gradient(zero);
  const Vector direct = h.ldlt().solve(-g);

  const Vector newton = zero - prob.hessian_solve(zero, g);
  CHECK((newton - direct).norm() <= 1e-8 * std::max(1.0, direct.norm()));

  // and it is actually a stationary point
  CHECK(prob.gradient(newton).norm() <= 1e-6 * g.norm());
}

TEST_CASE("plaplace: damped newton decreases the energy from a seeded init") {
  PlaplaceProblem::Params p;
  p.modes_per_dim = 4;
  p.quad_per_dim = 30;
  PlaplaceProblem prob(p);
  const Index n = prob.dim();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  Vector a(n);
  for (Index i = 0; i < n; ++i) a[i] = unif(rng);

  double z = prob.value(a);
  for (int iter = 0; iter < 50; ++iter) {
    a = newton_step(prob, a, 0.15);
    const double z_next = prob.value(a);
    CHECK(z_next <= z + 1e-9 * std::abs(z));
    z = z_next;
  }
}

TEST_CASE("lowrank: gradients span exactly two dimensions") {
  SyntheticLowRankProblem prob(2000, 7);
  Matrix probes(2000, 6);
  for (int j = 0; j < 6; ++j) {
    probes.col(j) = prob.gradient(testutil::random_normal(2000, 1, 60 + j).col(0));
  }
  Eigen::BDCSVD<Matrix> svd(probes);
  CHECK(svd.singularValues()[2] <= 1e-10 * svd.singularValues()[0]);

  // flow stays in a0 + span(W)
  Vector a = testutil::random_normal(2000, 1, 70).col(0);
  const Vector a0 = a;
  for (int i = 0; i < 25; ++i) a = gd_step(prob, a, 0.1);
  Vector drift = a - a0;
  drift -= prob.w() * (prob.w().transpose() * drift);
  CHECK(drift.norm() <= 1e-10 * std::max(1.0, (a - a0).norm()));
}

TEST_CASE("valley: deterministic when sigma=0 and replayable when noisy") {
  NoisyValleyProblem clean(4, 0.0, 123);
  const Vector at = (Vector(4) << -1.2, 1.0, -1.2, 1.0).finished();
  CHECK((clean.gradient(at) - clean.gradient(at)).norm() == 0.0);
  CHECK_FALSE(clean.stochastic());

  NoisyValleyProblem noisy_a(4, 0.5, 99);
  NoisyValleyProblem noisy_b(4, 0.5, 99);
  CHECK(noisy_a.stochastic());
  // same seed, same call sequence -> identical draws
  for (int i = 0; i < 5; ++i) {
    CHECK((noisy_a.gradient(at) - noisy_b.gradient(at)).norm() == 0.0);
  }
  // the noise is actually there
  NoisyValleyProblem noisy_c(4, 0.5, 99);
  const Vector g1 = noisy_c.gradient(at);
  const Vector g2 = noisy_c.gradient(at);
  CHECK((g1 - g2).norm() > 0.0);
  // and unbiased around the exact gradient (loose sanity bound)
  NoisyValleyProblem noisy_d(4, 0.5, 7);
  Vector mean = Vector::Zero(4);
  const int draws = 4000;
  for (int i = 0; i < draws; ++i) mean += noisy_d.gradient(at);
  mean /= draws;
  CHECK((mean - noisy_d.exact_gradient(at)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("make_problem builds each kind with validated parameters") {
  {
    ProblemSpec spec{"quadratic", {{"n", "2"}, {"diag", "1,3"}}};
    const ProblemSetup setup = make_problem(spec, 5);
    Vector at(2);
    at << 1.0, 1.0;
    const Vector g = setup.objective->gradient(at);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 3.0);
  }
  {
    ProblemSpec spec{"heat_inverse", {{"n_modes", "6"}, {"dt", "0.05"}, {"horizon", "0.3"}}};
    const ProblemSetup setup = make_problem(spec, 5);
    CHECK(setup.objective->dim() == 2);
    CHECK(setup.initial_state.size() == 2);
  }
  {
    ProblemSpec spec{"synthetic_lowrank", {{"n", "256"}}};
    const ProblemSetup setup = make_problem(spec, 7);
    CHECK(setup.objective->dim() == 256);
    // deterministic given spec + seed
    const ProblemSetup again = make_problem(spec, 7);
    CHECK((setup.initial_state - again.initial_state).norm() == 0.0);
    const Vector probe = testutil::random_normal(256, 1, 80).col(0);
    CHECK((setup.objective->gradient(probe) - again.objective->gradient(probe)).norm() == 0.0);
  }

  CHECK_THROWS_AS(make_problem(ProblemSpec{"no_such_kind", {}}, 0), Error);
  CHECK_THROWS_AS(make_problem(ProblemSpec{"quadratic", {{"bogus", "1"}}}, 0), Error);
  CHECK_THROWS_AS(make_problem(ProblemSpec{"quadratic", {{"n", "not_a_number"}}}, 0), Error);
}

}  // TEST_SUITE
