#include <doctest.h>

#include <cmath>
#include <random>

#include "potform/barriers.hpp"
#include "potform/hj.hpp"

using namespace potform;

namespace {

double r2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

double manufactured_f(const Point& x) {
  const double d = 1.0 - r2(x);
  return 4.0 * r2(x) * d * d * d;
}

// Independent oracle: eps a + a^3 max((a-m)/hm, (a-p)/hp, 0)^2 = f by plain bisection.
double oracle_root_1d(double eps, double f, double m, double hm, double p, double hp) {
  auto lhs = [&](double a) {
    const double d = std::max({(a - m) / hm, (a - p) / hp, 0.0});
    return eps * a + a * a * a * d * d;
  };
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) <= f ? lo : hi) = mid;
  }
  return lo;
}

LocalStencil stencil_1d(double m, double hm, double p, double hp) {
  LocalStencil s;
  s.dim = 1;
  s.minus_value[0] = m;
  s.minus_length[0] = hm;
  s.plus_value[0] = p;
  s.plus_length[0] = hp;
  return s;
}

HJProblem problem_for(const ScalarField& f, double eps) {
  const BarrierCertificate cert = certify(f, eps);
  REQUIRE(cert.verified);
  return make_hj_problem(f, eps, cert.M);
}

ScalarField random_admissible_f(const GridPtr& g, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = scale * (0.5 + u(rng));
  const double a1 = u(rng), a2 = u(rng), ph = 6.283 * u(rng);
  return ScalarField::sample(g, [&](const Point& x) {
    const double d = 1.0 - r2(x);
    return c * r2(x) * d * d * d * (1.0 + a1 * std::sin(3.0 * x[0] + ph) * std::sin(3.0 * x[0] + ph) + a2 * x[1] * x[1]);
  });
}

}  // namespace

TEST_CASE("local solve") {
  SUBCASE("homogeneous node with eps > 0 gives zero") {
    const auto r = solve_local(0.5, 0.0, 1.0, stencil_1d(0.3, 1.0, 0.7, 1.0), 1e-12);
    CHECK(r.value == 0.0);
    CHECK_FALSE(r.barrier_violated);
  }
  SUBCASE("symmetric zero neighbors, eps = 1, f = 2: a + a^5 = 2") {
    const auto r = solve_local(1.0, 2.0, 5.0, stencil_1d(0.0, 1.0, 0.0, 1.0), 1e-12);
    CHECK(r.value == doctest::Approx(oracle_root_1d(1.0, 2.0, 0.0, 1.0, 0.0, 1.0)).epsilon(1e-10));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("eps = 0, f = 1: a^5 = 1") {
    const auto r = solve_local(0.0, 1.0, 5.0, stencil_1d(0.0, 1.0, 0.0, 1.0), 1e-12);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("asymmetric cut stencil matches the oracle") {
    const auto r = solve_local(0.5, 0.7, 5.0, stencil_1d(0.3, 0.5, 0.1, 1.0), 1e-13);
    const double a = oracle_root_1d(0.5, 0.7, 0.3, 0.5, 0.1, 1.0);
    CHECK(r.value == doctest::Approx(a).epsilon(1e-10));
    CHECK(local_operator(0.5, r.value, stencil_1d(0.3, 0.5, 0.1, 1.0)) == doctest::Approx(0.7).epsilon(1e-9));
  }
  SUBCASE("random stencils match the oracle in 1D") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      const double eps = u(rng), f = 2.0 * u(rng), m = u(rng), p = u(rng);
      const double hm = 0.05 + u(rng), hp = 0.05 + u(rng);
      const auto r = solve_local(eps, f, 10.0, stencil_1d(m, hm, p, hp), 1e-13);
      CHECK(r.value == doctest::Approx(oracle_root_1d(eps, f, m, hm, p, hp)).epsilon(1e-9));
    }
  }
  SUBCASE("upper bound too small flags a violation") {
    const auto r = solve_local(0.0, 1.0, 0.5, stencil_1d(0.0, 1.0, 0.0, 1.0), 1e-12);
    CHECK(r.barrier_violated);
    CHECK(r.value == 0.5);
  }
}

TEST_CASE("fast sweep with f = 0 stops after one round at zero") {
  auto g = BallGrid::build(2, 1.0, 16);
  for (double eps : {0.0, 0.3}) {
    auto sol = fast_sweep(problem_for(ScalarField(g), eps));
    CHECK(sol.converged);
    CHECK(sol.sweeps_used == 1);
    CHECK(sol.w.sup_norm() == 0.0);
  }
}

TEST_CASE("barrier violation propagates from fast sweep") {
  auto g = BallGrid::build(2, 1.0, 16);
  auto f = ScalarField::sample(g, manufactured_f);
  HJProblem p = make_hj_problem(f, 0.0, 0.5);
  CHECK_THROWS_AS(fast_sweep(p), BarrierViolation);
}

TEST_CASE("manufactured eps = 0 converges at first order to 1 - |x|^2") {
  double prev = 0.0;
  for (int m : {16, 32}) {
    auto g = BallGrid::build(2, 1.0, m);
    auto sol = fast_sweep(problem_for(ScalarField::sample(g, manufactured_f), 0.0));
    REQUIRE(sol.converged);
    const double err = sup_distance(sol.w, ScalarField::sample(g, [](const Point& x) { return 1.0 - r2(x); }));
    CHECK(err < 3.0 * g->spacing());
    const auto half = g->find({m / 2, 0, 0});
    CHECK(sol.w[static_cast<std::size_t>(half)] == doctest::Approx(0.75).epsilon(0.05));
    if (prev > 0.0) CHECK(prev / err >= 1.5);
    prev = err;
  }
}

TEST_CASE("manufactured eps = 0.1 with the eps term added") {
  auto g = BallGrid::build(2, 1.0, 32);
  auto f = ScalarField::sample(g, [](const Point& x) { return 0.1 * (1.0 - r2(x)) + manufactured_f(x); });
  auto sol = fast_sweep(problem_for(f, 0.1));
  REQUIRE(sol.converged);
  CHECK(sup_distance(sol.w, ScalarField::sample(g, [](const Point& x) { return 1.0 - r2(x); })) < 2.0 * g->spacing());
}

TEST_CASE("residual field") {
  auto g = BallGrid::build(2, 1.0, 16);
  auto f = ScalarField::sample(g, manufactured_f);
  HJProblem p = problem_for(f, 0.2);
  SUBCASE("zero is a subsolution") {
    auto res = residual_field(p, ScalarField(g));
    for (std::size_t n = 0; n < g->size(); ++n) CHECK(res[n] == doctest::Approx(-f[n]));
  }
  SUBCASE("converged fixed point") {
    auto sol = fast_sweep(p);
    REQUIRE(sol.converged);
    CHECK(residual_field(p, sol.w).sup_norm() <= p.tol * (1.0 + p.epsilon + f.max()));
  }
  SUBCASE("manufactured consistency") {
    double prev = 0.0;
    for (int m : {16, 32, 64}) {
      auto gm = BallGrid::build(2, 1.0, m);
      HJProblem pm = make_hj_problem(ScalarField::sample(gm, manufactured_f), 0.0, 1.1);
      const double res =
          residual_field(pm, ScalarField::sample(gm, [](const Point& x) { return 1.0 - r2(x); })).sup_norm();
      if (prev > 0.0) CHECK(prev / res >= 1.5);
      prev = res;
    }
  }
}

TEST_CASE("comparison in f and in eps, and independence of the start") {
  auto g = BallGrid::build(2, 1.0, 16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 4; ++t) {
    auto f1 = random_admissible_f(g, rng, 2.0);
    auto f2 = f1;
    for (std::size_t n = 0; n < g->size(); ++n) f2[n] += 0.5 * u(rng) * f1[n];
    const double eps = 0.05 + 0.5 * u(rng);
    auto p1 = problem_for(f1, eps);
    auto p2 = problem_for(f2, eps);
    p2.sup_bound = p1.sup_bound = p2.sup_bound;
    auto w1 = fast_sweep(p1).w;
    auto w2 = fast_sweep(p2).w;
    for (std::size_t n = 0; n < g->size(); ++n) CHECK(w1[n] <= w2[n] + 2.0 * p2.tol);

    auto pa = problem_for(f1, eps);
    auto pb = problem_for(f1, 2.0 * eps);
    auto wa = fast_sweep(pa).w;
    auto wb = fast_sweep(pb).w;
    for (std::size_t n = 0; n < g->size(); ++n) CHECK(wa[n] >= wb[n] - 2.0 * pa.tol);

    auto from_top = fast_sweep(pa, pa.sup_bound).w;
    CHECK(sup_distance(wa, from_top) <= 2.0 * pa.tol);
  }
}

TEST_CASE("sandwich and the sup bound") {
  auto g = BallGrid::build(2, 1.0, 16);
  auto f = ScalarField::sample(g, manufactured_f);
  for (double eps : {1.0, 0.1, 0.01}) {
    auto p = problem_for(f, eps);
    auto sol = fast_sweep(p);
    REQUIRE(sol.converged);
    CHECK(sol.w.min() >= 0.0);
    for (std::size_t n = 0; n < g->size(); ++n) CHECK(sol.w[n] <= p.sup_bound[n] + 1e-12);
    CHECK(sol.w.sup_norm() <= f.sup_norm() / eps + 1e-6);
  }
}

TEST_CASE("convergence log") {
  auto g = BallGrid::build(2, 1.0, 8);
  std::vector<ConvergenceRow> log;
  auto sol = fast_sweep(problem_for(ScalarField::sample(g, manufactured_f), 0.5), std::nullopt, &log);
  CHECK(log.size() == static_cast<std::size_t>(sol.sweeps_used));
  const std::string csv = convergence_csv(log);
  CHECK(csv.rfind("sweep_round,sup_change,max_residual\n", 0) == 0);
}

TEST_CASE("problem validation") {
  auto g = BallGrid::build(2, 1.0, 8);
  CHECK_THROWS_AS(make_hj_problem(ScalarField(g, -1.0), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_hj_problem(ScalarField(g), -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_hj_problem(ScalarField(g), 0.1, 0.0), std::invalid_argument);
}
