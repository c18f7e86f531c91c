#include <doctest.h>

#include <cmath>

#include "potform/pipeline.hpp"

using namespace potform;

namespace {

double r2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

double manufactured_f(const Point& x) {
  const double d = 1.0 - r2(x);
  return 4.0 * r2(x) * d * d * d;
}

double radial_v(const Point& x) {
  const double s = r2(x);
  return s / 4.0 - s * s / 16.0 - 3.0 / 16.0;
}

}  // namespace

TEST_CASE("schedules") {
  const auto s = geometric_schedule();
  CHECK(s.size() == 12);
  CHECK(s.front() == 1.0);
  CHECK(s.back() == std::ldexp(1.0, -11));
  CHECK_NOTHROW(validate_schedule(s));
  CHECK_THROWS_AS(validate_schedule({}), std::invalid_argument);
  CHECK_THROWS_AS(validate_schedule({0.4, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(validate_schedule({0.4, 0.0}), std::invalid_argument);
}

TEST_CASE("homogeneous navier problems") {
  auto g = BallGrid::build(2, 1.0, 32);
  NavierBVP p;
  p.f = ScalarField(g);
  SUBCASE("constant g") {
    p.g = [](const Point&) { return 0.7; };
    const auto st = solve_navier(p, 0.0);
    CHECK(st.hj.w.sup_norm() == 0.0);
    CHECK(sup_distance(st.poisson.v, ScalarField(g, 0.7)) < 1e-8);
  }
  SUBCASE("cos theta") {
    p.g = [](const Point& x) { return x[0] / std::sqrt(r2(x)); };
    const auto st = solve_navier(p, 0.0);
    CHECK(st.hj.sweeps_used == 1);
    CHECK(sup_distance(st.poisson.v, harmonic_extension(p.g, g)) < 1e-7);
  }
}

TEST_CASE("manufactured full pipeline at eps = 0.1") {
  auto g = BallGrid::build(2, 1.0, 32);
  NavierBVP p;
  p.f = ScalarField::sample(g, [](const Point& x) { return 0.1 * (1.0 - r2(x)) + manufactured_f(x); });
  const auto st = solve_navier(p, 0.1);
  CHECK(st.certificate.verified);
  CHECK(sup_distance(st.hj.w, ScalarField::sample(g, [](const Point& x) { return 1.0 - r2(x); })) < 2.0 * g->spacing());
  CHECK(sup_distance(st.poisson.v, ScalarField::sample(g, radial_v)) < 1e-2);
}

TEST_CASE("warm starts outside the bracket are clipped") {
  auto g = BallGrid::build(2, 1.0, 16);
  NavierBVP p;
  p.f = ScalarField::sample(g, manufactured_f);
  const auto cold = solve_navier(p, 0.2);
  const auto warm = solve_navier(p, 0.2, ScalarField(g, 50.0));
  CHECK(sup_distance(cold.hj.w, warm.hj.w) < 1e-7);
}

TEST_CASE("continuation") {
  SUBCASE("f = 0 gives zero iterates and zero gaps") {
    auto g = BallGrid::build(2, 1.0, 16);
    NavierBVP p;
    p.f = ScalarField(g);
    p.schedule = {0.4, 0.2, 0.1};
    const auto r = continuation(p);
    CHECK(r.stages.size() == 3);
    for (double gap : r.gaps) CHECK(gap == 0.0);
    CHECK(r.w_limit.sup_norm() == 0.0);
  }
  SUBCASE("manufactured schedule") {
    auto g = BallGrid::build(2, 1.0, 32);
    NavierBVP p;
    p.f = ScalarField::sample(g, manufactured_f);
    p.schedule = {0.4, 0.2, 0.1, 0.05, 0.025};
    p.terminal_zero = true;
    const auto r = continuation(p);
    REQUIRE(r.gaps.size() == 4);
    CHECK(r.gaps_monotone);
    for (std::size_t k = 1; k < r.gaps.size(); ++k) CHECK(r.gaps[k] < r.gaps[k - 1]);

    const auto exact = ScalarField::sample(g, [](const Point& x) { return 1.0 - r2(x); });
    const double M = r.stages.front().certificate.M;
    const double K = green_convolve(ScalarField(g, 1.0)).sup_norm();
    for (std::size_t k = 0; k < r.stages.size(); ++k) {
      const auto& w = r.stages[k].hj.w;
      const double tol = 1e-8 * (1.0 + p.f.sup_norm());
      CHECK(w.min() >= 0.0);
      for (std::size_t n = 0; n < g->size(); ++n) {
        CHECK(w[n] <= M * (1.0 - r2(g->coord(n))) + 1e-12);
        // Decreasing eps raises w, and every w_eps stays below the eps = 0 solution.
        if (k + 1 < r.stages.size()) CHECK(w[n] <= r.stages[k + 1].hj.w[n] + tol);
        CHECK(w[n] <= exact[n] + 2.0 * g->spacing());
      }
      if (k + 1 < r.stages.size()) CHECK(r.v_gaps[k] <= K * r.gaps[k] * (1.0 + 1e-6) + 1e-9);
    }
    REQUIRE(r.terminal.has_value());
    CHECK(r.terminal->epsilon == 0.0);
    CHECK(sup_distance(r.w_limit, exact) < 2.0 * g->spacing());
    CHECK(sup_distance(r.v_limit, ScalarField::sample(g, radial_v)) < 1e-2);
    CHECK(r.closing_gap == doctest::Approx(sup_distance(r.stages.back().hj.w, r.terminal->hj.w)));

    CHECK(r.holder.size() == 3 * (r.stages.size() + 1));
    const std::string gaps = gaps_csv(r);
    CHECK(gaps.rfind("k,epsilon,next_epsilon,w_gap,v_gap,envelope_spread\n", 0) == 0);
    CHECK(holder_csv(r).rfind("epsilon,alpha,quotient\n", 0) == 0);
    for (std::size_t k = 1; k < r.envelope_spread.size(); ++k)
      CHECK(r.envelope_spread[k] <= r.envelope_spread[k - 1]);
  }
}

TEST_CASE("holder quotient") {
  auto g = BallGrid::build(2, 1.0, 16);
  auto lin = ScalarField::sample(g, [](const Point& x) { return 3.0 * x[0] - 4.0 * x[1]; });
  // Lipschitz constant of a linear map is its gradient norm.
  CHECK(holder_quotient(lin, 1.0) <= 5.0 + 1e-12);
  CHECK(holder_quotient(lin, 1.0) >= 4.0);
  CHECK(holder_quotient(ScalarField(g, 1.0), 0.5) == 0.0);
}
