#include <doctest.h>

#include <cmath>

#include "potform/poisson.hpp"

using namespace potform;

namespace {

double r2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

double radial_v(const Point& x) {
  const double s = r2(x);
  return s / 4.0 - s * s / 16.0 - 3.0 / 16.0;
}

double cos_theta(const Point& x) { return x[0] / std::sqrt(r2(x)); }
double cos_2theta(const Point& x) { return (x[0] * x[0] - x[1] * x[1]) / r2(x); }

}  // namespace

TEST_CASE("dirichlet solve") {
  SUBCASE("constant data is reproduced") {
    auto g = BallGrid::build(2, 1.0, 16);
    auto sol = solve_dirichlet({ScalarField(g), [](const Point&) { return 2.0; }});
    REQUIRE(sol.converged);
    for (std::size_t n = 0; n < g->size(); ++n) CHECK(sol.v[n] == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("radial closed form, second order") {
    double prev = 0.0;
    for (int m : {16, 32}) {
      auto g = BallGrid::build(2, 1.0, m);
      auto sol = solve_dirichlet({ScalarField::sample(g, [](const Point& x) { return 1.0 - r2(x); }), nullptr});
      REQUIRE(sol.converged);
      CHECK(sol.residual <= 1e-9 * 2.0);
      const double err = sup_distance(sol.v, ScalarField::sample(g, radial_v));
      CHECK(sol.v[static_cast<std::size_t>(g->find({0, 0, 0}))] == doctest::Approx(-0.1875).epsilon(1e-2));
      if (prev > 0.0) CHECK(prev / err >= 1.5);
      prev = err;
    }
  }
  SUBCASE("cos theta data gives x1") {
    auto g = BallGrid::build(2, 1.0, 32);
    auto sol = solve_dirichlet({ScalarField(g), cos_theta});
    CHECK(sup_distance(sol.v, ScalarField::sample(g, [](const Point& x) { return x[0]; })) < 1e-7);
    CHECK(sup_distance(sol.v, harmonic_extension(cos_theta, g)) < 1e-7);
  }
  SUBCASE("discrete maximum principle") {
    auto g = BallGrid::build(3, 1.0, 10);
    auto w = ScalarField::sample(g, [](const Point& x) { return std::exp(x[0]) * (1.0 + x[1] * x[1]); });
    auto sol = solve_dirichlet({w, nullptr});
    CHECK(sol.v.max() <= 0.0);
  }
}

TEST_CASE("harmonic extension") {
  auto g = BallGrid::build(2, 1.0, 16);
  CHECK(sup_distance(harmonic_extension([](const Point&) { return 1.0; }, g), ScalarField(g, 1.0)) < 1e-12);
  CHECK(poisson_integral(cos_theta, {0.5, 0.0, 0.0}, 2, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sup_distance(harmonic_extension(cos_2theta, g),
                     ScalarField::sample(g, [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; })) < 1e-10);
  // Near-boundary point where the kernel is sharply peaked.
  CHECK(poisson_integral(cos_theta, {0.999, 0.0, 0.0}, 2, 1.0) == doctest::Approx(0.999).epsilon(1e-10));
  auto g3 = BallGrid::build(3, 2.0, 8);
  auto ext = harmonic_extension([](const Point& x) { return x[2] + x[0] * x[1]; }, g3);
  CHECK(sup_distance(ext, ScalarField::sample(g3, [](const Point& x) { return x[2] + x[0] * x[1]; })) < 1e-9);
  CHECK_THROWS_AS(poisson_integral(cos_theta, {1.0, 0.0, 0.0}, 2, 1.0), std::invalid_argument);
}

TEST_CASE("green convolution") {
  auto g = BallGrid::build(2, 1.0, 32);
  CHECK(green_convolve(ScalarField(g)).sup_norm() == 0.0);
  auto w = ScalarField::sample(g, [](const Point& x) { return 1.0 - r2(x); });
  const auto v = green_convolve(w);
  CHECK(sup_distance(v, ScalarField::sample(g, radial_v)) < 5e-3);
  SUBCASE("linear") {
    auto w2 = ScalarField::sample(g, [](const Point& x) { return std::sin(3.0 * x[0]) + x[1]; });
    const auto lhs = green_convolve(2.5 * w + w2);
    const auto rhs = 2.5 * v + green_convolve(w2);
    CHECK(sup_distance(lhs, rhs) < 1e-13);
  }
  SUBCASE("agrees with dirichlet solve plus harmonic extension") {
    auto sol = solve_dirichlet({w, cos_theta});
    const auto composite = harmonic_extension(cos_theta, g) + v;
    CHECK(sup_distance(sol.v, composite) < 5e-3);
  }
  SUBCASE("3D radial oracle") {
    auto g3 = BallGrid::build(3, 1.0, 10);
    // Lap v = 1 with v = 0 on the unit sphere: v = (|x|^2 - 1) / 6.
    const auto v3 = green_convolve(ScalarField(g3, 1.0));
    CHECK(sup_distance(v3, ScalarField::sample(g3, [](const Point& x) { return (r2(x) - 1.0) / 6.0; })) < 1e-2);
  }
  CHECK_THROWS_AS(green_convolve(ScalarField(BallGrid::build(1, 1.0, 8))), std::invalid_argument);
}

TEST_CASE("second differences are bounded under refinement") {
  double prev = 0.0;
  for (int m : {16, 32}) {
    auto g = BallGrid::build(2, 1.0, m);
    auto sol = solve_dirichlet({ScalarField::sample(g, [](const Point& x) { return 1.0 - r2(x); }), nullptr});
    const double d2 = max_second_difference(sol.v);
    CHECK(d2 < 2.0);
    if (prev > 0.0) CHECK(d2 == doctest::Approx(prev).epsilon(0.2));
    prev = d2;
  }
}
