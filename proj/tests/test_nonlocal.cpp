#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "potform/nonlocal.hpp"

using namespace potform;

namespace {

double bump(const Point& x, const Point& c, double radius) {
  const double d2 = ((x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]) + (x[2] - c[2]) * (x[2] - c[2])) /
                    (radius * radius);
  return d2 < 1.0 ? std::exp(-1.0 / (1.0 - d2)) : 0.0;
}

BoxGridPtr box(double L, int m) { return std::make_shared<const WholeSpaceGrid>(3, L, m); }

double zero_f(int) { return 0.0; }

}  // namespace

TEST_CASE("kernel constants and grid validation") {
  CHECK(kernel_constant(KernelSign::Fundamental, 3) == doctest::Approx(-1.0 / (4.0 * std::numbers::pi)));
  CHECK(kernel_constant(KernelSign::Positive, 3) == 1.0);
  CHECK_THROWS_AS(WholeSpaceGrid(2, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(WholeSpaceGrid(4, 1.0, 4), std::invalid_argument);
  const WholeSpaceGrid g(3, 2.0, 4);
  CHECK(g.size() == 9 * 9 * 9);
  CHECK(g.spacing() == 0.5);
  const auto id = g.flat({1, -2, 3});
  CHECK(g.index(id) == std::array<int, 3>{1, -2, 3});
  CHECK(g.coord(id) == Point{0.5, -1.0, 1.5});
  CHECK(g.on_face(g.flat({4, 0, 0})));
  CHECK_FALSE(g.on_face(g.flat({3, 3, 3})));
}

TEST_CASE("inverse laplacian") {
  auto g = box(1.0, 8);
  SUBCASE("zero") { CHECK(inv_laplacian(BoxField{g, std::vector<double>(g->size(), 0.0)}).sup_norm() == 0.0); }
  SUBCASE("point-charge limit of a narrow unit-mass bump") {
    const double h = g->spacing();
    BoxField w{g, std::vector<double>(g->size(), 0.0)};
    w.values[g->flat({0, 0, 0})] = 1.0 / (h * h * h);
    const auto target = g->flat({6, 0, 0});
    const std::size_t targets[] = {target};
    const double v = inv_laplacian_at(w, targets)[0];
    CHECK(v == doctest::Approx(-1.0 / (4.0 * std::numbers::pi * 0.75)).epsilon(1e-12));
  }
  SUBCASE("linear and sign-definite on nonnegative input") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BoxField a{g, {}}, b{g, {}};
    for (std::size_t i = 0; i < g->size(); ++i) {
      a.values.push_back(u(rng));
      b.values.push_back(u(rng));
    }
    BoxField c{g, {}};
    for (std::size_t i = 0; i < g->size(); ++i) c.values.push_back(2.0 * a.values[i] - 3.0 * b.values[i]);
    const auto la = inv_laplacian(a), lb = inv_laplacian(b), lc = inv_laplacian(c);
    for (std::size_t i = 0; i < g->size(); i += 37) {
      CHECK(la.values[i] < 0.0);
      CHECK(inv_laplacian(a, KernelSign::Positive).values[i] > 0.0);
      CHECK(lc.values[i] == doctest::Approx(2.0 * la.values[i] - 3.0 * lb.values[i]).epsilon(1e-10));
    }
  }
  SUBCASE("discrete identity on a smooth bump") {
    auto phi = BoxField::sample(g, [](const Point& x) { return bump(x, {0.0, 0.0, 0.0}, 0.6); });
    const auto u = inv_laplacian(phi);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const auto idx = g->index(i);
      if (std::abs(idx[0]) > 4 || std::abs(idx[1]) > 4 || std::abs(idx[2]) > 4) continue;
      err = std::max(err, std::abs(box_laplacian(u, i) - phi.values[i]));
    }
    CHECK(err <= 0.25 * phi.sup_norm());
    CHECK_THROWS_AS(box_laplacian(u, g->flat({8, 0, 0})), std::out_of_range);
  }
}

TEST_CASE("smoothstep") {
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(0.5) == 0.5);
  CHECK(smoothstep_derivative(0.0) == 0.0);
  CHECK(smoothstep_derivative(1.0) == 0.0);
  CHECK(smoothstep_derivative(0.5) == doctest::Approx(1.875));
}

TEST_CASE("lattice profile") {
  const auto p = build_profile(-1.0, zero_f, 4);
  CHECK(p.s[0] == 0.5);
  CHECK(p.slope_sq(1) == doctest::Approx(8.0).epsilon(1e-14));
  for (int k = 1; k <= 4; ++k) {
    const double s = std::ldexp(1.0, -k);
    CHECK(p.slope_sq(k) == doctest::Approx(2.0 * s / (s * s * s)).epsilon(1e-14));
    CHECK(p.eps[k - 1] > 0.0);
    CHECK(p.eps[k - 1] <= std::min(0.25, s));
    CHECK(p.gamma[k - 1] > 0.0);
    CHECK(p.gamma[k - 1] < s);
    CHECK(p.value(2.0 * k) == 0.0);
    // Profile reaches s(k) at both ends of its interval.
    CHECK(p.value(2.0 * k - 1.0 + 1e-12) == doctest::Approx(s).epsilon(1e-9));
    CHECK(p.value(2.0 * k + 1.0 - 1e-12) == doctest::Approx(s).epsilon(1e-9));
    // Continuity across the inner junctions at 2k -+ eps.
    const double e = p.eps[k - 1];
    CHECK(p.value(2.0 * k - e - 1e-10) == doctest::Approx(p.value(2.0 * k - e + 1e-10)).epsilon(1e-7));
    CHECK(p.value(2.0 * k + e - 1e-10) == doctest::Approx(p.value(2.0 * k + e + 1e-10)).epsilon(1e-7));
    CHECK(p.derivative(2.0 * k - e - 1e-9) == doctest::Approx(p.derivative(2.0 * k - e + 1e-9)).epsilon(1e-5));
  }
  CHECK(p.value(1.0) == 0.0);
  CHECK(p.value(0.5) == 0.0);
  CHECK(p.value(9.5) == 0.0);
  CHECK_THROWS_AS(build_profile(-1.0, zero_f, 1), RangeTooSmall);
  CHECK_THROWS_AS(build_profile(0.5, zero_f, 3), std::invalid_argument);

  const auto half = scale_gamma(p, 0.5);
  CHECK(half.slope_sq(2) == doctest::Approx(0.25 * p.slope_sq(2)));
}

TEST_CASE("profile L^p norms stabilize in K") {
  for (double exponent : {2.0, 4.0}) {
    double prev = 0.0, prev_step = 0.0;
    for (int K = 2; K <= 10; ++K) {
      const double norm = profile_lp_norm(build_profile(-1.0, zero_f, K), exponent);
      CHECK(norm >= prev);
      if (K > 3) CHECK(norm - prev <= prev_step);
      prev_step = norm - prev;
      prev = norm;
    }
    CHECK(prev_step < 1e-2);
  }
}

TEST_CASE("lattice right-hand side") {
  auto g = box(3.0, 12);
  auto A = [](int k) { return std::pow(8.0, -k); };
  const auto f = make_lattice_f(A, g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Point x = g->coord(i);
    const bool lattice = std::abs(x[0] - std::round(x[0])) + std::abs(x[1] - std::round(x[1])) +
                             std::abs(x[2] - std::round(x[2])) == 0.0;
    if (lattice) CHECK(f.values[i] == 0.0);
    CHECK(f.values[i] >= 0.0);
    const double linf = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    CHECK(f.values[i] <= A(static_cast<int>(std::ceil(linf))) + 1e-15);
  }
  CHECK(make_lattice_f([](int) { return 0.0; }, g).sup_norm() == 0.0);
}

TEST_CASE("eigen supersolution verification") {
  auto g = box(5.0, 20);
  auto A = [](int k) { return std::pow(8.0, -k); };
  const auto f = make_lattice_f(A, g);
  const auto p = build_profile(-1.0, A, 2);
  const auto rep = verify_eigen_supersolution(p, -1.0, f);
  CHECK(rep.worst() >= -1e-3 * std::pow(p.s.back(), 3));
  CHECK(rep.worst_odd >= 0.0);
  CHECK(rep.odd.size() == 2);
  for (const auto& d : rep.odd) CHECK(d.delta == doctest::Approx(std::pow(d.s, 2.0 / 3.0)));

  const auto broken = verify_eigen_supersolution(scale_gamma(p, 0.5), -1.0, f);
  CHECK(broken.worst_odd < 0.0);

  CHECK(zero_subsolution_margin(f) >= 0.0);
  CHECK_THROWS_AS(verify_eigen_supersolution(build_profile(-1.0, A, 3), -1.0, f), RangeTooSmall);

  const std::string csv = margin_csv(rep);
  CHECK(csv.rfind("case,location,margin\n", 0) == 0);
  CHECK(profile_csv(p, 0.5).rfind("x1,u\n", 0) == 0);
}
