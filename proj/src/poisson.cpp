#include "potform/poisson.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace potform {

namespace {

constexpr double kPi = std::numbers::pi;

struct NodeStencil {
  double diag = 0.0;
  double constant = 0.0;  // boundary contributions
  std::array<std::int64_t, 6> nb{};
  std::array<double, 6> coef{};
  int count = 0;
};

std::vector<NodeStencil> assemble(const ScalarField& rhs, const BoundaryFn& g) {
  const BallGrid& grid = *rhs.grid();
  std::vector<NodeStencil> st(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    NodeStencil& s = st[n];
    for (int a = 0; a < grid.dim(); ++a) {
      const double hm = grid.arm_length(n, a, 0);
      const double hp = grid.arm_length(n, a, 1);
      const double scale = 2.0 / (hm + hp);
      const std::array<double, 2> c{scale / hm, scale / hp};
      for (int side = 0; side < 2; ++side) {
        s.diag += c[side];
        const Arm& arm = grid.arm(n, a, side);
        if (arm.on_boundary()) {
          if (g) s.constant += c[side] * g(grid.arm_point(n, a, side));
        } else {
          s.nb[s.count] = arm.neighbor;
          s.coef[s.count] = c[side];
          ++s.count;
        }
      }
    }
  }
  return st;
}

double residual_sup(const std::vector<NodeStencil>& st, const std::vector<double>& v, const ScalarField& rhs) {
  double r = 0.0;
  for (std::size_t n = 0; n < st.size(); ++n) {
    const NodeStencil& s = st[n];
    double lap = s.constant - s.diag * v[n];
    for (int k = 0; k < s.count; ++k) lap += s.coef[k] * v[static_cast<std::size_t>(s.nb[k])];
    r = std::max(r, std::abs(lap - rhs[n]));
  }
  return r;
}

// 16-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGLx{0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                     0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                     0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGLw{0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                     0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                     0.0622535239386479, 0.0271524594117541};

template <class Fn>
double gauss_panel(double a, double b, Fn&& fn) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGLx.size(); ++i) {
    s += kGLw[i] * (fn(mid - half * kGLx[i]) + fn(mid + half * kGLx[i]));
  }
  return s * half;
}

// Integral over [0, top] with panels refined geometrically toward 0.
template <class Fn>
double graded_integral(double top, double finest, Fn&& fn) {
  double s = 0.0;
  double a = 0.0;
  double b = std::min(finest, top);
  while (a < top) {
    s += gauss_panel(a, b, fn);
    a = b;
    b = std::min(2.0 * b, top);
  }
  return s;
}

double fundamental(double r, int dim) {
  if (dim == 2) return std::log(r) / (2.0 * kPi);
  return -1.0 / (4.0 * kPi * r);
}

// Integral of the fundamental solution over the centered cell of side h.
double singular_cell(double h, int dim) {
  const double a = 0.5 * h;
  if (dim == 2) {
    const double c2 = 0.5 * std::log(2.0) - 1.5 + 0.25 * kPi;
    return 4.0 * a * a * (std::log(a) + c2) / (2.0 * kPi);
  }
  const double c3 = 3.0 * std::log((1.0 + std::sqrt(3.0)) / std::sqrt(2.0)) - 0.25 * kPi;
  return -8.0 * a * a * c3 / (4.0 * kPi);
}

}  // namespace

PoissonSolution solve_dirichlet(const DirichletProblem& p) {
  const GridPtr& grid = p.rhs.grid();
  if (!p.rhs.all_finite()) throw std::invalid_argument("solve_dirichlet: rhs not finite");
  const double tol = p.tol > 0.0 ? p.tol : 1e-9 * (1.0 + p.rhs.sup_norm());

  const auto st = assemble(p.rhs, p.g);
  std::vector<double> v(grid->size(), 0.0);

  const double rho = std::cos(kPi * grid->spacing() / (2.0 * grid->radius()));
  const double omega = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));

  PoissonSolution out;
  constexpr int kCheckEvery = 10;
  for (int it = 1; it <= p.max_iters; ++it) {
    for (std::size_t n = 0; n < st.size(); ++n) {
      const NodeStencil& s = st[n];
      double acc = s.constant - p.rhs[n];
      for (int k = 0; k < s.count; ++k) acc += s.coef[k] * v[static_cast<std::size_t>(s.nb[k])];
      v[n] += omega * (acc / s.diag - v[n]);
    }
    out.iterations = it;
    if (it % kCheckEvery == 0 || it == p.max_iters) {
      out.residual = residual_sup(st, v, p.rhs);
      if (out.residual <= tol) {
        out.converged = true;
        break;
      }
    }
  }
  out.v = ScalarField(grid, std::move(v));
  out.v.set_boundary(p.g);
  return out;
}

double poisson_integral(const BoundaryFn& g, const Point& x, int dim, double radius) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("poisson_integral: dimension must be 2 or 3");
  double rho2 = 0.0;
  for (int a = 0; a < dim; ++a) rho2 += x[a] * x[a];
  const double rho = std::sqrt(rho2);
  const double r2 = radius * radius;
  if (!(rho < radius)) throw std::invalid_argument("poisson_integral: point not inside the ball");

  // Frame with e3 along x (e1, e2 for dim 2).
  Point e3{1.0, 0.0, 0.0};
  if (rho > 0.0) e3 = {x[0] / rho, x[1] / rho, dim == 3 ? x[2] / rho : 0.0};
  const double finest = std::max((radius - rho) / radius, 1e-14);
  const double scale = r2 - rho2;

  if (dim == 2) {
    const Point e2{-e3[1], e3[0], 0.0};
    auto kernel = [&](double psi) {
      const double c = std::cos(psi);
      const double s = std::sin(psi);
      const Point z{radius * (c * e3[0] + s * e2[0]), radius * (c * e3[1] + s * e2[1]), 0.0};
      return g(z) / (r2 + rho2 - 2.0 * radius * rho * c);
    };
    const double left = graded_integral(kPi, finest, [&](double t) { return kernel(-t); });
    const double right = graded_integral(kPi, finest, kernel);
    return scale * (left + right) / (2.0 * kPi);
  }

  Point e1 = std::abs(e3[0]) < 0.9 ? Point{1.0, 0.0, 0.0} : Point{0.0, 1.0, 0.0};
  const double proj = e1[0] * e3[0] + e1[1] * e3[1] + e1[2] * e3[2];
  for (int a = 0; a < 3; ++a) e1[a] -= proj * e3[a];
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (double& c : e1) c /= n1;
  const Point e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2], e3[0] * e1[1] - e3[1] * e1[0]};

  constexpr int kAzimuth = 48;
  auto ring = [&](double psi) {
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    double sum = 0.0;
    for (int k = 0; k < kAzimuth; ++k) {
      const double phi = 2.0 * kPi * k / kAzimuth;
      const double cp = std::cos(phi);
      const double sp = std::sin(phi);
      Point z;
      for (int a = 0; a < 3; ++a) z[a] = radius * (s * cp * e1[a] + s * sp * e2[a] + c * e3[a]);
      sum += g(z);
    }
    sum *= 2.0 * kPi / kAzimuth;
    const double dist2 = r2 + rho2 - 2.0 * radius * rho * c;
    return sum * s / (dist2 * std::sqrt(dist2));
  };
  // dS = R^2 sin(psi) dpsi dphi
  return scale * radius * graded_integral(kPi, finest, ring) / (4.0 * kPi);
}

ScalarField harmonic_extension(const BoundaryFn& g, const GridPtr& grid) {
  ScalarField v(grid);
  for (std::size_t n = 0; n < grid->size(); ++n) v[n] = poisson_integral(g, grid->coord(n), grid->dim(), grid->radius());
  v.set_boundary(g);
  return v;
}

ScalarField green_convolve(const ScalarField& w) {
  const BallGrid& grid = *w.grid();
  const int dim = grid.dim();
  if (dim != 2 && dim != 3) throw std::invalid_argument("green_convolve: dimension must be 2 or 3");
  const double h = grid.spacing();
  const double cell = std::pow(h, dim);
  const double r2 = grid.radius() * grid.radius();
  const double self = singular_cell(h, dim);

  std::vector<std::size_t> sources;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (w[j] != 0.0) sources.push_back(j);

  ScalarField v(w.grid());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point& x = grid.coord(i);
    double x2 = 0.0;
    for (int a = 0; a < dim; ++a) x2 += x[a] * x[a];
    double acc = 0.0;
    for (std::size_t j : sources) {
      const Point& y = grid.coord(j);
      double d2 = 0.0;
      double y2 = 0.0;
      double xy = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double d = x[a] - y[a];
        d2 += d * d;
        y2 += y[a] * y[a];
        xy += x[a] * y[a];
      }
      // |y|/R |x - y*| with y* = R^2 y / |y|^2.
      const double image = std::sqrt(std::max(x2 * y2 / r2 - 2.0 * xy + r2, 0.0));
      double gxy = -fundamental(image, dim) * cell;
      gxy += (i == j) ? self : fundamental(std::sqrt(d2), dim) * cell;
      acc += gxy * w[j];
    }
    v[i] = acc;
  }
  return v;
}

double max_second_difference(const ScalarField& v) {
  const BallGrid& g = *v.grid();
  double m = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int a = 0; a < g.dim(); ++a) {
      const double hm = g.arm_length(n, a, 0);
      const double hp = g.arm_length(n, a, 1);
      const double d2 =
          2.0 / (hm + hp) * ((v.arm_value(n, a, 1) - v[n]) / hp - (v[n] - v.arm_value(n, a, 0)) / hm);
      m = std::max(m, std::abs(d2));
    }
  }
  return m;
}

}  // namespace potform
