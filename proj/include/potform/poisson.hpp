#pragma once

#include "potform/geometry.hpp"

namespace potform {

/// Laplacian(v) = rhs in the ball, v = g on the sphere.
struct DirichletProblem {
  ScalarField rhs;
  BoundaryFn g;  // empty means g = 0
  double tol = 0.0;  // <= 0 selects 1e-9 (1 + |rhs|_inf)
  int max_iters = 200000;
};

struct PoissonSolution {
  ScalarField v;  // carries g as its boundary trace
  int iterations = 0;
  double residual = 0.0;  // sup |Lap_h v - rhs|
  bool converged = false;
};

/// Shortley-Weller system solved by SOR in node order.
PoissonSolution solve_dirichlet(const DirichletProblem& p);

/// Poisson integral of g over the sphere, evaluated at every interior node (n = 2, 3).
ScalarField harmonic_extension(const BoundaryFn& g, const GridPtr& grid);

/// Poisson integral at a single point strictly inside the ball.
double poisson_integral(const BoundaryFn& g, const Point& x, int dim, double radius);

/// Zero-boundary solution of Laplacian(v) = w by direct quadrature of the ball's
/// Green's function (image-charge form), n = 2, 3.
ScalarField green_convolve(const ScalarField& w);

/// max over nodes and axes of the magnitude of the one-axis second difference.
double max_second_difference(const ScalarField& v);

}  // namespace potform
