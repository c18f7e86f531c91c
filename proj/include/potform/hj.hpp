#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "potform/geometry.hpp"

namespace potform {

/// The upper barrier could not bound the local solve at a node.
class BarrierViolation : public std::runtime_error {
 public:
  explicit BarrierViolation(std::size_t node);
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// eps*w + w^3 |Dw|^2 = f on the ball, w = 0 on the sphere.
struct HJProblem {
  GridPtr grid;
  double epsilon = 0.0;
  ScalarField f;
  ScalarField sup_bound;
  double tol = 1e-8;
  int max_sweeps = 10000;
};

/// Builds a problem with sup_bound = M (R^2 - |x|^2) and the default
/// tolerance 1e-8 (1 + |f|_inf). Throws std::invalid_argument when f < 0
/// somewhere or eps < 0.
HJProblem make_hj_problem(const ScalarField& f, double epsilon, double barrier_m);

struct HJSolution {
  ScalarField w;
  int sweeps_used = 0;  // full rounds over all 2^n orderings
  double final_residual = 0.0;
  bool converged = false;
};

struct ConvergenceRow {
  int round;
  double sup_change;
  double max_residual;
};

/// Frozen neighbor data for a single node: per axis the arm values and lengths.
struct LocalStencil {
  int dim = 1;
  std::array<double, 3> minus_value{};
  std::array<double, 3> minus_length{1.0, 1.0, 1.0};
  std::array<double, 3> plus_value{};
  std::array<double, 3> plus_length{1.0, 1.0, 1.0};
};

struct LocalSolve {
  double value = 0.0;
  bool barrier_violated = false;
};

/// eps*a + a^3 Q(a) for the Godunov Q of the stencil.
double local_operator(double epsilon, double a, const LocalStencil& s);

/**
 * Largest a in [0, upper] with eps*a + a^3 Q(a) <= f, found by bisection to
 * abs_tol. For f > 0 this is the unique root. When the left side is still
 * below f at a = upper, returns upper with barrier_violated set.
 */
LocalSolve solve_local(double epsilon, double f, double upper, const LocalStencil& s, double abs_tol);

LocalStencil gather_stencil(const ScalarField& w, std::size_t node);

/// Scalar update at one node against the current values of w.
LocalSolve node_update(const HJProblem& problem, const ScalarField& w, std::size_t node);

/**
 * Gauss-Seidel fast sweeping over the 2^n axis orderings. Starts from w0
 * (default zero) and stops once a whole round changes no value by tol or
 * more. Throws BarrierViolation on the first flagged node.
 */
HJSolution fast_sweep(const HJProblem& problem, const std::optional<ScalarField>& w0 = std::nullopt,
                      std::vector<ConvergenceRow>* log = nullptr);

/// eps*w + w^3 |D w|^2_upwind - f with zero boundary trace.
ScalarField residual_field(const HJProblem& problem, const ScalarField& w);

std::string convergence_csv(const std::vector<ConvergenceRow>& log);

}  // namespace potform
