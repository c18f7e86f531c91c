#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "potform/geometry.hpp"

namespace potform {

class SymmetryCheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MonotonicityCheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// F(x, u_xxx) = 0 on [-pi, pi], u(-pi) = u(pi), u_x(-pi) = u_x(pi).
struct ToyProblem {
  IntervalGrid grid{256};
  std::function<double(double x, double s)> F;
  double lambda = 1.0;  // F(x, s + t) - F(x, s) >= lambda t for t >= 0
  double u_left = 0.0;
  bool symmetric = true;  // F(-x, -s) = -F(x, s) asserted
  double tol = 1e-14;
  int max_sweeps = 1000000;
};

struct LineField {
  std::vector<double> x;
  std::vector<double> values;
};

struct ToySolution {
  LineField w;
  int sweeps = 0;
  double final_change = 0.0;
  bool converged = false;
};

/// Samples F(-x,-s) + F(x,s) on the grid nodes against a fixed s set; throws
/// SymmetryCheckFailed above 1e-10.
void check_symmetry(const ToyProblem& p);

/// Falsification test of the declared lambda on seeded random (x, s, t).
void check_monotonicity(const ToyProblem& p, std::uint64_t seed = 0x5eed);

/**
 * Solves F(x, D2_h w) = 0 with w(-pi) = w(pi) = 0: the second-difference value
 * at each node is found by bisection on F(x_i, .), then the nodal values are
 * relaxed by SOR in node order until a sweep changes nothing by tol.
 */
ToySolution solve_second_order(const ToyProblem& p);

struct Antiderivative {
  LineField u;
  double integral = 0.0;  // trapezoidal integral of w over [-pi, pi]
};

/// u(x) = u_left + cumulative trapezoidal integral of w.
Antiderivative integrate_to_u(const LineField& w, double u_left);

/// max_i |w(x_i) + w(-x_i)| on a symmetric grid.
double check_oddness(const LineField& w);

/// Third difference of u at interior nodes (central, four points), for F(x, u_xxx) checks.
std::vector<double> third_difference(const LineField& u);

LineField sample_line(const IntervalGrid& grid, const std::function<double(double)>& fn);

std::string toy_csv(const LineField& w, const LineField& u);

}  // namespace potform
