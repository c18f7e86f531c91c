#include "potform/hj.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace potform {

BarrierViolation::BarrierViolation(std::size_t node)
    : std::runtime_error(fmt::format("barrier violation at node {}: f exceeds the supersolution bound", node)),
      node_(node) {}

HJProblem make_hj_problem(const ScalarField& f, double epsilon, double barrier_m) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("HJProblem: epsilon must be >= 0");
  if (!(barrier_m > 0.0)) throw std::invalid_argument("HJProblem: barrier coefficient must be > 0");
  if (!f.all_finite()) throw std::invalid_argument("HJProblem: f has non-finite values");
  if (f.min() < 0.0) throw std::invalid_argument("HJProblem: f must be nonnegative");

  const GridPtr& grid = f.grid();
  HJProblem p;
  p.grid = grid;
  p.epsilon = epsilon;
  p.f = f;
  p.sup_bound = ScalarField(grid);
  const double r2 = grid->radius() * grid->radius();
  for (std::size_t n = 0; n < grid->size(); ++n) {
    const double d = grid->norm(n);
    p.sup_bound[n] = std::max(0.0, barrier_m * (r2 - d * d));
  }
  p.tol = 1e-8 * (1.0 + f.sup_norm());
  return p;
}

double local_operator(double epsilon, double a, const LocalStencil& s) {
  double q = 0.0;
  for (int i = 0; i < s.dim; ++i)
    q += godunov_sq(a, s.minus_value[i], s.minus_length[i], s.plus_value[i], s.plus_length[i]);
  return epsilon * a + a * a * a * q;
}

LocalSolve solve_local(double epsilon, double f, double upper, const LocalStencil& s, double abs_tol) {
  if (f <= 0.0) {
    if (epsilon > 0.0) return {0.0, false};
    // Degenerate level set {a^3 Q(a) = 0} = [0, min arm value]; take its top.
    double a = upper;
    for (int i = 0; i < s.dim; ++i) a = std::min({a, s.minus_value[i], s.plus_value[i]});
    return {std::max(a, 0.0), false};
  }
  if (local_operator(epsilon, upper, s) < f) return {upper, true};

  double lo = 0.0;
  double hi = upper;
  while (hi - lo > abs_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (local_operator(epsilon, mid, s) <= f) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

LocalStencil gather_stencil(const ScalarField& w, std::size_t node) {
  const BallGrid& g = *w.grid();
  LocalStencil s;
  s.dim = g.dim();
  for (int a = 0; a < g.dim(); ++a) {
    s.minus_value[a] = w.arm_value(node, a, 0);
    s.minus_length[a] = g.arm_length(node, a, 0);
    s.plus_value[a] = w.arm_value(node, a, 1);
    s.plus_length[a] = g.arm_length(node, a, 1);
  }
  return s;
}

LocalSolve node_update(const HJProblem& problem, const ScalarField& w, std::size_t node) {
  return solve_local(problem.epsilon, problem.f[node], problem.sup_bound[node], gather_stencil(w, node),
                     problem.tol / 100.0);
}

namespace {

// Node sequence for one of the 2^n orderings; bit a of `pattern` reverses axis a.
std::vector<std::size_t> sweep_order(const BallGrid& g, unsigned pattern) {
  const int m = g.nodes_per_radius();
  const int width = 2 * m + 1;
  std::size_t box = 1;
  for (int a = 0; a < g.dim(); ++a) box *= static_cast<std::size_t>(width);

  std::vector<std::size_t> order;
  order.reserve(g.size());
  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < box; ++flat) {
    std::size_t rem = flat;
    for (int a = g.dim() - 1; a >= 0; --a) {
      const int k = static_cast<int>(rem % width) - m;
      rem /= width;
      idx[a] = (pattern >> a) & 1U ? -k : k;
    }
    const auto id = g.find(idx);
    if (id >= 0) order.push_back(static_cast<std::size_t>(id));
  }
  return order;
}

}  // namespace

HJSolution fast_sweep(const HJProblem& problem, const std::optional<ScalarField>& w0,
                      std::vector<ConvergenceRow>* log) {
  const BallGrid& g = *problem.grid;
  HJSolution sol;
  sol.w = w0 ? *w0 : ScalarField(problem.grid);
  if (sol.w.grid() != problem.grid) throw GridError("fast_sweep: initial guess on a different grid");
  sol.w.set_boundary(nullptr);

  const unsigned n_orders = 1U << g.dim();
  std::vector<std::vector<std::size_t>> orders;
  orders.reserve(n_orders);
  for (unsigned p = 0; p < n_orders; ++p) orders.push_back(sweep_order(g, p));

  for (int round = 1; round <= problem.max_sweeps; ++round) {
    double change = 0.0;
    for (const auto& order : orders) {
      for (std::size_t node : order) {
        const LocalSolve upd = node_update(problem, sol.w, node);
        if (upd.barrier_violated) throw BarrierViolation(node);
        change = std::max(change, std::abs(upd.value - sol.w[node]));
        sol.w[node] = upd.value;
      }
    }
    sol.sweeps_used = round;
    sol.final_residual = change;
    if (log) log->push_back({round, change, residual_field(problem, sol.w).sup_norm()});
    if (change < problem.tol) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

ScalarField residual_field(const HJProblem& problem, const ScalarField& w) {
  ScalarField wz = w;
  wz.set_boundary(nullptr);
  ScalarField r(problem.grid);
  for (std::size_t n = 0; n < r.size(); ++n) {
    const double a = wz[n];
    r[n] = problem.epsilon * a + a * a * a * upwind_grad_sq(wz, n) - problem.f[n];
  }
  return r;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& log) {
  std::ostringstream os;
  os << "sweep_round,sup_change,max_residual\n";
  for (const auto& row : log) {
    os << row.round << ',' << format_real(row.sup_change) << ',' << format_real(row.max_residual) << '\n';
  }
  return os.str();
}

}  // namespace potform
