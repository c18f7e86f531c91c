#include "potform/toyode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace potform {

namespace {

constexpr std::array<double, 9> kProbeS{-10.0, -3.0, -1.0, -0.5, 0.0, 0.25, 1.0, 2.5, 7.0};

// Root of the increasing map s -> F(x, s).
double solve_for_s(const ToyProblem& p, double x) {
  const double f0 = p.F(x, 0.0);
  if (f0 == 0.0) return 0.0;
  double span = std::abs(f0) / p.lambda;
  double lo = f0 < 0.0 ? 0.0 : -span;
  double hi = f0 < 0.0 ? span : 0.0;
  // A correct lambda makes the first bracket sufficient; widening guards an optimistic one.
  for (int k = 0; k < 60 && !(p.F(x, lo) <= 0.0 && p.F(x, hi) >= 0.0); ++k) {
    span *= 2.0;
    lo = f0 < 0.0 ? 0.0 : -span;
    hi = f0 < 0.0 ? span : 0.0;
  }
  if (!(p.F(x, lo) <= 0.0 && p.F(x, hi) >= 0.0))
    throw MonotonicityCheckFailed(fmt::format("F(x, .) has no sign change near x = {}", x));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (p.F(x, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void check_symmetry(const ToyProblem& p) {
  const IntervalGrid& g = p.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    for (double s : kProbeS) {
      const double defect = std::abs(p.F(-x, -s) + p.F(x, s));
      if (defect > 1e-10) {
        throw SymmetryCheckFailed(
            fmt::format("F(-x,-s) = -F(x,s) violated at x = {}, s = {} (defect {})", x, s, defect));
      }
    }
  }
}

void check_monotonicity(const ToyProblem& p, std::uint64_t seed) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("declared lambda must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(p.grid.left(), p.grid.right());
  std::uniform_real_distribution<double> us(-10.0, 10.0);
  std::uniform_real_distribution<double> ut(1e-3, 5.0);
  for (int k = 0; k < 512; ++k) {
    const double x = ux(rng);
    const double s = us(rng);
    const double t = ut(rng);
    const double a = p.F(x, s);
    const double b = p.F(x, s + t);
    if (b - a < p.lambda * t - 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
      throw MonotonicityCheckFailed(
          fmt::format("F(x,s+t) - F(x,s) < lambda t at x = {}, s = {}, t = {}", x, s, t));
    }
  }
}

ToySolution solve_second_order(const ToyProblem& p) {
  if (!p.symmetric) throw SymmetryCheckFailed("solve_second_order requires the odd-symmetry hypothesis");
  check_monotonicity(p);
  check_symmetry(p);

  const IntervalGrid& g = p.grid;
  const std::size_t n = g.size();
  const double h = g.spacing();

  std::vector<double> target(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) target[i] = solve_for_s(p, g.x(i));

  ToySolution sol;
  sol.w = sample_line(g, [](double) { return 0.0; });
  std::vector<double>& w = sol.w.values;

  const double rho = std::cos(std::numbers::pi / g.intervals());
  const double omega = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
  for (int sweep = 1; sweep <= p.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double gs = 0.5 * (w[i - 1] + w[i + 1] - h * h * target[i]);
      const double next = w[i] + omega * (gs - w[i]);
      change = std::max(change, std::abs(next - w[i]));
      w[i] = next;
    }
    sol.sweeps = sweep;
    sol.final_change = change;
    if (change < p.tol) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

Antiderivative integrate_to_u(const LineField& w, double u_left) {
  Antiderivative out;
  out.u.x = w.x;
  out.u.values.assign(w.values.size(), u_left);
  double acc = 0.0;
  for (std::size_t i = 1; i < w.values.size(); ++i) {
    acc += 0.5 * (w.x[i] - w.x[i - 1]) * (w.values[i] + w.values[i - 1]);
    out.u.values[i] = u_left + acc;
  }
  out.integral = acc;
  return out;
}

double check_oddness(const LineField& w) {
  const std::size_t n = w.values.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(w.values[i] + w.values[n - 1 - i]));
  return d;
}

std::vector<double> third_difference(const LineField& u) {
  const std::size_t n = u.values.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) return d;
  const double h = u.x[1] - u.x[0];
  const auto& v = u.values;
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (v[i + 2] - 2.0 * v[i + 1] + 2.0 * v[i - 1] - v[i - 2]) / (2.0 * h * h * h);
  return d;
}

LineField sample_line(const IntervalGrid& grid, const std::function<double(double)>& fn) {
  LineField f;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f.x.push_back(grid.x(i));
    f.values.push_back(fn(grid.x(i)));
  }
  return f;
}

std::string toy_csv(const LineField& w, const LineField& u) {
  std::ostringstream os;
  os << "x,w,u\n";
  for (std::size_t i = 0; i < w.values.size(); ++i)
    os << format_real(w.x[i]) << ',' << format_real(w.values[i]) << ',' << format_real(u.values[i]) << '\n';
  return os.str();
}

}  // namespace potform
