#include "potform/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace potform {

std::vector<double> geometric_schedule(double eps0, int steps) {
  if (!(eps0 > 0.0) || steps < 1) throw std::invalid_argument("geometric_schedule: need eps0 > 0, steps >= 1");
  std::vector<double> s;
  for (int k = 0; k < steps; ++k) s.push_back(std::ldexp(eps0, -k));
  return s;
}

void validate_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("schedule is empty");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0)) throw std::invalid_argument("schedule entries must be positive");
    if (k > 0 && !(schedule[k] < schedule[k - 1]))
      throw std::invalid_argument("schedule must be strictly decreasing");
  }
}

NavierStage solve_navier(const NavierBVP& p, double epsilon, const std::optional<ScalarField>& warm) {
  NavierStage stage;
  stage.epsilon = epsilon;
  stage.certificate = certify(p.f, epsilon, p.barrier_margin);
  if (!stage.certificate.verified) throw BarrierViolation(stage.certificate.worst_node);

  HJProblem hj = make_hj_problem(p.f, epsilon, stage.certificate.M);
  if (p.hj_tol > 0.0) hj.tol = p.hj_tol;
  hj.max_sweeps = p.max_sweeps;
  std::optional<ScalarField> start;
  if (warm) {
    // Clip into the bracket [0, sup_bound].
    start = *warm;
    for (std::size_t n = 0; n < start->size(); ++n)
      (*start)[n] = std::clamp((*start)[n], 0.0, hj.sup_bound[n]);
  }
  stage.hj = fast_sweep(hj, start);
  if (!stage.hj.converged)
    throw NotConverged(fmt::format("w-stage did not converge in {} rounds (eps = {})", hj.max_sweeps, epsilon));

  DirichletProblem dp{stage.hj.w, p.g, p.poisson_tol, p.max_poisson_iters};
  stage.poisson = solve_dirichlet(dp);
  if (!stage.poisson.converged)
    throw NotConverged(fmt::format("v-stage did not converge, residual {}", stage.poisson.residual));
  return stage;
}

ContinuationReport continuation(const NavierBVP& p) {
  validate_schedule(p.schedule);
  ContinuationReport r;
  std::optional<ScalarField> warm;
  for (double eps : p.schedule) {
    r.stages.push_back(solve_navier(p, eps, warm));
    warm = r.stages.back().hj.w;
  }
  const auto& st = r.stages;
  for (std::size_t k = 0; k + 1 < st.size(); ++k) {
    r.gaps.push_back(sup_distance(st[k].hj.w, st[k + 1].hj.w));
    r.v_gaps.push_back(sup_distance(st[k].poisson.v, st[k + 1].poisson.v));
    if (k > 0 && r.gaps[k] > r.gaps[k - 1]) r.gaps_monotone = false;
  }
  if (p.terminal_zero) {
    r.terminal = solve_navier(p, 0.0, st.back().hj.w);
    r.closing_gap = sup_distance(st.back().hj.w, r.terminal->hj.w);
  }
  for (const auto& s : st)
    for (double alpha : kHolderExponents) r.holder.push_back({s.epsilon, alpha, holder_quotient(s.hj.w, alpha)});
  if (r.terminal)
    for (double alpha : kHolderExponents) r.holder.push_back({0.0, alpha, holder_quotient(r.terminal->hj.w, alpha)});

  // Tail envelopes, accumulated from the last iterate backwards.
  ScalarField hi = st.back().hj.w;
  ScalarField lo = st.back().hj.w;
  r.envelope_spread.assign(st.size(), 0.0);
  for (std::size_t k = st.size(); k-- > 0;) {
    const ScalarField& w = st[k].hj.w;
    double spread = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      hi[n] = std::max(hi[n], w[n]);
      lo[n] = std::min(lo[n], w[n]);
      spread = std::max(spread, hi[n] - lo[n]);
    }
    r.envelope_spread[k] = spread;
  }
  const NavierStage& last = r.terminal ? *r.terminal : st.back();
  r.w_limit = last.hj.w;
  r.v_limit = last.poisson.v;
  return r;
}

double holder_quotient(const ScalarField& w, double alpha, std::size_t max_sample) {
  const BallGrid& g = *w.grid();
  const int dim = g.dim();
  auto dist = [&](std::size_t i, std::size_t j) {
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = g.coord(i)[a] - g.coord(j)[a];
      d2 += d * d;
    }
    return std::sqrt(d2);
  };

  double q = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int a = 0; a < dim; ++a) {
      const Arm& arm = g.arm(i, a, 1);
      if (arm.on_boundary()) continue;
      const auto j = static_cast<std::size_t>(arm.neighbor);
      q = std::max(q, std::abs(w[i] - w[j]) / std::pow(dist(i, j), alpha));
    }
  }

  const std::size_t stride = std::max<std::size_t>(1, (g.size() + max_sample - 1) / max_sample);
  for (std::size_t i = 0; i < g.size(); i += stride)
    for (std::size_t j = i + stride; j < g.size(); j += stride)
      q = std::max(q, std::abs(w[i] - w[j]) / std::pow(dist(i, j), alpha));
  return q;
}

std::string gaps_csv(const ContinuationReport& r) {
  std::ostringstream os;
  os << "k,epsilon,next_epsilon,w_gap,v_gap,envelope_spread\n";
  for (std::size_t k = 0; k < r.gaps.size(); ++k) {
    os << k << ',' << format_real(r.stages[k].epsilon) << ',' << format_real(r.stages[k + 1].epsilon) << ','
       << format_real(r.gaps[k]) << ',' << format_real(r.v_gaps[k]) << ',' << format_real(r.envelope_spread[k])
       << '\n';
  }
  if (r.terminal) {
    os << r.gaps.size() << ',' << format_real(r.stages.back().epsilon) << ",0," << format_real(r.closing_gap) << ','
       << format_real(sup_distance(r.stages.back().poisson.v, r.terminal->poisson.v)) << ",\n";
  }
  return os.str();
}

std::string holder_csv(const ContinuationReport& r) {
  std::ostringstream os;
  os << "epsilon,alpha,quotient\n";
  for (const auto& row : r.holder)
    os << format_real(row.epsilon) << ',' << format_real(row.alpha) << ',' << format_real(row.quotient) << '\n';
  return os.str();
}

}  // namespace potform
