#include "potform/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace potform {

DecayHypothesisFailed::DecayHypothesisFailed(std::size_t node, double value)
    : std::runtime_error(
          fmt::format("decay hypothesis failed at node {}: f = {} where (R^2-|x|^2)^3|x|^2 vanishes", node, value)),
      node_(node) {}

double estimate_C(const ScalarField& f) {
  const BallGrid& g = *f.grid();
  const double r2 = g.radius() * g.radius();
  const double skip_below = 1e-14 * std::pow(g.radius(), 8);
  const double fmax = f.sup_norm();
  double c = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (f[n] < 0.0) throw std::invalid_argument("estimate_C: f must be nonnegative");
    const double x2 = g.norm(n) * g.norm(n);
    const double d = r2 - x2;
    const double denom = d * d * d * x2;
    if (denom < skip_below) {
      if (f[n] > 1e-10 * fmax) throw DecayHypothesisFailed(n, f[n]);
      continue;
    }
    c = std::max(c, f[n] / denom);
  }
  return c;
}

BarrierCertificate make_certificate(double C, double margin) {
  if (!(C >= 0.0)) throw std::invalid_argument("make_certificate: C must be >= 0");
  if (!(margin > 0.0)) throw std::invalid_argument("make_certificate: margin must be > 0");
  BarrierCertificate cert;
  cert.C = C;
  cert.margin = margin;
  cert.M = std::pow((1.0 + margin) * std::max(C, kCertificateFloor) / 4.0, 0.2);
  return cert;
}

BarrierCertificate verify_supersolution(BarrierCertificate cert, const ScalarField& f, double epsilon) {
  const BallGrid& g = *f.grid();
  const double r2 = g.radius() * g.radius();
  const double m = cert.M;
  const double m5 = std::pow(m, 5);
  cert.epsilon = epsilon;
  cert.failed_nodes = 0;
  cert.worst_slack = std::numeric_limits<double>::infinity();
  cert.worst_node = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double x2 = g.norm(n) * g.norm(n);
    const double d = r2 - x2;
    const double lhs = epsilon * m * d + 4.0 * m5 * x2 * d * d * d;
    const double slack = lhs - f[n];
    if (slack < 0.0) ++cert.failed_nodes;
    if (slack < cert.worst_slack) {
      cert.worst_slack = slack;
      cert.worst_node = n;
    }
  }
  cert.verified = cert.failed_nodes == 0;
  return cert;
}

double minimal_barrier_coefficient(const ScalarField& f, double epsilon) {
  const BallGrid& g = *f.grid();
  const double r2 = g.radius() * g.radius();
  double m_min = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (f[n] <= 0.0) continue;
    const double x2 = g.norm(n) * g.norm(n);
    const double d = r2 - x2;
    const double lin = epsilon * d;
    const double quint = 4.0 * x2 * d * d * d;
    if (lin <= 0.0 && quint <= 0.0) throw DecayHypothesisFailed(n, f[n]);
    auto lhs = [&](double m) { return lin * m + quint * std::pow(m, 5); };
    double hi = std::max(m_min, 1.0);
    while (lhs(hi) < f[n]) hi *= 2.0;
    if (lhs(m_min) >= f[n]) continue;
    double lo = m_min;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lhs(mid) < f[n] ? lo : hi) = mid;
    }
    m_min = hi;
  }
  return m_min;
}

BarrierCertificate certify(const ScalarField& f, double epsilon, double margin) {
  try {
    return verify_supersolution(make_certificate(estimate_C(f), margin), f, epsilon);
  } catch (const DecayHypothesisFailed&) {
    if (!(epsilon > 0.0)) throw;
  }
  const double m_min = minimal_barrier_coefficient(f, epsilon);
  BarrierCertificate cert = make_certificate(4.0 * std::pow(m_min, 5), margin);
  cert.epsilon_assisted = true;
  return verify_supersolution(cert, f, epsilon);
}

ScalarField barrier_field(const BarrierCertificate& cert, const GridPtr& grid) {
  const double r2 = grid->radius() * grid->radius();
  ScalarField b(grid);
  for (std::size_t n = 0; n < grid->size(); ++n) {
    const double x = grid->norm(n);
    b[n] = cert.M * (r2 - x * x);
  }
  return b;
}

std::string certificate_report(const BarrierCertificate& cert, const BallGrid& grid) {
  const Point& x = grid.coord(cert.worst_node);
  std::string loc;
  for (int a = 0; a < grid.dim(); ++a) loc += (a ? ", " : "") + format_real(x[a]);
  return fmt::format(
      "barrier certificate\n"
      "C = {}\n"
      "M = {}\n"
      "4M^5 = {}\n"
      "margin = {}\n"
      "epsilon = {}\n"
      "epsilon_assisted = {}\n"
      "verified = {}\n"
      "failed_nodes = {}\n"
      "worst_node = {} ({})\n"
      "worst_slack = {}\n",
      format_real(cert.C), format_real(cert.M), format_real(4.0 * std::pow(cert.M, 5)), format_real(cert.margin),
      format_real(cert.epsilon), cert.epsilon_assisted ? "true" : "false", cert.verified ? "true" : "false", cert.failed_nodes, cert.worst_node, loc,
      format_real(cert.worst_slack));
}

}  // namespace potform
