#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "potform/barriers.hpp"
#include "potform/geometry.hpp"
#include "potform/hj.hpp"
#include "potform/poisson.hpp"

namespace potform {

class NotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// eps Lap v + (Lap v)^3 |D Lap v|^2 = f with v = g and Lap v = 0 on the sphere.
struct NavierBVP {
  ScalarField f;
  BoundaryFn g;
  std::vector<double> schedule;  // strictly decreasing, positive
  double barrier_margin = 0.1;
  double hj_tol = 0.0;       // <= 0: hj default
  double poisson_tol = 0.0;  // <= 0: poisson default
  int max_sweeps = 10000;
  int max_poisson_iters = 200000;
  // Append an eps = 0 stage warm-started from the last scheduled iterate.
  bool terminal_zero = false;
};

/// eps_k = eps0 2^-k, k = 0..steps-1.
std::vector<double> geometric_schedule(double eps0 = 1.0, int steps = 12);

/// Throws std::invalid_argument unless the schedule is nonempty, positive and strictly decreasing.
void validate_schedule(const std::vector<double>& schedule);

struct NavierStage {
  double epsilon = 0.0;
  BarrierCertificate certificate;
  HJSolution hj;
  PoissonSolution poisson;
};

/**
 * Two-stage factored solve: the w-stage carries the zero trace (Lap v = 0 on
 * the sphere), the v-stage carries g. Certifies the barrier for (f, eps) first
 * and throws BarrierViolation when the certificate fails; throws NotConverged
 * when either stage stops at its iteration cap.
 */
NavierStage solve_navier(const NavierBVP& p, double epsilon, const std::optional<ScalarField>& warm = std::nullopt);

struct HolderRow {
  double epsilon;
  double alpha;
  double quotient;
};

struct ContinuationReport {
  std::vector<NavierStage> stages;  // one per scheduled eps
  std::optional<NavierStage> terminal;  // eps = 0 stage when requested
  double closing_gap = 0.0;             // |w_last - w_terminal|_inf
  std::vector<double> gaps;    // |w_k - w_{k+1}|_inf over the schedule
  std::vector<double> v_gaps;  // |v_k - v_{k+1}|_inf
  std::vector<HolderRow> holder;
  std::vector<double> envelope_spread;  // sup of (max_{j>=k} w_j - min_{j>=k} w_j)
  bool gaps_monotone = true;
  ScalarField w_limit;
  ScalarField v_limit;
};

inline constexpr std::array<double, 3> kHolderExponents{0.25, 0.5, 1.0};

/// Solves along the schedule with warm starts; the last iterate (the terminal
/// eps = 0 stage when requested) is the reported limit.
ContinuationReport continuation(const NavierBVP& p);

/// Sampled sup of |w(x) - w(y)| / |x - y|^alpha over a deterministic node subset
/// plus all lattice-neighbor pairs.
double holder_quotient(const ScalarField& w, double alpha, std::size_t max_sample = 1200);

std::string gaps_csv(const ContinuationReport& r);
std::string holder_csv(const ContinuationReport& r);

}  // namespace potform
