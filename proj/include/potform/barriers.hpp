#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "potform/geometry.hpp"

namespace potform {

/// f does not vanish like (R^2 - |x|^2)^3 |x|^2 at a node.
class DecayHypothesisFailed : public std::runtime_error {
 public:
  DecayHypothesisFailed(std::size_t node, double value);
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Decay constant C and barrier coefficient M with 4 M^5 > C.
struct BarrierCertificate {
  double C = 0.0;
  double M = 0.0;
  double margin = 0.1;
  double epsilon = 0.0;  // perturbation the verification ran with
  bool verified = false;
  std::size_t worst_node = 0;
  double worst_slack = 0.0;  // min over nodes of (supersolution lhs - f)
  std::size_t failed_nodes = 0;
  bool epsilon_assisted = false;  // M sized with the eps*M*d term, C = 4 M_min^5
};

inline constexpr double kCertificateFloor = 1e-12;

/// max over nodes x != 0 of f(x) / ((R^2 - |x|^2)^3 |x|^2).
double estimate_C(const ScalarField& f);

/// M = ((1 + margin) max(C, 1e-12) / 4)^(1/5).
BarrierCertificate make_certificate(double C, double margin = 0.1);

/// Checks eps M d + 4 M^5 |x|^2 d^3 >= f(x) at every node, with d = R^2 - |x|^2.
BarrierCertificate verify_supersolution(BarrierCertificate cert, const ScalarField& f, double epsilon);

/// Smallest M with eps M d + 4 M^5 |x|^2 d^3 >= f at every node. Throws
/// DecayHypothesisFailed where no M works (eps = 0 and the polynomial vanishes).
double minimal_barrier_coefficient(const ScalarField& f, double epsilon);

/// estimate -> make -> verify. When f fails the decay hypothesis but eps > 0,
/// falls back to the eps-assisted coefficient M = (1 + margin)^(1/5) M_min.
BarrierCertificate certify(const ScalarField& f, double epsilon, double margin = 0.1);

/// M (R^2 - |x|^2) sampled on the grid.
ScalarField barrier_field(const BarrierCertificate& cert, const GridPtr& grid);

std::string certificate_report(const BarrierCertificate& cert, const BallGrid& grid);

}  // namespace potform
