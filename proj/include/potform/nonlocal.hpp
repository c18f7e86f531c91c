#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "potform/geometry.hpp"

namespace potform {

class RangeTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sign convention of the Newtonian kernel K |z|^(2-n).
enum class KernelSign {
  Fundamental,  // K_3 = -1/(4 pi): Lap(Psi * phi) = phi
  Positive,     // K_3 = +1: plain integral of phi(y) / |x - y|
};

double kernel_constant(KernelSign sign, int dim);

/// Cube [-L, L]^n sampled at i*h, |i| <= L/h, standing in for R^n.
class WholeSpaceGrid {
 public:
  WholeSpaceGrid(int dim, double half_width, int nodes_per_half_width);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  double spacing() const { return h_; }
  int half_count() const { return m_; }
  std::size_t size() const { return size_; }

  std::array<int, 3> index(std::size_t flat) const;
  std::size_t flat(const std::array<int, 3>& idx) const;
  Point coord(std::size_t flat) const;
  bool on_face(std::size_t flat) const;

 private:
  int dim_;
  double half_width_;
  int m_;
  double h_;
  std::size_t size_;
};

using BoxGridPtr = std::shared_ptr<const WholeSpaceGrid>;

struct BoxField {
  BoxGridPtr grid;
  std::vector<double> values;

  static BoxField sample(BoxGridPtr grid, const std::function<double(const Point&)>& fn);
  double sup_norm() const;
};

/// Direct-sum quadrature of Psi * w at the given nodes; the self cell uses the
/// exact integral of |z|^(2-n) over the centered cube.
std::vector<double> inv_laplacian_at(const BoxField& w, std::span<const std::size_t> targets,
                                     KernelSign sign = KernelSign::Fundamental);

BoxField inv_laplacian(const BoxField& w, KernelSign sign = KernelSign::Fundamental);

/// 7-point Laplacian at a node off the box faces.
double box_laplacian(const BoxField& u, std::size_t flat);

/// Godunov upwind |Du|^2 at a node; arms leaving the box are dropped.
double box_upwind_grad_sq(const BoxField& u, std::size_t flat);

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 on [0, 1].
double smoothstep(double t);
double smoothstep_derivative(double t);

/**
 * One-dimensional lattice profile: on [2k-1, 2k+1) three increasing transitions
 * (-s -> -s+gamma, odd -s+gamma -> s-gamma about 2k, s-gamma -> s) whose absolute
 * value forms the profile, for k = 1..K, zero elsewhere.
 */
struct LatticeProfile {
  double lambda = -1.0;
  int K = 0;
  std::vector<double> s;      // s(k) = 2^-k, stored at k-1
  std::vector<double> eps;    // transition half-width
  std::vector<double> gamma;  // corner offset
  std::vector<double> fk;     // lattice data used in the slope prescription

  /// 0 outside [1, 2K+1), else the k with x in [2k-1, 2k+1).
  int interval(double x1) const;
  double value(double x1) const;
  double derivative(double x1) const;
  /// (gamma / eps)^2
  double slope_sq(int k) const;
};

/// (gamma/eps)^2 = 2 (-lambda s + f(k)) / s^3 exactly, eps = min(1/4, s, s/(2 ratio)).
LatticeProfile build_profile(double lambda, const std::function<double(int)>& f_lattice, int K);

/// Multiplies every gamma(k) by `factor`, keeping eps (for falsification runs).
LatticeProfile scale_gamma(LatticeProfile p, double factor);

/// w(x1, ..., xn) = u(x1)
BoxField lift_profile(const LatticeProfile& p, const BoxGridPtr& grid);

/// (integral of u^p over the line)^(1/p) by Gauss-Legendre per smooth piece.
double profile_lp_norm(const LatticeProfile& p, double exponent);

/// f(x) = A(ceil |x|_inf) prod_i sin^2(pi x_i); exactly zero on the integer lattice.
BoxField make_lattice_f(const std::function<double(int)>& amplitude, const BoxGridPtr& grid);

enum class MarginCase { Interior, EvenInteger, OddInteger };

const char* to_string(MarginCase c);

struct MarginRow {
  MarginCase kind;
  int k;
  Point location;
  double margin;
};

/// Per-k quantities behind the reduced check at x1 = 2k-1.
struct OddDiagnostics {
  int k;
  double s;
  double delta;            // delta^3 = s^2
  double slope_sq;         // (gamma/eps)^2
  double f_odd;            // max f on the sampled plane x1 = 2k-1
  double local_bound;      // s * integral over B_delta of |z|^(2-n)
  double nonlocal_part;    // positive-kernel sum of w over |x - y| >= delta
  double reduced_margin;   // s^3 slope_sq - (-lambda s + f_odd)
};

struct EigenReport {
  std::vector<MarginRow> rows;
  std::vector<OddDiagnostics> odd;
  double worst_interior;
  double worst_even;
  double worst_odd;
  double worst() const;
};

struct EigenCheckOptions {
  KernelSign sign = KernelSign::Fundamental;
  int transverse_stride = 8;  // sample every stride-th node in x2..xn
};

/**
 * Supersolution check of lambda Lap^-1 w + w^3 |Dw|^2 >= f for the lifted
 * profile at sampled grid nodes, classified by x1 (interior, even integer, odd
 * integer), plus the reduced scalar inequality at each odd integer.
 */
EigenReport verify_eigen_supersolution(const LatticeProfile& profile, double lambda, const BoxField& f,
                                       const EigenCheckOptions& opts = {});

/// Margin f(x) - (lambda Lap^-1 0 + 0) of the zero subsolution, i.e. min f.
double zero_subsolution_margin(const BoxField& f);

std::string profile_csv(const LatticeProfile& p, double step);
std::string margin_csv(const EigenReport& r);

}  // namespace potform
