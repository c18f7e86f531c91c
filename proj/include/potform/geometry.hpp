#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace potform {

using Point = std::array<double, 3>;

/// Boundary data on the sphere, evaluated at exact intersection points.
using BoundaryFn = std::function<double(const Point&)>;

inline constexpr int kMaxDim = 3;

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One stencil arm of an interior node along a single axis direction.
/// Either another interior node (theta == 1) or a boundary hit at distance theta*h.
struct Arm {
  std::int64_t neighbor = -1;
  double theta = 1.0;

  bool on_boundary() const { return neighbor < 0; }
};

/**
 * Uniform origin-centered Cartesian lattice clipped to the open ball |x| < R.
 *
 * Interior nodes are stored in lexicographic order of their integer index
 * (axis 0 most significant). Every node carries 2*dim arms; arms whose
 * neighbor falls outside the ball end on the sphere at a fractional distance.
 */
class BallGrid {
 public:
  static std::shared_ptr<const BallGrid> build(int dim, double radius, int nodes_per_radius);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double spacing() const { return h_; }
  int nodes_per_radius() const { return m_; }
  std::size_t size() const { return coords_.size(); }

  const Point& coord(std::size_t node) const { return coords_[node]; }
  const std::array<int, 3>& index(std::size_t node) const { return index_[node]; }

  /// side 0 is the minus direction, side 1 the plus direction.
  const Arm& arm(std::size_t node, int axis, int side) const {
    return arms_[node * 2 * kMaxDim + 2 * axis + side];
  }
  double arm_length(std::size_t node, int axis, int side) const {
    return arm(node, axis, side).theta * h_;
  }
  /// Sphere intersection point reached by a boundary arm.
  Point arm_point(std::size_t node, int axis, int side) const;

  /// R - |x|
  double distance_to_boundary(std::size_t node) const;
  double norm(std::size_t node) const;

  /// Node id for an integer index, or -1 when the lattice point is not interior.
  std::int64_t find(const std::array<int, 3>& idx) const;

  bool is_irregular(std::size_t node) const;

 private:
  BallGrid() = default;

  int dim_ = 0;
  double radius_ = 0.0;
  double h_ = 0.0;
  int m_ = 0;
  std::vector<Point> coords_;
  std::vector<std::array<int, 3>> index_;
  std::vector<Arm> arms_;
  std::vector<std::int64_t> lookup_;  // dense (2m+1)^dim box -> node id
};

using GridPtr = std::shared_ptr<const BallGrid>;

/// Values at the interior nodes of a BallGrid, plus an optional boundary trace
/// (absent means zero on the sphere).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double value = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField sample(GridPtr grid, const std::function<double(const Point&)>& fn);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  const BoundaryFn& boundary() const { return boundary_; }
  void set_boundary(BoundaryFn g) { boundary_ = std::move(g); }
  /// Trace value at the end of a boundary arm.
  double boundary_value(std::size_t node, int axis, int side) const;

  /// Value at the far end of an arm (neighbor value or boundary trace).
  double arm_value(std::size_t node, int axis, int side) const;

  double sup_norm() const;
  double min() const;
  double max() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);

 private:
  void require_same_grid(const ScalarField& o) const;

  GridPtr grid_;
  std::vector<double> values_;
  BoundaryFn boundary_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// sup |a - b| over interior nodes.
double sup_distance(const ScalarField& a, const ScalarField& b);

/// Godunov upwind term max((c - m)/hm, (c - p)/hp, 0), squared.
inline double godunov_sq(double center, double minus, double hminus, double plus, double hplus) {
  double d = (center - minus) / hminus;
  const double e = (center - plus) / hplus;
  if (e > d) d = e;
  return d > 0.0 ? d * d : 0.0;
}

/// Sum over axes of the squared Godunov upwind difference at an interior node.
double upwind_grad_sq(const ScalarField& w, std::size_t node);

/// Shortley-Weller Laplacian at an interior node.
double laplacian(const ScalarField& w, std::size_t node);

ScalarField laplacian(const ScalarField& w);

/// CSV with header x1,...,xn,value, one row per interior node in lexicographic order.
void write_csv(std::ostream& os, const ScalarField& f);
std::string to_csv(const ScalarField& f);

/// Shortest round-trip decimal representation used by all CSV writers.
std::string format_real(double v);

/**
 * Uniform grid on [-pi, pi] with N+1 nodes; N even so x = 0 is a node and
 * node i mirrors node N - i.
 */
class IntervalGrid {
 public:
  explicit IntervalGrid(int intervals);

  int intervals() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) + 1; }
  double spacing() const { return h_; }
  double left() const { return left_; }
  double right() const { return right_; }
  double x(std::size_t i) const { return left_ + static_cast<double>(i) * h_; }
  std::size_t mirror(std::size_t i) const { return static_cast<std::size_t>(n_) - i; }

 private:
  int n_;
  double left_;
  double right_;
  double h_;
};

}  // namespace potform
