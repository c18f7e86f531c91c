#include "potform/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace potform {

namespace {

double squared_norm(const Point& x, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += x[a] * x[a];
  return s;
}

// Distance t > 0 along direction s*e_axis from x to the sphere |y| = R.
double distance_to_sphere(const Point& x, int dim, double radius, int axis, double sign) {
  const double xa = sign * x[axis];
  const double gap = radius * radius - squared_norm(x, dim);
  const double disc = std::sqrt(xa * xa + gap);
  // Stable root of t^2 + 2 xa t - gap = 0.
  if (xa > 0.0) return gap / (xa + disc);
  return disc - xa;
}

}  // namespace

std::shared_ptr<const BallGrid> BallGrid::build(int dim, double radius, int nodes_per_radius) {
  if (dim < 1 || dim > kMaxDim) {
    throw GridError(fmt::format("BallGrid: dimension {} not in {{1,2,3}}", dim));
  }
  if (!(radius > 0.0)) throw GridError("BallGrid: radius must be positive");
  if (nodes_per_radius < 8) {
    throw GridError(fmt::format("BallGrid: nodes per radius {} < 8", nodes_per_radius));
  }

  auto grid = std::shared_ptr<BallGrid>(new BallGrid());
  BallGrid& g = *grid;
  g.dim_ = dim;
  g.radius_ = radius;
  g.m_ = nodes_per_radius;
  g.h_ = radius / nodes_per_radius;

  const int m = nodes_per_radius;
  const int width = 2 * m + 1;
  std::size_t box = 1;
  for (int a = 0; a < dim; ++a) box *= static_cast<std::size_t>(width);
  g.lookup_.assign(box, -1);

  // Interior test on the integer lattice: |i|^2 < m^2 exactly.
  const long long m2 = static_cast<long long>(m) * m;
  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < box; ++flat) {
    std::size_t rem = flat;
    long long r2 = 0;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % width) - m;
      rem /= width;
      r2 += static_cast<long long>(idx[a]) * idx[a];
    }
    if (r2 >= m2) continue;
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = idx[a] * g.h_;
    g.lookup_[flat] = static_cast<std::int64_t>(g.coords_.size());
    g.coords_.push_back(x);
    g.index_.push_back(idx);
  }

  g.arms_.assign(g.coords_.size() * 2 * kMaxDim, Arm{});
  for (std::size_t n = 0; n < g.coords_.size(); ++n) {
    for (int a = 0; a < dim; ++a) {
      for (int side = 0; side < 2; ++side) {
        auto nb = g.index_[n];
        nb[a] += side == 0 ? -1 : 1;
        Arm& arm = g.arms_[n * 2 * kMaxDim + 2 * a + side];
        arm.neighbor = g.find(nb);
        if (arm.neighbor >= 0) {
          arm.theta = 1.0;
        } else {
          const double t = distance_to_sphere(g.coords_[n], dim, radius, a, side == 0 ? -1.0 : 1.0);
          arm.theta = std::clamp(t / g.h_, std::numeric_limits<double>::min(), 1.0);
        }
      }
    }
  }
  return grid;
}

std::int64_t BallGrid::find(const std::array<int, 3>& idx) const {
  const int width = 2 * m_ + 1;
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    const int shifted = idx[a] + m_;
    if (shifted < 0 || shifted >= width) return -1;
    flat = flat * width + static_cast<std::size_t>(shifted);
  }
  return lookup_[flat];
}

Point BallGrid::arm_point(std::size_t node, int axis, int side) const {
  Point p = coords_[node];
  p[axis] += (side == 0 ? -1.0 : 1.0) * arm_length(node, axis, side);
  return p;
}

double BallGrid::norm(std::size_t node) const { return std::sqrt(squared_norm(coords_[node], dim_)); }

double BallGrid::distance_to_boundary(std::size_t node) const { return radius_ - norm(node); }

bool BallGrid::is_irregular(std::size_t node) const {
  for (int a = 0; a < dim_; ++a)
    for (int side = 0; side < 2; ++side)
      if (arm(node, a, side).on_boundary()) return true;
  return false;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)), values_(grid_->size(), value) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw GridError("ScalarField: value count does not match grid");
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(const Point&)>& fn) {
  ScalarField out(grid);
  for (std::size_t n = 0; n < grid->size(); ++n) out.values_[n] = fn(grid->coord(n));
  return out;
}

double ScalarField::boundary_value(std::size_t node, int axis, int side) const {
  if (!boundary_) return 0.0;
  return boundary_(grid_->arm_point(node, axis, side));
}

double ScalarField::arm_value(std::size_t node, int axis, int side) const {
  const Arm& arm = grid_->arm(node, axis, side);
  if (arm.on_boundary()) return boundary_value(node, axis, side);
  return values_[static_cast<std::size_t>(arm.neighbor)];
}

double ScalarField::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ScalarField::require_same_grid(const ScalarField& o) const {
  if (grid_ != o.grid_) throw GridError("field arithmetic between different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double sup_distance(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw GridError("sup_distance between different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

double upwind_grad_sq(const ScalarField& w, std::size_t node) {
  const BallGrid& g = *w.grid();
  const double c = w[node];
  double sum = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    sum += godunov_sq(c, w.arm_value(node, a, 0), g.arm_length(node, a, 0), w.arm_value(node, a, 1),
                      g.arm_length(node, a, 1));
  }
  return sum;
}

double laplacian(const ScalarField& w, std::size_t node) {
  const BallGrid& g = *w.grid();
  const double c = w[node];
  double sum = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double hm = g.arm_length(node, a, 0);
    const double hp = g.arm_length(node, a, 1);
    const double um = w.arm_value(node, a, 0);
    const double up = w.arm_value(node, a, 1);
    sum += 2.0 / (hm + hp) * ((up - c) / hp - (c - um) / hm);
  }
  return sum;
}

ScalarField laplacian(const ScalarField& w) {
  ScalarField out(w.grid());
  for (std::size_t n = 0; n < w.size(); ++n) out[n] = laplacian(w, n);
  return out;
}

std::string format_real(double v) {
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{}", v);
}

void write_csv(std::ostream& os, const ScalarField& f) {
  const BallGrid& g = *f.grid();
  for (int a = 0; a < g.dim(); ++a) os << 'x' << (a + 1) << ',';
  os << "value\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int a = 0; a < g.dim(); ++a) os << format_real(g.coord(n)[a]) << ',';
    os << format_real(f[n]) << '\n';
  }
}

std::string to_csv(const ScalarField& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

// ---------------------------------------------------------------------------

IntervalGrid::IntervalGrid(int intervals)
    : n_(intervals), left_(-std::numbers::pi), right_(std::numbers::pi) {
  if (intervals < 2 || intervals % 2 != 0) {
    throw GridError(fmt::format("IntervalGrid: interval count {} must be even and >= 2", intervals));
  }
  h_ = (right_ - left_) / intervals;
}

}  // namespace potform
