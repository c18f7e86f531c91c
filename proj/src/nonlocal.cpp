#include "potform/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace potform {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of 1/|z| over the cube [-1/2, 1/2]^3 scaled by h^2.
double unit_cube_inverse_distance() {
  const double c3 = 3.0 * std::log((1.0 + std::sqrt(3.0)) / std::sqrt(2.0)) - 0.25 * kPi;
  return 2.0 * c3;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double nearest_integer_offset(double x) { return x - std::round(x); }

constexpr std::array<double, 8> kGLx{0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                     0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                     0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGLw{0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                     0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                     0.0622535239386479, 0.0271524594117541};

template <class Fn>
double gauss(double a, double b, int panels, Fn&& fn) {
  double s = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    const double half = 0.5 * w;
    for (std::size_t i = 0; i < kGLx.size(); ++i)
      s += half * kGLw[i] * (fn(mid - half * kGLx[i]) + fn(mid + half * kGLx[i]));
  }
  return s;
}

}  // namespace

double kernel_constant(KernelSign sign, int dim) {
  if (dim != 3) throw std::invalid_argument("kernel_constant: only n = 3 is supported");
  return sign == KernelSign::Fundamental ? -1.0 / (4.0 * kPi) : 1.0;
}

WholeSpaceGrid::WholeSpaceGrid(int dim, double half_width, int nodes_per_half_width)
    : dim_(dim), half_width_(half_width), m_(nodes_per_half_width) {
  if (dim < 3) throw std::invalid_argument(fmt::format("WholeSpaceGrid: dimension {} < 3", dim));
  if (dim > 3) throw std::invalid_argument(fmt::format("WholeSpaceGrid: dimension {} unsupported", dim));
  if (!(half_width > 0.0) || nodes_per_half_width < 1)
    throw std::invalid_argument("WholeSpaceGrid: need L > 0 and at least one node per half width");
  h_ = half_width / nodes_per_half_width;
  const auto w = static_cast<std::size_t>(2 * m_ + 1);
  size_ = w * w * w;
}

std::array<int, 3> WholeSpaceGrid::index(std::size_t flat) const {
  const auto w = static_cast<std::size_t>(2 * m_ + 1);
  std::array<int, 3> idx{};
  for (int a = 2; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % w) - m_;
    flat /= w;
  }
  return idx;
}

std::size_t WholeSpaceGrid::flat(const std::array<int, 3>& idx) const {
  const auto w = static_cast<std::size_t>(2 * m_ + 1);
  std::size_t f = 0;
  for (int a = 0; a < 3; ++a) f = f * w + static_cast<std::size_t>(idx[a] + m_);
  return f;
}

Point WholeSpaceGrid::coord(std::size_t flat_id) const {
  const auto idx = index(flat_id);
  return {idx[0] * h_, idx[1] * h_, idx[2] * h_};
}

bool WholeSpaceGrid::on_face(std::size_t flat_id) const {
  const auto idx = index(flat_id);
  return std::any_of(idx.begin(), idx.end(), [&](int i) { return std::abs(i) == m_; });
}

BoxField BoxField::sample(BoxGridPtr grid, const std::function<double(const Point&)>& fn) {
  BoxField f{grid, std::vector<double>(grid->size())};
  for (std::size_t i = 0; i < grid->size(); ++i) f.values[i] = fn(grid->coord(i));
  return f;
}

double BoxField::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

std::vector<double> inv_laplacian_at(const BoxField& w, std::span<const std::size_t> targets, KernelSign sign) {
  const WholeSpaceGrid& g = *w.grid;
  const double h = g.spacing();
  const double k = kernel_constant(sign, g.dim());
  const double cell = h * h * h;
  const double self = k * unit_cube_inverse_distance() * h * h;

  struct Source {
    Point y;
    double weight;
    std::size_t id;
  };
  std::vector<Source> sources;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (w.values[j] != 0.0) sources.push_back({g.coord(j), k * cell * w.values[j], j});

  std::vector<double> out(targets.size(), 0.0);
  std::vector<double> terms(sources.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Point x = g.coord(targets[t]);
    for (std::size_t s = 0; s < sources.size(); ++s) {
      const Source& src = sources[s];
      if (src.id == targets[t]) {
        terms[s] = self * w.values[src.id];
        continue;
      }
      const double d0 = x[0] - src.y[0];
      const double d1 = x[1] - src.y[1];
      const double d2 = x[2] - src.y[2];
      terms[s] = src.weight / std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
    }
    out[t] = pairwise_sum(terms);
  }
  return out;
}

BoxField inv_laplacian(const BoxField& w, KernelSign sign) {
  std::vector<std::size_t> all(w.grid->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return {w.grid, inv_laplacian_at(w, all, sign)};
}

double box_laplacian(const BoxField& u, std::size_t flat_id) {
  const WholeSpaceGrid& g = *u.grid;
  const auto idx = g.index(flat_id);
  const double h2 = g.spacing() * g.spacing();
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(idx[a]) == g.half_count()) throw std::out_of_range("box_laplacian: node on the box face");
    auto lo = idx;
    auto hi = idx;
    --lo[a];
    ++hi[a];
    sum += u.values[g.flat(lo)] + u.values[g.flat(hi)] - 2.0 * u.values[flat_id];
  }
  return sum / h2;
}

double box_upwind_grad_sq(const BoxField& u, std::size_t flat_id) {
  const WholeSpaceGrid& g = *u.grid;
  const auto idx = g.index(flat_id);
  const double c = u.values[flat_id];
  const double h = g.spacing();
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    auto lo = idx;
    auto hi = idx;
    --lo[a];
    ++hi[a];
    const double m = idx[a] > -g.half_count() ? u.values[g.flat(lo)] : c;
    const double p = idx[a] < g.half_count() ? u.values[g.flat(hi)] : c;
    sum += godunov_sq(c, m, h, p, h);
  }
  return sum;
}

// ---------------------------------------------------------------------------

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smoothstep_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double q = t * (1.0 - t);
  return 30.0 * q * q;
}

namespace {

// Odd transition on [-1, 1] with T(+-1) = +-1 and vanishing first and second derivatives at the ends.
double odd_step(double t) { return 2.0 * smoothstep(0.5 * (t + 1.0)) - 1.0; }
double odd_step_derivative(double t) { return smoothstep_derivative(0.5 * (t + 1.0)); }

}  // namespace

int LatticeProfile::interval(double x1) const {
  if (x1 < 1.0 || x1 >= 2.0 * K + 1.0) return 0;
  return static_cast<int>(std::floor(0.5 * (x1 + 1.0)));
}

double LatticeProfile::value(double x1) const {
  const int k = interval(x1);
  if (k == 0 || x1 == 1.0) return 0.0;  // lower-semicontinuous at the left end of the support
  const double sk = s[k - 1];
  const double e = eps[k - 1];
  const double g = gamma[k - 1];
  const double c = 2.0 * k;
  if (x1 < c - e) return sk - g * smoothstep((x1 - (c - 1.0)) / (1.0 - e));
  if (x1 <= c + e) return (sk - g) * std::abs(odd_step((x1 - c) / e));
  return sk - g + g * smoothstep((x1 - c - e) / (1.0 - e));
}

double LatticeProfile::derivative(double x1) const {
  const int k = interval(x1);
  if (k == 0) return 0.0;
  const double sk = s[k - 1];
  const double e = eps[k - 1];
  const double g = gamma[k - 1];
  const double c = 2.0 * k;
  if (x1 < c - e) return -g * smoothstep_derivative((x1 - (c - 1.0)) / (1.0 - e)) / (1.0 - e);
  if (x1 < c) return -(sk - g) * odd_step_derivative((x1 - c) / e) / e;
  if (x1 <= c + e) return (sk - g) * odd_step_derivative((x1 - c) / e) / e;
  return g * smoothstep_derivative((x1 - c - e) / (1.0 - e)) / (1.0 - e);
}

double LatticeProfile::slope_sq(int k) const {
  const double r = gamma[k - 1] / eps[k - 1];
  return r * r;
}

LatticeProfile build_profile(double lambda, const std::function<double(int)>& f_lattice, int K) {
  if (!(lambda < 0.0)) throw std::invalid_argument("build_profile: lambda must be negative");
  if (K < 2) throw RangeTooSmall(fmt::format("lattice range K = {} < 2", K));
  LatticeProfile p;
  p.lambda = lambda;
  p.K = K;
  for (int k = 1; k <= K; ++k) {
    const double sk = std::ldexp(1.0, -k);
    const double fk = f_lattice ? f_lattice(k) : 0.0;
    if (!(fk >= 0.0)) throw std::invalid_argument("build_profile: lattice data must be nonnegative");
    const double ratio = std::sqrt(2.0 * (-lambda * sk + fk) / (sk * sk * sk));
    const double e = std::min({0.25, sk, sk / (2.0 * ratio)});
    p.s.push_back(sk);
    p.fk.push_back(fk);
    p.eps.push_back(e);
    p.gamma.push_back(ratio * e);
  }
  return p;
}

LatticeProfile scale_gamma(LatticeProfile p, double factor) {
  for (double& g : p.gamma) g *= factor;
  return p;
}

BoxField lift_profile(const LatticeProfile& p, const BoxGridPtr& grid) {
  return BoxField::sample(grid, [&](const Point& x) { return p.value(x[0]); });
}

double profile_lp_norm(const LatticeProfile& p, double exponent) {
  auto up = [&](double x) { return std::pow(p.value(x), exponent); };
  double total = 0.0;
  for (int k = 1; k <= p.K; ++k) {
    const double c = 2.0 * k;
    const double e = p.eps[k - 1];
    total += gauss(c - 1.0, c - e, 8, up);
    total += gauss(c - e, c, 8, up);
    total += gauss(c, c + e, 8, up);
    total += gauss(c + e, c + 1.0, 8, up);
  }
  return std::pow(total, 1.0 / exponent);
}

BoxField make_lattice_f(const std::function<double(int)>& amplitude, const BoxGridPtr& grid) {
  return BoxField::sample(grid, [&](const Point& x) {
    double inf = 0.0;
    double prod = 1.0;
    for (int a = 0; a < grid->dim(); ++a) {
      inf = std::max(inf, std::abs(x[a]));
      const double s = std::sin(kPi * nearest_integer_offset(x[a]));
      prod *= s * s;
    }
    if (prod == 0.0) return 0.0;
    const double amp = amplitude(static_cast<int>(std::ceil(inf)));
    if (amp < 0.0) throw std::invalid_argument("make_lattice_f: amplitude must be nonnegative");
    return amp * prod;
  });
}

const char* to_string(MarginCase c) {
  switch (c) {
    case MarginCase::Interior:
      return "interior";
    case MarginCase::EvenInteger:
      return "even";
    case MarginCase::OddInteger:
      return "odd";
  }
  return "?";
}

double EigenReport::worst() const { return std::min({worst_interior, worst_even, worst_odd}); }

EigenReport verify_eigen_supersolution(const LatticeProfile& profile, double lambda, const BoxField& f,
                                       const EigenCheckOptions& opts) {
  const BoxGridPtr& grid = f.grid;
  const WholeSpaceGrid& g = *grid;
  if (g.half_width() < 2.0 * profile.K + 1.0) {
    throw RangeTooSmall(fmt::format("box half width {} cannot hold the profile support [1, {}]", g.half_width(),
                                    2 * profile.K + 1));
  }
  if (opts.transverse_stride < 1) throw std::invalid_argument("transverse stride must be >= 1");
  const BoxField w = lift_profile(profile, grid);
  const double h = g.spacing();
  const int m = g.half_count();

  std::vector<std::size_t> targets;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      if (j % opts.transverse_stride != 0) continue;
      for (int l = -m; l <= m; ++l) {
        if (l % opts.transverse_stride != 0) continue;
        targets.push_back(g.flat({i, j, l}));
      }
    }
  const auto nonlocal = inv_laplacian_at(w, targets, opts.sign);

  EigenReport rep;
  const double inf = std::numeric_limits<double>::infinity();
  rep.worst_interior = rep.worst_even = rep.worst_odd = inf;

  // Worst row per (case, k).
  std::vector<MarginRow> worst(3 * static_cast<std::size_t>(profile.K + 1),
                               MarginRow{MarginCase::Interior, 0, {}, inf});
  std::vector<double> f_odd(static_cast<std::size_t>(profile.K + 1), 0.0);

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const std::size_t id = targets[t];
    const Point x = g.coord(id);
    const double wv = w.values[id];
    const double margin = lambda * nonlocal[t] + wv * wv * wv * box_upwind_grad_sq(w, id) - f.values[id];

    MarginCase kind = MarginCase::Interior;
    int k = profile.interval(x[0]);
    if (std::abs(nearest_integer_offset(x[0])) < 1e-9 * h) {
      const auto n = static_cast<long long>(std::llround(x[0]));
      kind = n % 2 == 0 ? MarginCase::EvenInteger : MarginCase::OddInteger;
      if (kind == MarginCase::OddInteger && n >= 1 && n <= 2LL * profile.K - 1) {
        const auto kk = static_cast<std::size_t>((n + 1) / 2);
        f_odd[kk] = std::max(f_odd[kk], f.values[id]);
      }
    }
    MarginRow& slot = worst[3 * static_cast<std::size_t>(k) + static_cast<std::size_t>(kind)];
    if (margin < slot.margin) slot = {kind, k, x, margin};
  }
  for (const MarginRow& r : worst) {
    if (r.margin == inf) continue;
    rep.rows.push_back(r);
    double& agg = r.kind == MarginCase::Interior      ? rep.worst_interior
                  : r.kind == MarginCase::EvenInteger ? rep.worst_even
                                                      : rep.worst_odd;
    agg = std::min(agg, r.margin);
  }

  // Reduced inequality at x1 = 2k-1 with the delta(k) split of the positive-kernel integral.
  const double cell = h * h * h;
  for (int k = 1; k <= profile.K; ++k) {
    OddDiagnostics d{};
    d.k = k;
    d.s = profile.s[k - 1];
    d.delta = std::pow(d.s * d.s, 1.0 / 3.0);
    d.slope_sq = profile.slope_sq(k);
    d.f_odd = f_odd[static_cast<std::size_t>(k)];
    d.local_bound = d.s * 2.0 * kPi * d.delta * d.delta;
    const Point x{2.0 * k - 1.0, 0.0, 0.0};
    std::vector<double> terms;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (w.values[j] == 0.0) continue;
      const Point y = g.coord(j);
      const double r = std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) +
                                 (x[2] - y[2]) * (x[2] - y[2]));
      if (r >= d.delta) terms.push_back(w.values[j] * cell / r);
    }
    d.nonlocal_part = pairwise_sum(terms);
    d.reduced_margin = d.s * d.s * d.s * d.slope_sq - (-lambda * d.s + d.f_odd);
    rep.odd.push_back(d);
    rep.rows.push_back({MarginCase::OddInteger, k, x, d.reduced_margin});
    rep.worst_odd = std::min(rep.worst_odd, d.reduced_margin);
  }
  if (rep.worst_interior == inf) rep.worst_interior = 0.0;
  if (rep.worst_even == inf) rep.worst_even = 0.0;
  return rep;
}

double zero_subsolution_margin(const BoxField& f) {
  return *std::min_element(f.values.begin(), f.values.end());
}

std::string profile_csv(const LatticeProfile& p, double step) {
  std::ostringstream os;
  os << "x1,u\n";
  const auto count = static_cast<long long>(std::floor((2.0 * p.K + 2.0) / step));
  for (long long i = 0; i <= count; ++i) {
    const double x = static_cast<double>(i) * step;
    os << format_real(x) << ',' << format_real(p.value(x)) << '\n';
  }
  return os.str();
}

std::string margin_csv(const EigenReport& r) {
  std::ostringstream os;
  os << "case,location,margin\n";
  for (const auto& row : r.rows) {
    os << to_string(row.kind) << ',' << format_real(row.location[0]) << ' ' << format_real(row.location[1]) << ' '
       << format_real(row.location[2]) << ',' << format_real(row.margin) << '\n';
  }
  return os.str();
}

}  // namespace potform
