/**
 * @brief Discrete calculus on uniform 4-D grids and radial profiles.
 *
 * Second-order finite differences (central in the interior, one-sided at
 * the box faces), ball quadrature on grids and on radial samples, the
 * Moser cutoff eta = zeta^4, and the S2LAB1 field snapshot format.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "s2lab/error.hpp"
#include "s2lab/symcone.hpp"

namespace s2lab {

using Point4 = std::array<double, 4>;

/// Area of the unit 3-sphere.
inline constexpr double kUnitS3Area = 2.0 * std::numbers::pi * std::numbers::pi;

inline double norm2(const Vec4& v) {
  return v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
}
inline double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// The box [-L, L]^4 sampled with an odd number of points per axis.
class BallGrid4 {
 public:
  static constexpr int kMinPoints = 9;

  BallGrid4(double half_width, int points_per_axis)
      : half_width_(half_width), n_(points_per_axis) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw DomainError("BallGrid4: half_width must be positive");
    if (points_per_axis < kMinPoints || points_per_axis % 2 == 0)
      throw DomainError("BallGrid4: points_per_axis must be odd and >= 9, got " +
                        std::to_string(points_per_axis));
    h_ = 2.0 * half_width / (points_per_axis - 1);
  }

  double half_width() const { return half_width_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return h_; }
  std::size_t size() const {
    const auto n = static_cast<std::size_t>(n_);
    return n * n * n * n;
  }
  double coordinate(int i) const { return -half_width_ + i * h_; }

  /// Row-major: axis 0 varies slowest.
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = 3; a > axis; --a) s *= static_cast<std::size_t>(n_);
    return s;
  }
  std::array<int, 4> multi_index(std::size_t idx) const {
    std::array<int, 4> m{};
    for (int a = 3; a >= 0; --a) {
      m[a] = static_cast<int>(idx % n_);
      idx /= n_;
    }
    return m;
  }
  Point4 point(std::size_t idx) const {
    const auto m = multi_index(idx);
    return {coordinate(m[0]), coordinate(m[1]), coordinate(m[2]),
            coordinate(m[3])};
  }
  double radius(std::size_t idx) const { return std::sqrt(norm2(point(idx))); }

  friend bool operator==(const BallGrid4& a, const BallGrid4& b) {
    return a.n_ == b.n_ && a.half_width_ == b.half_width_;
  }

 private:
  double half_width_;
  int n_;
  double h_;
};

struct ScalarField4 {
  BallGrid4 grid;
  std::vector<double> samples;

  explicit ScalarField4(const BallGrid4& g, double fill = 0.0)
      : grid(g), samples(g.size(), fill) {}
  ScalarField4(const BallGrid4& g, std::vector<double> s)
      : grid(g), samples(std::move(s)) {
    if (samples.size() != grid.size())
      throw DomainError("ScalarField4: sample count does not match grid");
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : samples) m = std::max(m, std::abs(x));
    return m;
  }
};

struct VectorField4 {
  BallGrid4 grid;
  std::array<std::vector<double>, 4> components;

  explicit VectorField4(const BallGrid4& g) : grid(g) {
    for (auto& c : components) c.assign(g.size(), 0.0);
  }
  Vec4 at(std::size_t idx) const {
    return {components[0][idx], components[1][idx], components[2][idx],
            components[3][idx]};
  }
  void set(std::size_t idx, const Vec4& v) {
    for (int a = 0; a < 4; ++a) components[a][idx] = v[a];
  }
};

struct SymTensorField4 {
  BallGrid4 grid;
  std::vector<SymMat4> values;

  explicit SymTensorField4(const BallGrid4& g) : grid(g), values(g.size()) {}
};

template <class F>
ScalarField4 sample_field(const BallGrid4& grid, F&& f) {
  ScalarField4 out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out.samples[i] = f(grid.point(i));
  return out;
}

namespace detail {

/// d/dx_axis along every grid line: central inside, 3-point one-sided at
/// the ends. Exact on quadratics.
inline std::vector<double> axis_derivative(const BallGrid4& grid,
                                           std::span<const double> f,
                                           int axis) {
  const int n = grid.points_per_axis();
  const double inv2h = 1.0 / (2.0 * grid.spacing());
  const std::size_t s = grid.stride(axis);
  std::vector<double> out(f.size());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const int i = static_cast<int>((idx / s) % n);
    if (i == 0)
      out[idx] = (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) * inv2h;
    else if (i == n - 1)
      out[idx] = (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) * inv2h;
    else
      out[idx] = (f[idx + s] - f[idx - s]) * inv2h;
  }
  return out;
}

/// d^2/dx_axis^2: 3-point central inside, 4-point one-sided at the ends.
inline std::vector<double> axis_second_derivative(const BallGrid4& grid,
                                                  std::span<const double> f,
                                                  int axis) {
  const int n = grid.points_per_axis();
  const double invh2 = 1.0 / (grid.spacing() * grid.spacing());
  const std::size_t s = grid.stride(axis);
  std::vector<double> out(f.size());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const int i = static_cast<int>((idx / s) % n);
    if (i == 0)
      out[idx] = (2.0 * f[idx] - 5.0 * f[idx + s] + 4.0 * f[idx + 2 * s] -
                  f[idx + 3 * s]) *
                 invh2;
    else if (i == n - 1)
      out[idx] = (2.0 * f[idx] - 5.0 * f[idx - s] + 4.0 * f[idx - 2 * s] -
                  f[idx - 3 * s]) *
                 invh2;
    else
      out[idx] = (f[idx + s] - 2.0 * f[idx] + f[idx - s]) * invh2;
  }
  return out;
}

}  // namespace detail

inline VectorField4 fd_gradient(const ScalarField4& f) {
  VectorField4 g(f.grid);
  for (int a = 0; a < 4; ++a)
    g.components[a] = detail::axis_derivative(f.grid, f.samples, a);
  return g;
}

/// Diagonal entries by the 3-point stencil, mixed partials as the
/// composition of first differences (the centred cross-stencil inside).
inline SymTensorField4 fd_hessian(const ScalarField4& f) {
  SymTensorField4 hess(f.grid);
  for (int a = 0; a < 4; ++a) {
    const auto daa = detail::axis_second_derivative(f.grid, f.samples, a);
    for (std::size_t i = 0; i < daa.size(); ++i) hess.values[i].set(a, a, daa[i]);
    const auto da = detail::axis_derivative(f.grid, f.samples, a);
    for (int b = a + 1; b < 4; ++b) {
      const auto dab = detail::axis_derivative(f.grid, da, b);
      for (std::size_t i = 0; i < dab.size(); ++i) hess.values[i].set(a, b, dab[i]);
    }
  }
  return hess;
}

inline ScalarField4 fd_divergence(const VectorField4& x) {
  ScalarField4 div(x.grid);
  for (int a = 0; a < 4; ++a) {
    const auto d = detail::axis_derivative(x.grid, x.components[a], a);
    for (std::size_t i = 0; i < d.size(); ++i) div.samples[i] += d[i];
  }
  return div;
}

/// Midpoint rule over B_R: a grid point's cell counts iff the point lies in
/// the closed ball; weight h^4.
inline double ball_integral(const ScalarField4& f, double radius) {
  if (!(radius >= 0.0) || radius > f.grid.half_width())
    throw DomainError("ball_integral: radius outside the grid box");
  const double h = f.grid.spacing();
  const double r2 = radius * radius * (1.0 + 1e-12);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    if (norm2(f.grid.point(i)) <= r2) sum += f.samples[i];
  return sum * h * h * h * h;
}

/// Max |f| over grid points inside the closed ball B_R.
inline double ball_max_abs(const ScalarField4& f, double radius) {
  const double r2 = radius * radius * (1.0 + 1e-12);
  double m = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    if (norm2(f.grid.point(i)) <= r2) m = std::max(m, std::abs(f.samples[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Radial data

/// Radially symmetric samples of w and its first two radial derivatives.
struct RadialProfile {
  std::vector<double> r, w, dw, d2w;

  std::size_t size() const { return r.size(); }
  double r_max() const { return r.empty() ? 0.0 : r.back(); }

  /// r[0] = 0, w'(0) = 0, strictly increasing r, equal lengths, finite.
  bool valid() const {
    if (r.empty() || w.size() != r.size() || dw.size() != r.size() ||
        d2w.size() != r.size())
      return false;
    if (r[0] != 0.0 || dw[0] != 0.0) return false;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(w[i]) || !std::isfinite(dw[i]) || !std::isfinite(d2w[i]))
        return false;
      if (i > 0 && !(r[i] > r[i - 1])) return false;
    }
    return true;
  }

  void validate() const {
    if (!valid()) throw DomainError("RadialProfile: invariants violated");
  }

  void push_back(double ri, double wi, double dwi, double d2wi) {
    r.push_back(ri);
    w.push_back(wi);
    dw.push_back(dwi);
    d2w.push_back(d2wi);
  }
};

namespace detail {

/// Composite Simpson on uniformly spaced values; the 3/8 rule absorbs an
/// odd interval count.
inline double simpson_uniform(std::span<const double> y, double h) {
  const std::size_t m = y.size() - 1;
  if (m == 0) return 0.0;
  if (m == 1) return 0.5 * h * (y[0] + y[1]);
  std::size_t even = (m % 2 == 0) ? m : m - 3;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2)
    s += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
  if (even != m) {
    const std::size_t i = even;
    s += 3.0 * h / 8.0 * (y[i] + 3.0 * y[i + 1] + 3.0 * y[i + 2] + y[i + 3]);
  }
  return s;
}

}  // namespace detail

/// 2 pi^2 int_0^R f(r) r^3 dr from samples on a uniform radial grid starting
/// at 0. A radius between samples adds a trapezoid on the last partial cell.
inline double radial_ball_integral(std::span<const double> r,
                                   std::span<const double> values,
                                   double radius) {
  if (r.size() != values.size() || r.size() < 2)
    throw DomainError("radial_ball_integral: need >= 2 matching samples");
  if (r[0] != 0.0) throw DomainError("radial_ball_integral: r[0] must be 0");
  const double h = r[1] - r[0];
  const double rmax = r.back();
  if (!(radius >= 0.0) || radius > rmax * (1.0 + 1e-12))
    throw DomainError("radial_ball_integral: radius outside the profile");
  if (std::abs((rmax - r[0]) - h * (r.size() - 1)) > 1e-9 * std::max(1.0, rmax))
    throw DomainError("radial_ball_integral: profile spacing is not uniform");
  radius = std::min(radius, rmax);

  std::size_t last = static_cast<std::size_t>(std::floor(radius / h + 1e-9));
  last = std::min(last, r.size() - 1);
  std::vector<double> y(last + 1);
  for (std::size_t i = 0; i <= last; ++i)
    y[i] = values[i] * r[i] * r[i] * r[i];
  double s = detail::simpson_uniform(y, h);
  const double rest = radius - r[last];
  if (rest > 1e-12 * std::max(1.0, radius) && last + 1 < r.size()) {
    const double t = rest / h;
    const double v = (1.0 - t) * values[last] + t * values[last + 1];
    s += 0.5 * rest * (y[last] + v * radius * radius * radius);
  }
  return kUnitS3Area * s;
}

inline double radial_ball_integral(const RadialProfile& p,
                                   std::span<const double> values,
                                   double radius) {
  return radial_ball_integral(p.r, values, radius);
}

/// 2 pi^2 int_a^b f(r) r^3 dr for a callable, Simpson with `intervals` cells.
template <class F>
double radial_shell_integral(F&& f, double a, double b, int intervals = 2000) {
  if (!(b >= a) || !(a >= 0.0))
    throw DomainError("radial_shell_integral: need 0 <= a <= b");
  if (intervals < 2) intervals = 2;
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double r = a + i * h;
    const double wgt = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += wgt * f(r) * r * r * r;
  }
  return kUnitS3Area * s * h / 3.0;
}

template <class F>
double radial_ball_integral(F&& f, double radius, int intervals = 2000) {
  return radial_shell_integral(std::forward<F>(f), 0.0, radius, intervals);
}

/// Samples of a callable on a uniform radial grid [0, r_max].
inline std::vector<double> radial_grid(double r_max, double step) {
  if (!(r_max > 0.0) || !(step > 0.0))
    throw DomainError("radial_grid: r_max and step must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(r_max / step - 1e-9));
  const double h = r_max / static_cast<double>(n);
  std::vector<double> r(n + 1);
  for (std::size_t i = 0; i <= n; ++i) r[i] = h * static_cast<double>(i);
  r.back() = r_max;
  return r;
}

// ---------------------------------------------------------------------------
// Cutoff

/// eta = zeta^4 with zeta the piecewise-linear radial hat: 1 on B_inner,
/// 0 outside B_outer. On the two kink spheres the derivatives take their
/// values from the flat side.
class Cutoff {
 public:
  Cutoff(double r_inner, double r_outer) : r_inner_(r_inner), r_outer_(r_outer) {
    if (!(r_inner > 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer))
      throw DomainError("cutoff: need 0 < R_inner < R_outer");
  }

  double r_inner() const { return r_inner_; }
  double r_outer() const { return r_outer_; }

  double zeta(double r) const {
    if (r <= r_inner_) return 1.0;
    if (r >= r_outer_) return 0.0;
    return (r_outer_ - r) / (r_outer_ - r_inner_);
  }
  double value(double r) const {
    const double z = zeta(r);
    return z * z * z * z;
  }
  /// d eta / dr
  double radial_derivative(double r) const {
    if (r <= r_inner_ || r >= r_outer_) return 0.0;
    const double z = zeta(r);
    return -4.0 * z * z * z / (r_outer_ - r_inner_);
  }
  /// d^2 eta / dr^2
  double radial_second_derivative(double r) const {
    if (r <= r_inner_ || r >= r_outer_) return 0.0;
    const double z = zeta(r);
    const double dz = 1.0 / (r_outer_ - r_inner_);
    return 12.0 * z * z * dz * dz;
  }

  double value(const Point4& x) const { return value(std::sqrt(norm2(x))); }

  Vec4 gradient(const Point4& x) const {
    const double r = std::sqrt(norm2(x));
    if (r == 0.0) return {};
    const double d = radial_derivative(r) / r;
    return {d * x[0], d * x[1], d * x[2], d * x[3]};
  }

  /// eta'' xx^T/r^2 + (eta'/r)(I - xx^T/r^2).
  SymMat4 hessian(const Point4& x) const {
    const double r = std::sqrt(norm2(x));
    if (r == 0.0) return {};
    const double d1 = radial_derivative(r), d2 = radial_second_derivative(r);
    const Vec4 u = {x[0] / r, x[1] / r, x[2] / r, x[3] / r};
    return SymMat4::identity(d1 / r) + (d2 - d1 / r) * SymMat4::outer(u);
  }

  /// eta |Hess eta| / |grad eta|^2 with the spectral norm; 3/4 on the
  /// transition annulus whenever R_outer <= 4 R_inner.
  double hessian_ratio(double r) const {
    const double d1 = radial_derivative(r);
    if (d1 == 0.0) return 0.0;
    const double hnorm =
        std::max(std::abs(radial_second_derivative(r)), std::abs(d1) / r);
    return value(r) * hnorm / (d1 * d1);
  }

  ScalarField4 sample(const BallGrid4& grid) const {
    return sample_field(grid, [this](const Point4& x) { return value(x); });
  }

 private:
  double r_inner_, r_outer_;
};

inline Cutoff cutoff(double r_inner, double r_outer) {
  return Cutoff(r_inner, r_outer);
}

// ---------------------------------------------------------------------------
// Snapshot format
//
// Binary: "S2LAB1" | u32 axis count (4) | u32 points_per_axis |
//         f64 half_width | f64 samples in row-major order, little-endian.
// CSV:    line 1 "S2LAB1"; line 2 header "axes,points_per_axis,half_width";
//         line 3 the values; then one sample per line, row-major.

inline constexpr char kSnapshotMagic[] = "S2LAB1";

inline void write_snapshot_binary(std::ostream& os, const ScalarField4& f) {
  static_assert(std::numeric_limits<double>::is_iec559);
  os.write(kSnapshotMagic, 6);
  const std::uint32_t axes = 4;
  const auto n = static_cast<std::uint32_t>(f.grid.points_per_axis());
  const double L = f.grid.half_width();
  os.write(reinterpret_cast<const char*>(&axes), sizeof axes);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&L), sizeof L);
  os.write(reinterpret_cast<const char*>(f.samples.data()),
           static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
}

inline ScalarField4 read_snapshot_binary(std::istream& is) {
  char magic[6];
  if (!is.read(magic, 6) || std::memcmp(magic, kSnapshotMagic, 6) != 0)
    throw DomainError("snapshot: bad magic");
  std::uint32_t axes = 0, n = 0;
  double L = 0.0;
  is.read(reinterpret_cast<char*>(&axes), sizeof axes);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  if (!is || axes != 4) throw DomainError("snapshot: bad header");
  ScalarField4 f(BallGrid4(L, static_cast<int>(n)));
  if (!is.read(reinterpret_cast<char*>(f.samples.data()),
               static_cast<std::streamsize>(f.samples.size() * sizeof(double))))
    throw DomainError("snapshot: truncated samples");
  return f;
}

inline void write_snapshot_csv(std::ostream& os, const ScalarField4& f) {
  os << kSnapshotMagic << "\naxes,points_per_axis,half_width\n4,"
     << f.grid.points_per_axis() << ','
     << std::setprecision(17) << f.grid.half_width() << '\n';
  for (double x : f.samples) os << x << '\n';
}

inline ScalarField4 read_snapshot_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSnapshotMagic)
    throw DomainError("snapshot: bad magic");
  std::getline(is, line);  // column names
  if (!std::getline(is, line)) throw DomainError("snapshot: missing header");
  std::istringstream hs(line);
  int axes = 0, n = 0;
  double L = 0.0;
  char c1 = 0, c2 = 0;
  if (!(hs >> axes >> c1 >> n >> c2 >> L) || axes != 4 || c1 != ',' || c2 != ',')
    throw DomainError("snapshot: bad header");
  ScalarField4 f(BallGrid4(L, n));
  for (double& x : f.samples) {
    if (!std::getline(is, line)) throw DomainError("snapshot: truncated samples");
    x = std::stod(line);
  }
  return f;
}

}  // namespace s2lab
