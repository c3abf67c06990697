/**
 * @brief Pointwise sigma_k calculus on 4x4 symmetric matrices.
 *
 * Elementary symmetric functions of the spectrum, Newton transforms,
 * Gamma_k^+ cone membership and the Ricci tensor recovered from a
 * Schouten tensor in dimension four. Matrices are mixed-index tensors
 * identified with plain symmetric matrices through the flat metric.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "s2lab/error.hpp"

namespace s2lab {

/// Eigenvalue list of a 4x4 symmetric matrix.
using Spectrum = std::array<double, 4>;
using Vec4 = std::array<double, 4>;

/// Default width of the cone boundary band.
inline constexpr double kDefaultConeTol = 1e-10;
/// Below this (scale-normalised) quartic discriminant the closed-form
/// eigenvalue path hands over to the iterative solver.
inline constexpr double kQuarticDiscriminantFloor = 1e-12;

/// 4x4 real symmetric matrix stored as its upper triangle.
class SymMat4 {
 public:
  static constexpr int kDim = 4;

  constexpr SymMat4() = default;

  static SymMat4 identity(double scale = 1.0) {
    SymMat4 m;
    for (int i = 0; i < kDim; ++i) m.set(i, i, scale);
    return m;
  }

  static SymMat4 diagonal(const Spectrum& d) {
    SymMat4 m;
    for (int i = 0; i < kDim; ++i) m.set(i, i, d[i]);
    return m;
  }

  /// v v^T
  static SymMat4 outer(const Vec4& v) {
    SymMat4 m;
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) m.set(i, j, v[i] * v[j]);
    return m;
  }

  /// Symmetrises an arbitrary dense matrix.
  static SymMat4 from_dense(const Eigen::Matrix4d& d) {
    SymMat4 m;
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) m.set(i, j, 0.5 * (d(i, j) + d(j, i)));
    return m;
  }

  Eigen::Matrix4d dense() const {
    Eigen::Matrix4d d;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) d(i, j) = (*this)(i, j);
    return d;
  }

  double operator()(int i, int j) const { return upper_[index(i, j)]; }
  void set(int i, int j, double v) { upper_[index(i, j)] = v; }

  double trace() const {
    return upper_[0] + upper_[4] + upper_[7] + upper_[9];
  }

  bool is_finite() const {
    return std::all_of(upper_.begin(), upper_.end(),
                       [](double x) { return std::isfinite(x); });
  }

  /// Largest entry in absolute value.
  double max_abs() const {
    double m = 0.0;
    for (double x : upper_) m = std::max(m, std::abs(x));
    return m;
  }

  Vec4 apply(const Vec4& v) const {
    Vec4 out{};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  const std::array<double, 10>& upper() const { return upper_; }

  SymMat4& operator+=(const SymMat4& o) {
    for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] += o.upper_[k];
    return *this;
  }
  SymMat4& operator-=(const SymMat4& o) {
    for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] -= o.upper_[k];
    return *this;
  }
  SymMat4& operator*=(double s) {
    for (double& x : upper_) x *= s;
    return *this;
  }
  friend SymMat4 operator+(SymMat4 a, const SymMat4& b) { return a += b; }
  friend SymMat4 operator-(SymMat4 a, const SymMat4& b) { return a -= b; }
  friend SymMat4 operator*(SymMat4 a, double s) { return a *= s; }
  friend SymMat4 operator*(double s, SymMat4 a) { return a *= s; }
  friend SymMat4 operator-(SymMat4 a) { return a *= -1.0; }
  friend bool operator==(const SymMat4&, const SymMat4&) = default;

 private:
  static constexpr int index(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * kDim - i * (i - 1) / 2 + (j - i);
  }

  std::array<double, 10> upper_{};
};

/// Max-norm distance between two symmetric matrices.
inline double max_abs_diff(const SymMat4& a, const SymMat4& b) {
  return (a - b).max_abs();
}

/// Sum over all k-subsets of products of entries; k = 0 gives 1.
inline double elementary_symmetric(int k, const Spectrum& s) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return s[0] + s[1] + s[2] + s[3];
    case 2:
      return s[0] * s[1] + s[0] * s[2] + s[0] * s[3] + s[1] * s[2] +
             s[1] * s[3] + s[2] * s[3];
    case 3:
      return s[0] * s[1] * s[2] + s[0] * s[1] * s[3] + s[0] * s[2] * s[3] +
             s[1] * s[2] * s[3];
    case 4:
      return s[0] * s[1] * s[2] * s[3];
    default:
      throw DomainError("elementary_symmetric: k must lie in 0..4, got " +
                        std::to_string(k));
  }
}

/// sigma_0 .. sigma_4 in one pass.
inline std::array<double, 5> elementary_symmetric_all(const Spectrum& s) {
  std::array<double, 5> out{};
  for (int k = 0; k <= 4; ++k) out[k] = elementary_symmetric(k, s);
  return out;
}

namespace detail {

/// Largest real root of t^3 + a t^2 + b t + c.
inline double largest_cubic_root(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  if (p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    return m * std::cos(std::acos(arg) / 3.0) + shift;
  }
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  const double sq = std::sqrt(std::max(disc, 0.0));
  return std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq) + shift;
}

/// Eigenvalues from the characteristic quartic (Ferrari). Returns false when
/// the quartic is too close to having a repeated root, or when any step
/// loses its real-rootedness; the caller then uses the iterative solver.
inline bool quartic_eigenvalues(const SymMat4& a, Spectrum& out) {
  const double scale = a.max_abs();
  if (scale == 0.0) {
    out = {0.0, 0.0, 0.0, 0.0};
    return true;
  }
  const Eigen::Matrix4d b = a.dense() / scale;
  const Eigen::Matrix4d b2 = b * b;
  const double p1 = b.trace();
  const double p2 = b2.trace();
  const double p3 = (b2 * b).trace();
  const double p4 = (b2 * b2).trace();
  // Newton's identities: characteristic coefficients from power sums.
  const double c1 = p1;
  const double c2 = (c1 * p1 - p2) / 2.0;
  const double c3 = (c2 * p1 - c1 * p2 + p3) / 3.0;
  const double c4 = (c3 * p1 - c2 * p2 + c1 * p3 - p4) / 4.0;

  // x^4 + bb x^3 + cc x^2 + dd x + ee
  const double bb = -c1, cc = c2, dd = -c3, ee = c4;
  const double P = cc - 3.0 * bb * bb / 8.0;
  const double Q = bb * bb * bb / 8.0 - bb * cc / 2.0 + dd;
  const double R = -3.0 * bb * bb * bb * bb / 256.0 + bb * bb * cc / 16.0 -
                   bb * dd / 4.0 + ee;
  const double disc = 256.0 * R * R * R - 128.0 * P * P * R * R +
                      144.0 * P * Q * Q * R - 27.0 * Q * Q * Q * Q +
                      16.0 * P * P * P * P * R - 4.0 * P * P * P * Q * Q;
  if (!(std::abs(disc) >= kQuarticDiscriminantFloor)) return false;

  const double m = largest_cubic_root(P, P * P / 4.0 - R, -Q * Q / 8.0);
  if (!(m > 1e-14)) return false;
  const double s2 = std::sqrt(2.0 * m);
  const double d1 = -2.0 * m - 2.0 * P - 2.0 * Q / s2;
  const double d2 = -2.0 * m - 2.0 * P + 2.0 * Q / s2;
  if (d1 < -1e-10 || d2 < -1e-10) return false;
  const double r1 = std::sqrt(std::max(d1, 0.0));
  const double r2 = std::sqrt(std::max(d2, 0.0));
  const double shift = c1 / 4.0;
  Spectrum roots = {(s2 + r1) / 2.0 + shift, (s2 - r1) / 2.0 + shift,
                    (-s2 + r2) / 2.0 + shift, (-s2 - r2) / 2.0 + shift};

  // One Rayleigh-quotient step per root. The characteristic polynomial
  // conditions a root by the product of its gaps; the quotient brings it
  // back to the accuracy of the matrix itself.
  const Eigen::Vector4d start(1.0, 0.8660254037844386, 0.7071067811865476, 0.5);
  for (double& x : roots) {
    const Eigen::Vector4d v =
        (b - x * Eigen::Matrix4d::Identity()).partialPivLu().solve(start);
    const double nv = v.squaredNorm();
    if (!(nv > 0.0) || !std::isfinite(nv)) continue;
    x = v.dot(b * v) / nv;
  }
  const double sum = roots[0] + roots[1] + roots[2] + roots[3];
  if (!(std::abs(sum - c1) <= 1e-10 * (1.0 + std::abs(c1)))) return false;
  for (double& x : roots) x *= scale;
  std::sort(roots.begin(), roots.end());
  out = roots;
  return true;
}

inline Spectrum iterative_eigenvalues(const SymMat4& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(
      a.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw DomainError("eigenvalues: symmetric eigen-solve failed");
  const auto& ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2), ev(3)};
}

}  // namespace detail

/// Ascending eigenvalues. Closed-form quartic roots when well separated,
/// iterative symmetric solve otherwise.
inline Spectrum eigenvalues(const SymMat4& a) {
  if (!a.is_finite())
    throw DomainError("eigenvalues: matrix has non-finite entries");
  Spectrum s;
  if (detail::quartic_eigenvalues(a, s)) return s;
  return detail::iterative_eigenvalues(a);
}

inline double elementary_symmetric(int k, const SymMat4& a) {
  if (k < 0 || k > 4)
    throw DomainError("elementary_symmetric: k must lie in 0..4, got " +
                      std::to_string(k));
  return elementary_symmetric(k, eigenvalues(a));
}

/// T_j(A) = sum_{i=0}^{j} (-1)^i sigma_{j-i}(A) A^i.
inline SymMat4 newton_transform(int j, const SymMat4& a) {
  if (j < 0 || j > 3)
    throw DomainError("newton_transform: j must lie in 0..3, got " +
                      std::to_string(j));
  const auto sigma = elementary_symmetric_all(eigenvalues(a));
  const Eigen::Matrix4d d = a.dense();
  Eigen::Matrix4d power = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
  double sign = 1.0;
  for (int i = 0; i <= j; ++i) {
    t += sign * sigma[j - i] * power;
    power = power * d;
    sign = -sign;
  }
  return SymMat4::from_dense(t);
}

struct ConeStatus {
  enum class Tag { interior, boundary, outside };

  Tag tag = Tag::outside;
  /// sigma_1 .. sigma_k
  std::vector<double> margins;

  double min_margin() const {
    return *std::min_element(margins.begin(), margins.end());
  }
  bool interior() const { return tag == Tag::interior; }
};

inline const char* to_string(ConeStatus::Tag t) {
  switch (t) {
    case ConeStatus::Tag::interior:
      return "interior";
    case ConeStatus::Tag::boundary:
      return "boundary";
    case ConeStatus::Tag::outside:
      return "outside";
  }
  return "?";
}

inline ConeStatus cone_membership(int k, const Spectrum& s,
                                  double tol = kDefaultConeTol) {
  if (k < 1 || k > 4)
    throw DomainError("cone_membership: k must lie in 1..4, got " +
                      std::to_string(k));
  if (!(tol >= 0.0)) throw DomainError("cone_membership: tol must be >= 0");
  for (double x : s)
    if (!std::isfinite(x))
      throw DomainError("cone_membership: non-finite spectrum");
  ConeStatus status;
  status.margins.reserve(k);
  for (int j = 1; j <= k; ++j)
    status.margins.push_back(elementary_symmetric(j, s));
  const double lo = status.min_margin();
  if (lo > tol)
    status.tag = ConeStatus::Tag::interior;
  else if (lo >= -tol)
    status.tag = ConeStatus::Tag::boundary;
  else
    status.tag = ConeStatus::Tag::outside;
  return status;
}

/// Gamma_k^+ classification of A (via its spectrum).
inline ConeStatus cone_membership(int k, const SymMat4& a,
                                  double tol = kDefaultConeTol) {
  return cone_membership(k, eigenvalues(a), tol);
}

/// Ric = 2A + sigma_1(A) I in dimension four (flat identification).
inline SymMat4 ricci_from_schouten(const SymMat4& a) {
  return 2.0 * a + SymMat4::identity(a.trace());
}

/// R = 6 sigma_1(A) in dimension four.
inline double scalar_curvature_from_schouten(const SymMat4& a) {
  return 6.0 * a.trace();
}

}  // namespace s2lab
