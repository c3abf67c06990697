/**
 * @brief Curvature of g = e^{2w}|dx|^2 on flat R^4.
 *
 * Schouten tensor in mixed form, sigma_2 in the background and intrinsic
 * normalisations, the divergence-form coefficient tensor M, the radial
 * eigenvalue reduction and the round-sphere bubble family.
 *
 * Every tensor is stored mixed (g0^{-1} o A) so that sigma_k and Newton
 * transforms act on plain symmetric matrices.
 */
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "s2lab/fields.hpp"
#include "s2lab/symcone.hpp"

namespace s2lab {

/// A = -(Hess w - dw (x) dw + |dw|^2/2 I).
inline SymMat4 schouten_from_derivatives(const Vec4& grad, const SymMat4& hess) {
  return -(hess - SymMat4::outer(grad) + SymMat4::identity(0.5 * norm2(grad)));
}

/// M = T_1(A) + |dw|^2/2 I.
inline SymMat4 m_from_newton(const SymMat4& a, const Vec4& grad) {
  return newton_transform(1, a) + SymMat4::identity(0.5 * norm2(grad));
}

/// M = Hess w - (Lap w) I - dw (x) dw.
inline SymMat4 m_from_derivatives(const Vec4& grad, const SymMat4& hess) {
  return hess - SymMat4::identity(hess.trace()) - SymMat4::outer(grad);
}

// ---------------------------------------------------------------------------
// Bubble

struct BubbleSpec {
  double lambda = 1.0;
  Point4 center{};
};

/// e^w = 2 lambda / (1 + lambda^2 |x - x0|^2): the round S^4 in stereographic
/// coordinates, scaled by lambda. Intrinsic sigma_2 is 3/2 everywhere.
class Bubble {
 public:
  explicit Bubble(BubbleSpec spec) : spec_(spec) {
    if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda))
      throw DomainError("Bubble: lambda must be positive");
  }
  explicit Bubble(double lambda) : Bubble(BubbleSpec{lambda, {}}) {}

  const BubbleSpec& spec() const { return spec_; }
  double lambda() const { return spec_.lambda; }

  double w(const Point4& x) const { return w_r(distance(x)); }
  double exp_w(const Point4& x) const { return std::exp(w(x)); }

  Vec4 gradient(const Point4& x) const {
    const Vec4 y = offset(x);
    const double l2 = spec_.lambda * spec_.lambda;
    const double c = -2.0 * l2 / (1.0 + l2 * norm2(y));
    return {c * y[0], c * y[1], c * y[2], c * y[3]};
  }

  SymMat4 hessian(const Point4& x) const {
    const Vec4 y = offset(x);
    const double l2 = spec_.lambda * spec_.lambda;
    const double s = 1.0 + l2 * norm2(y);
    return SymMat4::identity(-2.0 * l2 / s) +
           (4.0 * l2 * l2 / (s * s)) * SymMat4::outer(y);
  }

  SymMat4 schouten(const Point4& x) const {
    return schouten_from_derivatives(gradient(x), hessian(x));
  }

  // Radial forms, r = |x - x0|.
  double w_r(double r) const {
    const double l = spec_.lambda;
    return std::log(2.0 * l) - std::log1p(l * l * r * r);
  }
  double dw_r(double r) const {
    const double l2 = spec_.lambda * spec_.lambda;
    return -2.0 * l2 * r / (1.0 + l2 * r * r);
  }
  double d2w_r(double r) const {
    const double l2 = spec_.lambda * spec_.lambda;
    const double s = 1.0 + l2 * r * r;
    return -2.0 * l2 / s + 4.0 * l2 * l2 * r * r / (s * s);
  }

  /// Sampled on [0, r_max] with the given step.
  RadialProfile profile(double r_max, double step) const {
    RadialProfile p;
    for (double r : radial_grid(r_max, step)) p.push_back(r, w_r(r), dw_r(r), d2w_r(r));
    p.dw[0] = 0.0;
    return p;
  }

 private:
  Vec4 offset(const Point4& x) const {
    return {x[0] - spec_.center[0], x[1] - spec_.center[1],
            x[2] - spec_.center[2], x[3] - spec_.center[3]};
  }
  double distance(const Point4& x) const { return std::sqrt(norm2(offset(x))); }

  BubbleSpec spec_;
};

inline Bubble bubble(const BubbleSpec& spec) { return Bubble(spec); }

// ---------------------------------------------------------------------------
// Grid fields

/// w together with its gradient and Hessian on a grid, either by finite
/// differences or from closed forms.
struct DerivativeField {
  ScalarField4 w;
  VectorField4 grad;
  SymTensorField4 hess;
};

inline DerivativeField fd_derivatives(const ScalarField4& w) {
  return {w, fd_gradient(w), fd_hessian(w)};
}

inline DerivativeField analytic_derivatives(const Bubble& b, const BallGrid4& grid) {
  DerivativeField d{ScalarField4(grid), VectorField4(grid), SymTensorField4(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point4 x = grid.point(i);
    d.w.samples[i] = b.w(x);
    d.grad.set(i, b.gradient(x));
    d.hess.values[i] = b.hessian(x);
  }
  return d;
}

/// g0^{-1} o A_g per grid point.
struct SchoutenField {
  BallGrid4 grid;
  std::vector<SymMat4> A;
};

inline SchoutenField schouten_of(const DerivativeField& d) {
  SchoutenField s{d.w.grid, std::vector<SymMat4>(d.w.grid.size())};
  for (std::size_t i = 0; i < s.A.size(); ++i)
    s.A[i] = schouten_from_derivatives(d.grad.at(i), d.hess.values[i]);
  return s;
}

inline SchoutenField schouten_of(const ScalarField4& w) {
  return schouten_of(fd_derivatives(w));
}

inline SchoutenField schouten_of(const Bubble& b, const BallGrid4& grid) {
  return schouten_of(analytic_derivatives(b, grid));
}

/// sigma_2(g0^{-1} A) and sigma_2(g^{-1} A) = e^{-4w} sigma_2(g0^{-1} A).
struct Sigma2Fields {
  ScalarField4 background;
  ScalarField4 intrinsic;
};

inline Sigma2Fields sigma2_fields(const DerivativeField& d) {
  const SchoutenField s = schouten_of(d);
  Sigma2Fields out{ScalarField4(s.grid), ScalarField4(s.grid)};
  for (std::size_t i = 0; i < s.A.size(); ++i) {
    const double bg = elementary_symmetric(2, s.A[i]);
    out.background.samples[i] = bg;
    out.intrinsic.samples[i] = std::exp(-4.0 * d.w.samples[i]) * bg;
  }
  return out;
}

inline Sigma2Fields sigma2_fields(const ScalarField4& w) {
  return sigma2_fields(fd_derivatives(w));
}

inline Sigma2Fields sigma2_fields(const Bubble& b, const BallGrid4& grid) {
  return sigma2_fields(analytic_derivatives(b, grid));
}

/// M by both routes; they agree identically in exact arithmetic.
struct MTensorPair {
  SymTensorField4 from_newton;
  SymTensorField4 from_derivatives;

  double max_discrepancy() const {
    double m = 0.0;
    for (std::size_t i = 0; i < from_newton.values.size(); ++i)
      m = std::max(m, max_abs_diff(from_newton.values[i], from_derivatives.values[i]));
    return m;
  }
};

inline MTensorPair m_tensor(const DerivativeField& d) {
  MTensorPair m{SymTensorField4(d.w.grid), SymTensorField4(d.w.grid)};
  for (std::size_t i = 0; i < d.w.samples.size(); ++i) {
    const Vec4 g = d.grad.at(i);
    const SymMat4& h = d.hess.values[i];
    m.from_newton.values[i] = m_from_newton(schouten_from_derivatives(g, h), g);
    m.from_derivatives.values[i] = m_from_derivatives(g, h);
  }
  return m;
}

inline MTensorPair m_tensor(const ScalarField4& w) {
  return m_tensor(fd_derivatives(w));
}

inline MTensorPair m_tensor(const Bubble& b, const BallGrid4& grid) {
  return m_tensor(analytic_derivatives(b, grid));
}

// ---------------------------------------------------------------------------
// Radial reduction
//
// For w = w(r): A has the radial eigenvalue a_r = -w'' + w'^2/2 (once) and
// the tangential eigenvalue a_t = -(w'/r + w'^2/2) (three times), so
// sigma_1 = a_r + 3 a_t and sigma_2 = 3 a_t (a_r + a_t).

inline double radial_a_r(double dw, double d2w) { return -d2w + 0.5 * dw * dw; }

/// Tangential eigenvalue; at r = 0 the smooth limit w'/r -> w''(0).
inline double radial_a_t(double r, double dw, double d2w) {
  if (r == 0.0) return -d2w;
  return -(dw / r + 0.5 * dw * dw);
}

inline double radial_sigma1(double a_r, double a_t) { return a_r + 3.0 * a_t; }
inline double radial_sigma2(double a_r, double a_t) { return 3.0 * a_t * (a_r + a_t); }

struct RadialEigs {
  std::vector<double> a_r, a_t;
};

inline RadialEigs radial_schouten_eigs(const RadialProfile& p) {
  RadialEigs e;
  e.a_r.resize(p.size());
  e.a_t.resize(p.size());
  const bool ok = p.valid();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!ok) {
      e.a_r[i] = e.a_t[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    e.a_r[i] = radial_a_r(p.dw[i], p.d2w[i]);
    e.a_t[i] = radial_a_t(p.r[i], p.dw[i], p.d2w[i]);
  }
  return e;
}

/// Background sigma_2 per radial sample.
inline std::vector<double> radial_sigma2_background(const RadialProfile& p) {
  const RadialEigs e = radial_schouten_eigs(p);
  std::vector<double> s(p.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = radial_sigma2(e.a_r[i], e.a_t[i]);
  return s;
}

/// Laplacian of u = e^w for radial w: e^w (w'' + w'^2 + 3 w'/r).
inline double radial_laplacian_exp(double r, double w, double dw, double d2w) {
  const double drift = (r == 0.0) ? 3.0 * d2w : 3.0 * dw / r;
  return std::exp(w) * (d2w + dw * dw + drift);
}

}  // namespace s2lab
