/**
 * @brief Admissible radial solutions of the sigma_2 equations by shooting.
 *
 * With a_r = -w'' + w'^2/2 and a_t = -(w'/r + w'^2/2) the equation
 * sigma_2(g0^{-1}A) = 3 a_t (a_r + a_t) = f becomes the explicit ODE
 *
 *     w'' = w'^2/2 + a_t - f / (3 a_t),
 *
 * solved on the branch a_t > 0 that Gamma_2^+ forces. In intrinsic mode
 * f = K e^{4w} is re-evaluated along the trajectory.
 */
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "s2lab/conformal.hpp"
#include "s2lab/fields.hpp"
#include "s2lab/symcone.hpp"

namespace s2lab {

/// intrinsic: sigma_2(g^{-1}A) = K(r); background: sigma_2(g0^{-1}A) = f(r).
enum class EquationMode { intrinsic, background };

inline const char* to_string(EquationMode m) {
  return m == EquationMode::intrinsic ? "eq1" : "eq2";
}

/// Starting radius of the integration; [0, eps] is covered by the Taylor seed.
inline constexpr double kSeedRadius = 1e-6;
inline constexpr double kDefaultAdmissibilityTol = 1e-8;

struct SolveSpec {
  EquationMode mode = EquationMode::intrinsic;
  /// K(r) in intrinsic mode, f(r) in background mode; nonnegative.
  std::function<double(double)> rhs;
  double w0 = 0.0;
  double r_max = 2.0;
  double step = 1e-3;
  /// Admissibility margin.
  double tol = kDefaultAdmissibilityTol;
  /// A posteriori error target for the step-halving check.
  double accuracy = 1e-6;
  int max_halvings = 4;
};

struct SolveResult {
  RadialProfile profile;
  /// f = sigma_2(g0^{-1}A) along the profile.
  std::vector<double> f;
  double admissible_up_to = 0.0;
  bool converged = false;
  /// Radius where Gamma_2^+ interior status was lost, if it was.
  std::optional<double> violation_r;
  double error_estimate = 0.0;
  double step = 0.0;
};

namespace detail {

struct RadialState {
  double w, dw;
};

inline double rhs_value(const SolveSpec& spec, double r, double w) {
  const double v = spec.rhs(r);
  return spec.mode == EquationMode::intrinsic ? v * std::exp(4.0 * w) : v;
}

inline double second_derivative(const SolveSpec& spec, double r, const RadialState& s) {
  const double a_t = -(s.dw / r + 0.5 * s.dw * s.dw);
  return 0.5 * s.dw * s.dw + a_t - rhs_value(spec, r, s.w) / (3.0 * a_t);
}

inline bool admissible(double a_r, double a_t, double tol) {
  if (!(a_t > tol)) return false;
  return cone_membership(2, Spectrum{a_r, a_t, a_t, a_t}, tol).interior();
}

struct Trajectory {
  RadialProfile profile;
  std::vector<double> f;
  std::optional<double> violation_r;
};

/// Fixed-step RK4 on the uniform grid r_k = k h, first step from the seed
/// radius.
inline Trajectory integrate(const SolveSpec& spec, double step) {
  Trajectory t;
  const double f0 = rhs_value(spec, 0.0, spec.w0);
  const double a0 = std::sqrt(std::max(f0, 0.0) / 6.0);
  const double d2w0 = -a0;
  t.profile.push_back(0.0, spec.w0, 0.0, d2w0);
  t.f.push_back(f0);
  if (!(f0 >= 0.0) || !admissible(a0, a0, spec.tol)) {
    t.violation_r = 0.0;
    return t;
  }

  const std::vector<double> grid = radial_grid(spec.r_max, step);
  auto deriv = [&](double r, const RadialState& s) {
    return RadialState{s.dw, second_derivative(spec, r, s)};
  };
  double r = kSeedRadius;
  RadialState s{spec.w0 + 0.5 * d2w0 * r * r, d2w0 * r};
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = grid[k] - r;
    const RadialState k1 = deriv(r, s);
    const RadialState k2 =
        deriv(r + 0.5 * h, {s.w + 0.5 * h * k1.w, s.dw + 0.5 * h * k1.dw});
    const RadialState k3 =
        deriv(r + 0.5 * h, {s.w + 0.5 * h * k2.w, s.dw + 0.5 * h * k2.dw});
    const RadialState k4 = deriv(r + h, {s.w + h * k3.w, s.dw + h * k3.dw});
    s.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    s.dw += h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
    r = grid[k];

    const double a_t = -(s.dw / r + 0.5 * s.dw * s.dw);
    const double d2w = second_derivative(spec, r, s);
    const double a_r = radial_a_r(s.dw, d2w);
    if (!std::isfinite(s.w) || !std::isfinite(d2w) || !admissible(a_r, a_t, spec.tol)) {
      t.violation_r = r;
      return t;
    }
    t.profile.push_back(r, s.w, s.dw, d2w);
    t.f.push_back(rhs_value(spec, r, s.w));
  }
  return t;
}

}  // namespace detail

inline void validate(const SolveSpec& spec) {
  if (!spec.rhs) throw DomainError("solve_radial: rhs is not set");
  if (!(spec.r_max > 0.0) || !std::isfinite(spec.r_max))
    throw DomainError("solve_radial: r_max must be positive");
  if (!(spec.step > 0.0) || spec.step > spec.r_max)
    throw DomainError("solve_radial: step must lie in (0, r_max]");
  if (!(spec.tol >= 0.0)) throw DomainError("solve_radial: tol must be >= 0");
  if (!std::isfinite(spec.w0)) throw DomainError("solve_radial: w0 must be finite");
  if (spec.max_halvings < 0) throw DomainError("solve_radial: max_halvings < 0");
}

/// Integrates with `step`, estimates the error against step/2, and halves
/// until the estimate meets `accuracy` or the halvings run out. The profile
/// returned is the one at the accepted (coarser) step.
inline SolveResult solve_radial(const SolveSpec& spec) {
  validate(spec);
  double step = spec.step;
  detail::Trajectory coarse = detail::integrate(spec, step);
  SolveResult out;
  for (int halving = 0;; ++halving) {
    if (coarse.violation_r && *coarse.violation_r == 0.0) break;
    detail::Trajectory fine = detail::integrate(spec, 0.5 * step);
    const std::size_t common =
        std::min(coarse.profile.size(), (fine.profile.size() + 1) / 2);
    double diff = 0.0;
    for (std::size_t i = 0; i < common; ++i)
      diff = std::max(diff, std::abs(coarse.profile.w[i] - fine.profile.w[2 * i]));
    out.error_estimate = diff * 16.0 / 15.0;
    out.converged = out.error_estimate <= spec.accuracy;
    if (out.converged || halving >= spec.max_halvings) break;
    step *= 0.5;
    coarse = std::move(fine);
  }
  out.step = coarse.profile.size() > 1 ? coarse.profile.r[1] : step;
  out.violation_r = coarse.violation_r;
  out.admissible_up_to = coarse.violation_r && *coarse.violation_r == 0.0
                             ? 0.0
                             : coarse.profile.r_max();
  out.profile = std::move(coarse.profile);
  out.f = std::move(coarse.f);
  return out;
}

/// max over samples of |sigma_2(g0^{-1}A) - f| (background) or
/// |sigma_2(g^{-1}A) - K| (intrinsic).
inline double residual_norm(const RadialProfile& p,
                            const std::function<double(double)>& rhs,
                            EquationMode mode) {
  const RadialEigs e = radial_schouten_eigs(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s2 = radial_sigma2(e.a_r[i], e.a_t[i]);
    const double res = mode == EquationMode::background
                           ? s2 - rhs(p.r[i])
                           : s2 * std::exp(-4.0 * p.w[i]) - rhs(p.r[i]);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

/// sup |w - w_bubble| over the profile.
inline double bubble_deviation(const RadialProfile& p, const Bubble& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    worst = std::max(worst, std::abs(p.w[i] - b.w_r(p.r[i])));
  return worst;
}

}  // namespace s2lab
