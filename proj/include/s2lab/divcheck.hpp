/**
 * @brief Numerical checks of the divergence structure of sigma_k.
 *
 * Background form:  2 sigma_2(g0^{-1} A) = -d_a (M^a_b d^b w).
 * Intrinsic form (n = 4, k = 1, 2):
 *   k sigma_k(g^{-1}A) - (4 - 2k) sum_j sigma_{k-j}(g^{-1}A) |dw|_g^{2j} / 2^j
 *     = -div_g X,
 *   X^a = [sum_j T_{k-j}(g^{-1}A)^a_b |dw|_g^{2(j-1)} / 2^{j-1}] grad_g^b w,
 * with div_g X = e^{-4w} d_a(e^{4w} X^a).
 *
 * Both sides are assembled independently from grid samples of w and
 * compared over a ball; a ladder of grids yields an observed order.
 */
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "s2lab/conformal.hpp"
#include "s2lab/fields.hpp"
#include "s2lab/symcone.hpp"

namespace s2lab {

using ScalarFunction4 = std::function<double(const Point4&)>;

/// Required distance (in cells of the coarsest grid) between the check ball
/// and the box faces.
inline constexpr int kDivcheckMarginCells = 3;
/// Discrepancies at or below this count as exact agreement.
inline constexpr double kExactDiscrepancy = 1e-12;
inline constexpr double kMinObservedOrder = 1.8;
inline constexpr double kModelSlack = 10.0;

enum class DivergenceForm { background, intrinsic_sigma1, intrinsic_sigma2 };

inline const char* to_string(DivergenceForm f) {
  switch (f) {
    case DivergenceForm::background:
      return "background";
    case DivergenceForm::intrinsic_sigma1:
      return "intrinsic-k1";
    case DivergenceForm::intrinsic_sigma2:
      return "intrinsic-k2";
  }
  return "?";
}

struct ConvergenceReport {
  std::string label;
  std::vector<int> points_per_axis;
  std::vector<double> h_ladder;
  std::vector<double> max_abs_discrepancy;
  /// Least-squares slope of log(discrepancy) against log(h); NaN when the
  /// ladder agrees exactly.
  double observed_order = std::numeric_limits<double>::quiet_NaN();
  /// Finest-grid discrepancy predicted by the fixed-slope C h^2 fit.
  double model_finest = std::numeric_limits<double>::quiet_NaN();
  bool exact = false;
  bool pass = false;

  /// Order between consecutive rungs i-1 and i.
  double local_order(std::size_t i) const {
    if (i == 0 || i >= h_ladder.size()) return std::numeric_limits<double>::quiet_NaN();
    return std::log(max_abs_discrepancy[i - 1] / max_abs_discrepancy[i]) /
           std::log(h_ladder[i - 1] / h_ladder[i]);
  }
};

/// Pair of sides compared by a single-grid check.
struct DivergenceSides {
  ScalarField4 lhs;
  ScalarField4 rhs;
};

/// 2 sigma_2(g0^{-1}A) against -d_a(M^a_b d^b w).
inline DivergenceSides background_divergence_sides(const DerivativeField& d) {
  const BallGrid4& grid = d.w.grid;
  DivergenceSides s{ScalarField4(grid), ScalarField4(grid)};
  VectorField4 flux(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec4 g = d.grad.at(i);
    const SymMat4 a = schouten_from_derivatives(g, d.hess.values[i]);
    s.lhs.samples[i] = 2.0 * elementary_symmetric(2, a);
    flux.set(i, m_from_newton(a, g).apply(g));
  }
  const ScalarField4 div = fd_divergence(flux);
  for (std::size_t i = 0; i < grid.size(); ++i) s.rhs.samples[i] = -div.samples[i];
  return s;
}

/// Intrinsic form for k in {1, 2}, norms and index raising with g.
inline DivergenceSides intrinsic_divergence_sides(const DerivativeField& d, int k) {
  if (k != 1 && k != 2)
    throw DomainError("intrinsic divergence: k must be 1 or 2");
  const BallGrid4& grid = d.w.grid;
  constexpr int n = 4;
  DivergenceSides s{ScalarField4(grid), ScalarField4(grid)};
  VectorField4 weighted(grid);  // e^{4w} X
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = d.w.samples[i];
    const double e2 = std::exp(-2.0 * w);
    const Vec4 g = d.grad.at(i);
    const SymMat4 b = e2 * schouten_from_derivatives(g, d.hess.values[i]);
    const auto sigma = elementary_symmetric_all(eigenvalues(b));
    const double norm_g2 = e2 * norm2(g);  // |dw|_g^2
    const Vec4 raised = {e2 * g[0], e2 * g[1], e2 * g[2], e2 * g[3]};

    SymMat4 coeff;
    double extra = 0.0;
    for (int j = 1; j <= k; ++j) {
      coeff += std::pow(norm_g2, j - 1) / std::pow(2.0, j - 1) *
               newton_transform(k - j, b);
      extra += sigma[k - j] / std::pow(2.0, j) * std::pow(norm_g2, j);
    }
    s.lhs.samples[i] = k * sigma[k] - (n - 2 * k) * extra;

    const Vec4 x = coeff.apply(raised);
    const double vol = std::exp(4.0 * w);
    weighted.set(i, {vol * x[0], vol * x[1], vol * x[2], vol * x[3]});
  }
  const ScalarField4 div = fd_divergence(weighted);
  for (std::size_t i = 0; i < grid.size(); ++i)
    s.rhs.samples[i] = -std::exp(-4.0 * d.w.samples[i]) * div.samples[i];
  return s;
}

inline DivergenceSides divergence_sides(const DerivativeField& d, DivergenceForm form) {
  switch (form) {
    case DivergenceForm::background:
      return background_divergence_sides(d);
    case DivergenceForm::intrinsic_sigma1:
      return intrinsic_divergence_sides(d, 1);
    case DivergenceForm::intrinsic_sigma2:
      return intrinsic_divergence_sides(d, 2);
  }
  throw DomainError("divergence_sides: unknown form");
}

/// max |lhs - rhs| over grid points in the closed ball B_R.
inline double max_discrepancy(const DivergenceSides& s, double radius) {
  ScalarField4 diff(s.lhs.grid);
  for (std::size_t i = 0; i < diff.samples.size(); ++i)
    diff.samples[i] = s.lhs.samples[i] - s.rhs.samples[i];
  return ball_max_abs(diff, radius);
}

inline void check_margin(const BallGrid4& grid, double r_check) {
  if (!(r_check > 0.0) ||
      r_check + kDivcheckMarginCells * grid.spacing() > grid.half_width() + 1e-12)
    throw DomainError("divcheck: R_check must lie " +
                      std::to_string(kDivcheckMarginCells) +
                      " cells inside the grid box");
}

/// Fills observed order, fixed-slope model and the pass flag.
inline void finalize_report(ConvergenceReport& rep) {
  const auto& e = rep.max_abs_discrepancy;
  const auto& h = rep.h_ladder;
  for (std::size_t i = 1; i < h.size(); ++i)
    if (!(h[i] < h[i - 1]))
      throw DomainError("convergence ladder must have strictly decreasing h");
  const double worst = e.empty() ? 0.0 : *std::max_element(e.begin(), e.end());
  rep.exact = worst <= kExactDiscrepancy;
  if (rep.exact || h.size() < 2) {
    rep.pass = rep.exact;
    return;
  }
  for (double v : e)
    if (!(v > 0.0)) {
      rep.pass = false;
      return;
    }
  const std::size_t m = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, shift = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    shift += y - 2.0 * x;
  }
  rep.observed_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.model_finest = std::exp(shift / m) * h.back() * h.back();
  rep.pass = rep.observed_order >= kMinObservedOrder &&
             e.back() <= kModelSlack * rep.model_finest;
}

/// Produces w with its first and second derivatives on a given grid.
using DerivativeSource = std::function<DerivativeField(const BallGrid4&)>;

/// Grid samples of w; derivatives by finite differences.
inline DerivativeSource sampled_source(ScalarFunction4 w) {
  return [w = std::move(w)](const BallGrid4& grid) {
    return fd_derivatives(sample_field(grid, w));
  };
}

/// Closed-form bubble derivatives; only the divergence is discretised.
inline DerivativeSource bubble_source(const Bubble& b) {
  return [b](const BallGrid4& grid) { return analytic_derivatives(b, grid); };
}

/// Runs one divergence form over a ladder of grids on [-L, L]^4.
inline ConvergenceReport divergence_ladder(const DerivativeSource& source,
                                           std::span<const int> points_per_axis,
                                           double half_width, double r_check,
                                           DivergenceForm form) {
  std::vector<BallGrid4> grids;
  for (int n : points_per_axis) grids.emplace_back(half_width, n);
  for (const auto& g : grids) check_margin(g, r_check);

  ConvergenceReport rep;
  rep.label = to_string(form);
  for (const auto& grid : grids) {
    const DerivativeField d = source(grid);
    rep.points_per_axis.push_back(grid.points_per_axis());
    rep.h_ladder.push_back(grid.spacing());
    rep.max_abs_discrepancy.push_back(max_discrepancy(divergence_sides(d, form), r_check));
  }
  finalize_report(rep);
  return rep;
}

inline ConvergenceReport check_background_divergence(
    const DerivativeSource& w, std::span<const int> points_per_axis,
    double half_width, double r_check) {
  return divergence_ladder(w, points_per_axis, half_width, r_check,
                           DivergenceForm::background);
}

/// k = 2 by default; k = 1 checks the sigma_1 form.
inline ConvergenceReport check_intrinsic_divergence(
    const DerivativeSource& w, std::span<const int> points_per_axis,
    double half_width, double r_check, int k = 2) {
  if (k != 1 && k != 2)
    throw DomainError("check_intrinsic_divergence: k must be 1 or 2");
  return divergence_ladder(w, points_per_axis, half_width, r_check,
                           k == 1 ? DivergenceForm::intrinsic_sigma1
                                  : DivergenceForm::intrinsic_sigma2);
}

/// Cutoff-weighted sides: sum eta 2 sigma_2 and sum D(eta) . M grad(w), with
/// D the grid difference operator. Central differences are skew, so for eta
/// supported inside the box the two differ by sum eta (lhs - rhs) of the
/// background check, i.e. O(h^2).
struct GreenPair {
  double weighted_sigma2;
  double weighted_flux;
};

inline GreenPair green_identity_pair(const DerivativeField& d, const Cutoff& eta) {
  const BallGrid4& grid = d.w.grid;
  if (eta.r_outer() + 2.0 * grid.spacing() > grid.half_width())
    throw DomainError("green_identity_pair: cutoff support leaves the box");
  const double h = grid.spacing();
  const double cell = h * h * h * h;
  const ScalarField4 eta_s = eta.sample(grid);
  const VectorField4 deta = fd_gradient(eta_s);
  GreenPair p{0.0, 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = eta_s.samples[i];
    const Vec4 de = deta.at(i);
    if (e == 0.0 && de == Vec4{}) continue;
    const Vec4 g = d.grad.at(i);
    const SymMat4 a = schouten_from_derivatives(g, d.hess.values[i]);
    p.weighted_sigma2 += e * 2.0 * elementary_symmetric(2, a) * cell;
    p.weighted_flux += dot(de, m_from_newton(a, g).apply(g)) * cell;
  }
  return p;
}

}  // namespace s2lab
