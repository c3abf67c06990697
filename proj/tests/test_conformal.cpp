#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "s2lab/conformal.hpp"

using namespace s2lab;

namespace {

Point4 random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng)};
}

double max_error_in_ball(const ScalarField4& f, double target, double radius) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    if (f.grid.radius(i) <= radius)
      worst = std::max(worst, std::abs(f.samples[i] - target));
  return worst;
}

}  // namespace

TEST(Schouten, ConstantIsFlat) {
  const BallGrid4 g(1.0, 9);
  const auto s = schouten_of(ScalarField4(g, 0.7));
  for (const auto& a : s.A) EXPECT_LE(a.max_abs(), 1e-13);
}

TEST(Schouten, BubbleIsRoundAnalytically) {
  std::mt19937_64 rng(1);
  for (double lam : {0.5, 1.0, 2.0, 3.7}) {
    const Bubble b(lam);
    for (int n = 0; n < 200; ++n) {
      const Point4 x = random_point(rng, 2.0);
      const double e2w = std::exp(2.0 * b.w(x));
      EXPECT_LE(max_abs_diff(b.schouten(x), SymMat4::identity(0.5 * e2w)), 1e-13 * std::max(1.0, e2w));
    }
  }
}

TEST(Schouten, GridPathConvergesToAnalytic) {
  const Bubble b(1.0);
  auto err = [&](int n) {
    const BallGrid4 g(1.0, n);
    const auto fd = schouten_of(sample_field(g, [&](const Point4& x) { return b.w(x); }));
    const auto an = schouten_of(b, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.radius(i) <= 0.5) worst = std::max(worst, max_abs_diff(fd.A[i], an.A[i]));
    return worst;
  };
  const double ratio = err(13) / err(25);
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(Bubble, Examples) {
  const Bubble unit(1.0);
  EXPECT_DOUBLE_EQ(unit.exp_w({0, 0, 0, 0}), 2.0);
  EXPECT_NEAR(unit.exp_w({1, 0, 0, 0}), 1.0, 1e-15);
  EXPECT_NEAR(unit.exp_w({0.5, 0.5, 0.5, 0.5}), 1.0, 1e-15);
  for (double lam : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const Bubble b(lam);
    EXPECT_NEAR(std::exp(b.w_r(0.0)), 2.0 * lam, 1e-14 * lam);
    EXPECT_NEAR(std::exp(b.w_r(0.0) - b.w_r(1.0)), 1.0 + lam * lam, 1e-12 * (1 + lam * lam));
  }
  EXPECT_THROW(Bubble(0.0), DomainError);
  EXPECT_THROW(Bubble(-1.0), DomainError);
}

TEST(Bubble, DerivativesMatchFiniteDifferences) {
  const Bubble b(BubbleSpec{1.3, {0.2, -0.1, 0.0, 0.3}});
  const Point4 x = {0.4, 0.1, -0.5, 0.2};
  const double d = 1e-5;
  const Vec4 g = b.gradient(x);
  const SymMat4 h = b.hessian(x);
  for (int a = 0; a < 4; ++a) {
    Point4 xp = x, xm = x;
    xp[a] += d;
    xm[a] -= d;
    EXPECT_NEAR(g[a], (b.w(xp) - b.w(xm)) / (2 * d), 1e-9);
    const Vec4 gp = b.gradient(xp), gm = b.gradient(xm);
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(h(a, c), (gp[c] - gm[c]) / (2 * d), 1e-8);
  }
  for (double r : {0.1, 0.7, 1.9}) {
    EXPECT_NEAR(b.dw_r(r), (b.w_r(r + d) - b.w_r(r - d)) / (2 * d), 1e-9);
    EXPECT_NEAR(b.d2w_r(r), (b.dw_r(r + d) - b.dw_r(r - d)) / (2 * d), 1e-8);
  }
}

TEST(Bubble, TranslatedCenter) {
  const Point4 c = {0.3, -0.2, 0.5, 0.1};
  const Bubble centred(1.5), moved(BubbleSpec{1.5, c});
  const Point4 x = {0.1, 0.2, 0.3, 0.4};
  const Point4 y = {x[0] - c[0], x[1] - c[1], x[2] - c[2], x[3] - c[3]};
  EXPECT_NEAR(moved.w(x), centred.w(y), 1e-15);
  EXPECT_LE(max_abs_diff(moved.schouten(x), centred.schouten(y)), 1e-14);
}

TEST(Sigma2Fields, FlatIsZero) {
  const auto s = sigma2_fields(ScalarField4(BallGrid4(1.0, 9), 0.0));
  EXPECT_EQ(s.background.max_abs(), 0.0);
  EXPECT_EQ(s.intrinsic.max_abs(), 0.0);
}

TEST(Sigma2Fields, BubbleIntrinsicIsConstant) {
  for (double lam : {0.5, 1.0, 2.0}) {
    const Bubble b(BubbleSpec{lam, {0.1, 0.0, -0.2, 0.0}});
    const BallGrid4 g(2.0, 13);
    const auto s = sigma2_fields(b, g);
    EXPECT_LE(max_error_in_ball(s.intrinsic, 1.5, 1e9), 1e-10) << "lambda " << lam;
    for (std::size_t i = 0; i < g.size(); i += 97)
      EXPECT_NEAR(s.background.samples[i], 1.5 * std::exp(4.0 * b.w(g.point(i))),
                  1e-12 * std::max(1.0, s.background.samples[i]));
  }
}

TEST(Sigma2Fields, GridPathSecondOrder) {
  for (double lam : {0.5, 1.0, 2.0}) {
    const Bubble b(lam);
    const double L = 1.0 / lam;
    auto err = [&](int n) {
      const auto s = sigma2_fields(sample_field(BallGrid4(L, n), [&](const Point4& x) { return b.w(x); }));
      return max_error_in_ball(s.intrinsic, 1.5, 0.5 * L);
    };
    const double ratio = err(13) / err(25);
    EXPECT_GE(ratio, 3.5) << "lambda " << lam;
    EXPECT_LE(ratio, 4.5) << "lambda " << lam;
  }
}

TEST(Sigma2Fields, IntrinsicIsRescaledBackground) {
  // Random smooth admissible w: small perturbations of a bubble.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  const double c0 = u(rng), c1 = u(rng), c2 = u(rng);
  const Bubble b(1.0);
  auto w = [&](const Point4& x) {
    return b.w(x) + c0 * x[0] * x[1] + c1 * std::sin(x[2]) + c2 * x[3] * x[3];
  };
  const auto d = fd_derivatives(sample_field(BallGrid4(1.0, 13), w));
  const auto s = sigma2_fields(d);
  const auto a = schouten_of(d);
  for (std::size_t i = 0; i < a.A.size(); ++i) {
    EXPECT_TRUE(cone_membership(2, a.A[i]).interior());
    const double bg = elementary_symmetric(2, a.A[i]);
    EXPECT_NEAR(s.intrinsic.samples[i], std::exp(-4.0 * d.w.samples[i]) * bg, 1e-12);
  }
}

TEST(MTensor, Examples) {
  const BallGrid4 g(1.0, 9);
  const auto flat = m_tensor(ScalarField4(g, 2.0));
  EXPECT_LE(flat.max_discrepancy(), 1e-13);
  for (const auto& m : flat.from_newton.values) EXPECT_LE(m.max_abs(), 1e-13);

  const Vec4 bv = {0.3, -1.0, 0.5, 2.0};
  const auto lin = m_tensor(sample_field(g, [&](const Point4& x) { return dot(bv, x); }));
  const SymMat4 expect = -SymMat4::outer(bv);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_LE(max_abs_diff(lin.from_derivatives.values[i], expect), 1e-12);
    EXPECT_LE(max_abs_diff(lin.from_newton.values[i], expect), 1e-12);
  }
}

TEST(MTensor, RoutesAgreeAnalytically) {
  for (double lam : {0.5, 1.0, 2.0}) {
    const auto m = m_tensor(Bubble(lam), BallGrid4(2.0, 13));
    double scale = 0.0;
    for (const auto& v : m.from_derivatives.values) scale = std::max(scale, v.max_abs());
    EXPECT_LE(m.max_discrepancy(), 1e-12 * std::max(1.0, scale));
  }
}

TEST(MTensor, RoutesAgreeOnGrids) {
  // The identity is algebraic, so it holds for any derivative data.
  const Bubble b(1.0);
  const auto m = m_tensor(sample_field(BallGrid4(1.0, 13), [&](const Point4& x) { return b.w(x); }));
  EXPECT_LE(m.max_discrepancy(), 1e-11);
}

TEST(MTensor, RandomDerivativeData) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 500; ++n) {
    const Vec4 g = {u(rng), u(rng), u(rng), u(rng)};
    Eigen::Matrix4d h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = u(rng);
    const SymMat4 hs = SymMat4::from_dense(h);
    EXPECT_LE(max_abs_diff(m_from_newton(schouten_from_derivatives(g, hs), g),
                           m_from_derivatives(g, hs)),
              1e-12);
  }
}

TEST(Schouten, TraceMatchesScalarCurvature) {
  std::mt19937_64 rng(8);
  const Bubble b(BubbleSpec{0.8, {0.1, 0.1, 0.1, 0.1}});
  for (int n = 0; n < 100; ++n) {
    const SymMat4 a = b.schouten(random_point(rng, 1.5));
    const double r = ricci_from_schouten(a).trace();
    // Ricci trace in dimension four is 6 sigma_1.
    EXPECT_NEAR(r, scalar_curvature_from_schouten(a), 1e-12 * std::max(1.0, r));
    EXPECT_NEAR(elementary_symmetric(1, a), scalar_curvature_from_schouten(a) / 6.0, 1e-13);
  }
}

TEST(Bubble, AdmissibleEverywhere) {
  std::mt19937_64 rng(9);
  for (double lam : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const Bubble b(lam);
    for (int n = 0; n < 200; ++n)
      EXPECT_TRUE(cone_membership(2, b.schouten(random_point(rng, 1.5)), 0.0).interior());
  }
}

TEST(Radial, ConstantProfile) {
  RadialProfile p;
  for (double r : radial_grid(1.0, 0.1)) p.push_back(r, 0.3, 0.0, 0.0);
  const auto e = radial_schouten_eigs(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(e.a_r[i], 0.0);
    EXPECT_EQ(e.a_t[i], 0.0);
  }
}

TEST(Radial, BubbleEigenvalues) {
  for (double lam : {0.5, 1.0, 2.0}) {
    const Bubble b(lam);
    const auto p = b.profile(2.0, 1e-2);
    const auto e = radial_schouten_eigs(p);
    const auto s2 = radial_sigma2_background(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double half = 0.5 * std::exp(2.0 * p.w[i]);
      const double l2 = lam * lam, q = 1.0 + l2 * p.r[i] * p.r[i];
      EXPECT_NEAR(e.a_r[i], half, 1e-12 * std::max(1.0, half));
      EXPECT_NEAR(e.a_t[i], half, 1e-12 * std::max(1.0, half));
      EXPECT_NEAR(e.a_t[i], 2.0 * l2 / (q * q), 1e-12 * std::max(1.0, half));
      EXPECT_NEAR(s2[i], 1.5 * std::exp(4.0 * p.w[i]), 1e-11 * std::max(1.0, s2[i]));
    }
  }
  const Bubble unit(1.0);
  EXPECT_NEAR(radial_a_t(1.0, unit.dw_r(1.0), unit.d2w_r(1.0)), 0.5, 1e-15);
}

TEST(Radial, MatchesGridEigenvalues) {
  const Bubble b(1.2);
  const Point4 x = {0.3, -0.4, 0.2, 0.5};
  const double r = std::sqrt(norm2(x));
  const Spectrum s = eigenvalues(b.schouten(x));
  const double a_r = radial_a_r(b.dw_r(r), b.d2w_r(r));
  const double a_t = radial_a_t(r, b.dw_r(r), b.d2w_r(r));
  for (double v : s) EXPECT_NEAR(v, a_r, 1e-12);  // round: all four coincide
  EXPECT_NEAR(a_r, a_t, 1e-12);

  // A non-bubble radial function: w = -r^2/4 + r^4/40.
  const double dw = -0.5 * r + 0.1 * r * r * r, d2w = -0.5 + 0.3 * r * r;
  Vec4 g;
  for (int a = 0; a < 4; ++a) g[a] = dw * x[a] / r;
  SymMat4 h = SymMat4::identity(dw / r);
  Vec4 u;
  for (int a = 0; a < 4; ++a) u[a] = x[a] / r;
  h += (d2w - dw / r) * SymMat4::outer(u);
  const Spectrum e = eigenvalues(schouten_from_derivatives(g, h));
  const double ar = radial_a_r(dw, d2w), at = radial_a_t(r, dw, d2w);
  Spectrum expect = {ar, at, at, at};
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e[i], expect[i], 1e-12);
}

TEST(Radial, InvalidProfileGivesNaN) {
  RadialProfile p;
  p.push_back(0.0, 0.0, 0.5, 0.0);  // w'(0) != 0
  p.push_back(0.1, 0.0, 0.0, 0.0);
  const auto e = radial_schouten_eigs(p);
  EXPECT_TRUE(std::isnan(e.a_r[0]));
  EXPECT_TRUE(std::isnan(e.a_t[1]));
}

TEST(Radial, BubbleIsStrictlySuperharmonic) {
  // -Lap e^w = 2 e^{3w} for the bubble (R = 12, -6 Lap u = R u^3).
  for (double lam : {0.5, 1.0, 2.0}) {
    const Bubble b(lam);
    for (double r : {0.0, 0.3, 1.0, 1.8}) {
      const double w = b.w_r(r);
      const double lap = radial_laplacian_exp(r, w, b.dw_r(r), b.d2w_r(r));
      EXPECT_NEAR(-lap, 2.0 * std::exp(3.0 * w), 1e-12 * std::exp(3.0 * w));
    }
  }
}
