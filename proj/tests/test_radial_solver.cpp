#include <gtest/gtest.h>

#include <cmath>

#include "s2lab/radial_solver.hpp"

using namespace s2lab;

namespace {

SolveSpec bubble_spec(double lambda, EquationMode mode = EquationMode::intrinsic) {
  SolveSpec s;
  s.mode = mode;
  s.w0 = std::log(2.0 * lambda);
  if (mode == EquationMode::intrinsic) {
    s.rhs = [](double) { return 1.5; };
  } else {
    const Bubble b(lambda);
    s.rhs = [b](double r) { return 1.5 * std::exp(4.0 * b.w_r(r)); };
  }
  return s;
}

double fixed_step_error(double lambda, double step) {
  SolveSpec s = bubble_spec(lambda);
  s.step = step;
  s.max_halvings = 0;
  return bubble_deviation(solve_radial(s).profile, Bubble(lambda));
}

}  // namespace

TEST(SolveRadial, RecoversBubbleIntrinsic) {
  for (double lam : {0.5, 1.0, 2.0}) {
    const auto res = solve_radial(bubble_spec(lam));
    EXPECT_FALSE(res.violation_r.has_value());
    EXPECT_TRUE(res.converged);
    EXPECT_DOUBLE_EQ(res.admissible_up_to, 2.0);
    EXPECT_NEAR(res.step, 1e-3, 1e-15);
    EXPECT_LE(bubble_deviation(res.profile, Bubble(lam)), 1e-6) << "lambda " << lam;
    EXPECT_TRUE(res.profile.valid());
    EXPECT_EQ(res.f.size(), res.profile.size());
  }
}

TEST(SolveRadial, RecoversBubbleBackground) {
  const auto res = solve_radial(bubble_spec(0.5, EquationMode::background));
  EXPECT_FALSE(res.violation_r.has_value());
  EXPECT_LE(bubble_deviation(res.profile, Bubble(0.5)), 1e-6);
}

TEST(SolveRadial, FourthOrderStepHalving) {
  for (double lam : {0.5, 1.0, 2.0}) {
    const double ratio = fixed_step_error(lam, 1e-3) / fixed_step_error(lam, 5e-4);
    EXPECT_GE(ratio, 8.0) << "lambda " << lam;
  }
  // Coarser steps sit well clear of round-off.
  const double coarse = fixed_step_error(2.0, 0.02) / fixed_step_error(2.0, 0.01);
  EXPECT_NEAR(coarse, 16.0, 2.0);
}

TEST(SolveRadial, ZeroRhsViolatesAtOrigin) {
  SolveSpec s;
  s.mode = EquationMode::background;
  s.rhs = [](double) { return 0.0; };
  const auto res = solve_radial(s);
  ASSERT_TRUE(res.violation_r.has_value());
  EXPECT_EQ(*res.violation_r, 0.0);
  EXPECT_EQ(res.admissible_up_to, 0.0);
}

TEST(SolveRadial, ReportsLossOfAdmissibility) {
  // Curvature that switches off at r = 1: sigma_2 cannot stay positive.
  SolveSpec s;
  s.rhs = [](double r) { return r < 1.0 ? 1.5 * (1.0 - r * r) : 0.0; };
  s.w0 = std::log(2.0);
  const auto res = solve_radial(s);
  ASSERT_TRUE(res.violation_r.has_value());
  EXPECT_GT(*res.violation_r, 0.5);
  EXPECT_LE(*res.violation_r, 1.0 + 1e-2);
  EXPECT_LE(res.admissible_up_to, *res.violation_r);
  EXPECT_LT(res.admissible_up_to, s.r_max);
  // the accepted part still solves the equation
  EXPECT_LE(residual_norm(res.profile, s.rhs, s.mode), 10.0 * s.tol);
}

TEST(SolveRadial, AdmissibleAtEveryAcceptedStep) {
  SolveSpec s = bubble_spec(1.0);
  s.rhs = [](double r) { return 1.5 * (1.0 + 0.1 * r * r); };
  const auto res = solve_radial(s);
  ASSERT_FALSE(res.violation_r.has_value());
  const auto e = radial_schouten_eigs(res.profile);
  for (std::size_t i = 0; i < res.profile.size(); ++i) {
    const double t = e.a_t[i];
    EXPECT_TRUE(cone_membership(2, Spectrum{e.a_r[i], t, t, t}, s.tol).interior());
  }
}

TEST(SolveRadial, ResidualWithinTolerance) {
  for (double lam : {0.5, 1.0}) {
    SolveSpec s = bubble_spec(lam);
    s.rhs = [](double r) { return 1.5 * (1.0 + 0.2 * std::sin(2.0 * r)); };
    const auto res = solve_radial(s);
    ASSERT_FALSE(res.violation_r.has_value());
    EXPECT_LE(residual_norm(res.profile, s.rhs, s.mode), 10.0 * s.tol);
  }
  SolveSpec bg = bubble_spec(1.0, EquationMode::background);
  const auto res = solve_radial(bg);
  EXPECT_LE(residual_norm(res.profile, bg.rhs, bg.mode), 10.0 * bg.tol);
}

TEST(SolveRadial, SuperharmonicWhereAdmissible) {
  SolveSpec s = bubble_spec(1.0);
  s.rhs = [](double r) { return 1.5 * std::exp(-0.1 * r * r); };
  const auto res = solve_radial(s);
  const auto& p = res.profile;
  for (std::size_t i = 0; i < p.size(); ++i)
    EXPECT_LT(radial_laplacian_exp(p.r[i], p.w[i], p.dw[i], p.d2w[i]), 0.0);
}

TEST(SolveRadial, HalvesUntilAccurate) {
  SolveSpec s = bubble_spec(2.0);
  s.step = 0.05;
  s.accuracy = 1e-7;
  s.max_halvings = 6;
  const auto res = solve_radial(s);
  EXPECT_TRUE(res.converged);
  EXPECT_LT(res.step, 0.05);
  EXPECT_LE(res.error_estimate, 1e-7);

  s.accuracy = 1e-30;
  s.max_halvings = 1;
  const auto capped = solve_radial(s);
  EXPECT_FALSE(capped.converged);
  EXPECT_NEAR(capped.step, 0.025, 1e-15);
}

TEST(SolveRadial, ValidatesSpec) {
  SolveSpec s;
  EXPECT_THROW(solve_radial(s), DomainError);  // no rhs
  s.rhs = [](double) { return 1.5; };
  s.step = 0.0;
  EXPECT_THROW(solve_radial(s), DomainError);
  s.step = 3.0;
  EXPECT_THROW(solve_radial(s), DomainError);
  s.step = 1e-3;
  s.r_max = -1.0;
  EXPECT_THROW(solve_radial(s), DomainError);
  s.r_max = 2.0;
  s.tol = -1.0;
  EXPECT_THROW(solve_radial(s), DomainError);
  s.tol = 1e-8;
  s.w0 = std::nan("");
  EXPECT_THROW(solve_radial(s), DomainError);
  s.w0 = 0.0;
  s.max_halvings = -1;
  EXPECT_THROW(solve_radial(s), DomainError);
}

TEST(ResidualNorm, Examples) {
  const Bubble b(1.0);
  RadialProfile p = b.profile(2.0, 1e-2);
  EXPECT_LE(residual_norm(p, [](double) { return 1.5; }, EquationMode::intrinsic), 1e-10);
  EXPECT_NEAR(residual_norm(p, [](double) { return 1.0; }, EquationMode::intrinsic), 0.5, 1e-10);

  RadialProfile flat;
  for (double r : radial_grid(1.0, 0.1)) flat.push_back(r, 0.4, 0.0, 0.0);
  EXPECT_EQ(residual_norm(flat, [](double) { return 0.0; }, EquationMode::background), 0.0);
}

TEST(EquationMode, Names) {
  EXPECT_STREQ(to_string(EquationMode::intrinsic), "eq1");
  EXPECT_STREQ(to_string(EquationMode::background), "eq2");
}
