#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "s2lab/cone_properties.hpp"
#include "s2lab/symcone.hpp"

using namespace s2lab;

namespace {

SymMat4 random_symmetric(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = u(rng);
  return SymMat4::from_dense(m);
}

}  // namespace

TEST(ElementarySymmetric, Examples) {
  EXPECT_DOUBLE_EQ(elementary_symmetric(1, Spectrum{1, 1, 1, 1}), 4.0);
  EXPECT_DOUBLE_EQ(elementary_symmetric(2, Spectrum{0.5, 0.5, 0.5, 0.5}), 1.5);
  EXPECT_DOUBLE_EQ(elementary_symmetric(2, Spectrum{1, 2, 3, 4}), 35.0);
  EXPECT_DOUBLE_EQ(elementary_symmetric(3, Spectrum{1, 2, 3, 4}), 50.0);
  EXPECT_DOUBLE_EQ(elementary_symmetric(4, Spectrum{1, 2, 3, 4}), 24.0);
  EXPECT_DOUBLE_EQ(elementary_symmetric(0, Spectrum{7, -3, 2, 9}), 1.0);
}

TEST(ElementarySymmetric, RejectsOutOfRangeOrder) {
  EXPECT_THROW(elementary_symmetric(-1, Spectrum{}), DomainError);
  EXPECT_THROW(elementary_symmetric(5, Spectrum{}), DomainError);
}

TEST(ElementarySymmetric, AllMatchesSingle) {
  const Spectrum s = {0.3, -1.2, 2.5, 0.7};
  const auto all = elementary_symmetric_all(s);
  for (int k = 0; k <= 4; ++k) EXPECT_DOUBLE_EQ(all[k], elementary_symmetric(k, s));
}

TEST(ElementarySymmetric, MatrixUsesSpectrum) {
  std::mt19937_64 rng(11);
  const SymMat4 a = random_symmetric(rng);
  const Eigen::Matrix4d d = a.dense();
  EXPECT_NEAR(elementary_symmetric(1, a), d.trace(), 1e-13);
  EXPECT_NEAR(elementary_symmetric(4, a), d.determinant(), 1e-12);
  EXPECT_NEAR(elementary_symmetric(2, a), 0.5 * (d.trace() * d.trace() - (d * d).trace()), 1e-12);
}

TEST(SymMat4, DenseRoundTripAndIndexing) {
  Eigen::Matrix4d m;
  m << 1, 2, 3, 4, 2, 5, 6, 7, 3, 6, 8, 9, 4, 7, 9, 10;
  const SymMat4 a = SymMat4::from_dense(m);
  EXPECT_EQ(a.dense(), m);
  EXPECT_DOUBLE_EQ(a(1, 3), 7.0);
  EXPECT_DOUBLE_EQ(a(3, 1), 7.0);
  EXPECT_DOUBLE_EQ(a.trace(), 24.0);
  EXPECT_TRUE(a.is_finite());
}

TEST(SymMat4, FromDenseSymmetrizes) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 1) = 2.0;
  const SymMat4 a = SymMat4::from_dense(m);
  EXPECT_DOUBLE_EQ(a(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(a(1, 0), 1.0);
}

TEST(SymMat4, OuterAndApply) {
  const Vec4 v = {1, 2, 0, -1};
  const SymMat4 o = SymMat4::outer(v);
  const Vec4 y = o.apply(v);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(y[i], 6.0 * v[i]);
}

TEST(NewtonTransform, Examples) {
  std::mt19937_64 rng(3);
  const SymMat4 any = random_symmetric(rng);
  EXPECT_EQ(max_abs_diff(newton_transform(0, any), SymMat4::identity()), 0.0);
  EXPECT_LE(max_abs_diff(newton_transform(1, SymMat4::identity()), SymMat4::identity(3.0)), 1e-15);
  EXPECT_LE(max_abs_diff(newton_transform(1, SymMat4::diagonal({1, 2, 3, 4})),
                         SymMat4::diagonal({9, 8, 7, 6})),
            1e-13);
}

TEST(NewtonTransform, RejectsOutOfRangeOrder) {
  EXPECT_THROW(newton_transform(-1, SymMat4::identity()), DomainError);
  EXPECT_THROW(newton_transform(4, SymMat4::identity()), DomainError);
}

TEST(NewtonTransform, T4IsCayleyHamiltonZero) {
  // T_3(A) A = sigma_4 I, the Cayley-Hamilton relation.
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    const SymMat4 a = random_symmetric(rng);
    const Eigen::Matrix4d lhs = newton_transform(3, a).dense() * a.dense();
    const Eigen::Matrix4d rhs = elementary_symmetric(4, a) * Eigen::Matrix4d::Identity();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ConeMembership, Examples) {
  const auto sphere = cone_membership(2, Spectrum{0.5, 0.5, 0.5, 0.5}, 1e-12);
  EXPECT_EQ(sphere.tag, ConeStatus::Tag::interior);

  const auto traceless = cone_membership(2, Spectrum{1, -1, 1, -1});
  EXPECT_EQ(traceless.tag, ConeStatus::Tag::outside);
  EXPECT_DOUBLE_EQ(traceless.margins[0], 0.0);

  const auto tilted = cone_membership(2, Spectrum{1, 1, 1, -0.1});
  EXPECT_EQ(tilted.tag, ConeStatus::Tag::interior);
  ASSERT_EQ(tilted.margins.size(), 2u);
  EXPECT_NEAR(tilted.margins[0], 2.9, 1e-15);
  EXPECT_NEAR(tilted.margins[1], 2.7, 1e-15);
}

TEST(ConeMembership, BoundaryBand) {
  EXPECT_EQ(cone_membership(2, Spectrum{1, 0, 0, 0}).tag, ConeStatus::Tag::boundary);
  EXPECT_EQ(cone_membership(1, Spectrum{1, -1, 0, 0}).tag, ConeStatus::Tag::boundary);
  EXPECT_EQ(cone_membership(1, Spectrum{1, -1, 0, 1e-11}).tag, ConeStatus::Tag::boundary);
  EXPECT_EQ(cone_membership(1, Spectrum{1, -1, 0, 1e-9}).tag, ConeStatus::Tag::interior);
  EXPECT_EQ(cone_membership(1, Spectrum{1, -1, 0, -1e-9}).tag, ConeStatus::Tag::outside);
  EXPECT_STREQ(to_string(ConeStatus::Tag::boundary), "boundary");
}

TEST(ConeMembership, Errors) {
  EXPECT_THROW(cone_membership(0, Spectrum{1, 1, 1, 1}), DomainError);
  EXPECT_THROW(cone_membership(5, Spectrum{1, 1, 1, 1}), DomainError);
  EXPECT_THROW(cone_membership(2, Spectrum{1, 1, 1, 1}, -1.0), DomainError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(cone_membership(2, Spectrum{1, nan, 1, 1}), DomainError);
  SymMat4 bad = SymMat4::identity();
  bad.set(0, 2, std::numeric_limits<double>::infinity());
  EXPECT_THROW(cone_membership(2, bad), DomainError);
}

TEST(Ricci, Examples) {
  EXPECT_EQ(ricci_from_schouten(SymMat4{}).max_abs(), 0.0);
  const SymMat4 half = SymMat4::identity(0.5);
  EXPECT_LE(max_abs_diff(ricci_from_schouten(half), SymMat4::identity(3.0)), 1e-15);
  EXPECT_DOUBLE_EQ(scalar_curvature_from_schouten(half), 12.0);

  const Spectrum ric = eigenvalues(ricci_from_schouten(SymMat4::diagonal({1, 1, 1, -0.1})));
  EXPECT_NEAR(ric[0], 2.7, 1e-13);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(ric[i], 4.9, 1e-13);
}

TEST(Eigenvalues, ClosedFormMatchesIterative) {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 2000; ++n) {
    const SymMat4 a = random_symmetric(rng, n % 2 ? 1.0 : 100.0);
    const Spectrum x = eigenvalues(a), y = detail::iterative_eigenvalues(a);
    const double scale = std::max(1.0, a.max_abs());
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(x[i], y[i], 1e-12 * scale);
  }
}

TEST(Eigenvalues, DegenerateAndClustered) {
  const Spectrum s = eigenvalues(SymMat4::identity(0.5));
  for (double v : s) EXPECT_DOUBLE_EQ(v, 0.5);
  const Spectrum z = eigenvalues(SymMat4{});
  for (double v : z) EXPECT_EQ(v, 0.0);

  std::mt19937_64 rng(23);
  for (int n = 0; n < 200; ++n) {
    const Eigen::Matrix4d q = random_rotation(rng);
    const Eigen::Vector4d d(1.0, 1.0 + 1e-9, 2.0, 2.0 - 1e-8);
    const SymMat4 a = SymMat4::from_dense(q * d.asDiagonal() * q.transpose());
    const Spectrum e = eigenvalues(a);
    EXPECT_NEAR(e[0], 1.0, 1e-13);
    EXPECT_NEAR(e[1], 1.0 + 1e-9, 1e-13);
    EXPECT_NEAR(e[2], 2.0 - 1e-8, 1e-13);
    EXPECT_NEAR(e[3], 2.0, 1e-13);
  }
}

TEST(Eigenvalues, SortedAscending) {
  const Spectrum e = eigenvalues(SymMat4::diagonal({3, -1, 2, 0}));
  EXPECT_DOUBLE_EQ(e[0], -1.0);
  EXPECT_DOUBLE_EQ(e[3], 3.0);
}

// Properties over seeded random matrices.

TEST(SymconeProperty, Homogeneity) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> c(0.1, 5.0);
  for (int n = 0; n < 1000; ++n) {
    const SymMat4 a = random_symmetric(rng);
    const double s = c(rng);
    const SymMat4 sa = s * a;
    for (int k = 0; k <= 4; ++k) {
      const double expect = std::pow(s, k) * elementary_symmetric(k, a);
      EXPECT_NEAR(elementary_symmetric(k, sa), expect, 1e-11 * std::max(1.0, std::abs(expect)))
          << "k=" << k;
    }
  }
}

TEST(SymconeProperty, NewtonIdentityOnRandomMatrices) {
  std::mt19937_64 rng(202);
  for (int n = 0; n < 1000; ++n) {
    const SymMat4 a = random_symmetric(rng);
    const Eigen::Matrix4d d = a.dense();
    for (int j = 1; j <= 4; ++j) {
      const double lhs = (newton_transform(j - 1, a).dense() * d).trace();
      EXPECT_NEAR(lhs, j * elementary_symmetric(j, a), 1e-12);
    }
  }
}

TEST(SymconeProperty, ConeNesting) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int interior_hits[5] = {};
  for (int n = 0; n < 20000; ++n) {
    const Spectrum s = {u(rng), u(rng), u(rng), u(rng)};
    for (int k = 2; k <= 4; ++k)
      if (cone_membership(k, s).interior()) {
        ++interior_hits[k];
        EXPECT_TRUE(cone_membership(k - 1, s).interior());
      }
  }
  EXPECT_GT(interior_hits[4], 0);
}

TEST(SymconeProperty, RicciAndT1PositiveOnGamma2) {
  const auto rep = cone_property_suite(20000, 404);
  EXPECT_EQ(rep.ricci_violations, 0u);
  EXPECT_EQ(rep.newton_violations, 0u);
  EXPECT_LE(rep.newton_identity_error, kNewtonIdentityTol);
  EXPECT_TRUE(rep.pass());
}

TEST(SymconeProperty, SuiteIsSeedDeterministic) {
  const auto a = cone_property_suite(500, 9);
  const auto b = cone_property_suite(500, 9);
  EXPECT_EQ(a.newton_identity_error, b.newton_identity_error);
}
