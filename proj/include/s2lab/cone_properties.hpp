/**
 * @brief Seeded random checks of the algebra of Gamma_2^+ in dimension 4.
 *
 * Spectra are drawn uniformly from [-1, 1]^4 and kept when they lie in the
 * open cone; each is rotated by a random orthogonal matrix before testing.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/QR>

#include "s2lab/symcone.hpp"

namespace s2lab {

inline constexpr double kNewtonIdentityTol = 1e-12;

struct ConePropertyReport {
  std::size_t samples = 0;
  std::size_t draws = 0;
  /// Ric = 2A + sigma_1 I not positive definite.
  std::size_t ricci_violations = 0;
  /// T_1(A) = sigma_1 I - A not positive definite.
  std::size_t newton_violations = 0;
  /// max over samples and j = 1..4 of |tr(T_{j-1}(A) A) - j sigma_j(A)|.
  double newton_identity_error = 0.0;

  bool pass() const {
    return ricci_violations == 0 && newton_violations == 0 &&
           newton_identity_error <= kNewtonIdentityTol;
  }
};

inline Spectrum random_gamma2_spectrum(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Spectrum s = {u(rng), u(rng), u(rng), u(rng)};
    if (cone_membership(2, s).interior()) return s;
  }
}

inline Eigen::Matrix4d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix4d g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = n(rng);
  Eigen::HouseholderQR<Eigen::Matrix4d> qr(g);
  return qr.householderQ();
}

inline ConePropertyReport cone_property_suite(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ConePropertyReport rep;
  rep.samples = samples;
  for (std::size_t n = 0; n < samples; ++n) {
    const Spectrum s = random_gamma2_spectrum(rng);
    const Eigen::Matrix4d q = random_rotation(rng);
    const Eigen::Vector4d d(s[0], s[1], s[2], s[3]);
    const SymMat4 a = SymMat4::from_dense(q * d.asDiagonal() * q.transpose());

    const Spectrum ric = eigenvalues(ricci_from_schouten(a));
    if (!(ric[0] > 0.0)) ++rep.ricci_violations;
    const Spectrum t1 = eigenvalues(newton_transform(1, a));
    if (!(t1[0] > 0.0)) ++rep.newton_violations;

    const Eigen::Matrix4d ad = a.dense();
    for (int j = 1; j <= 4; ++j) {
      const double lhs = (newton_transform(j - 1, a).dense() * ad).trace();
      const double err = std::abs(lhs - j * elementary_symmetric(j, a));
      rep.newton_identity_error = std::max(rep.newton_identity_error, err);
    }
  }
  return rep;
}

}  // namespace s2lab
