#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "randwave/errors.hpp"
#include "randwave/kernels.hpp"
#include "randwave/quadrature.hpp"

using namespace randwave;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(SO3, AlphaClosedFormMatchesQuadrature) {
  for (int l = 0; l <= 30; ++l) EXPECT_NEAR(kernels::so3_alpha(l), kernels::so3_alpha_quadrature(l), 1e-12) << l;
  EXPECT_NEAR(kernels::so3_alpha(0), kPi / 2.0 + 2.0 / kPi, 1e-15);
  EXPECT_NEAR(kernels::so3_alpha(2), 2.0 / (9.0 * kPi), 1e-15);
  EXPECT_THROW(kernels::so3_alpha(-1), ConfigError);
}

TEST(SO3, VerdictHasWitnessTwo) {
  const auto v = kernels::character_verdict(kernels::Space::so3, 20);
  EXPECT_FALSE(v.restricted_negative_definite);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(*v.witness, 2);
  EXPECT_LT(v.alpha[1], 0.0);
}

TEST(SO3, HaarLaws) {
  // Trace density is the pushforward of the angle density under y = 1 + 2 cos t.
  for (double t : {0.3, 1.0, 2.0, 3.0}) {
    const double y = 1.0 + 2.0 * std::cos(t);
    EXPECT_NEAR(kernels::trace_density(y), kernels::rotation_angle_density(t) / (2.0 * std::sin(t)), 1e-13);
  }
  EXPECT_EQ(kernels::trace_density(3.5), 0.0);
  EXPECT_NEAR(quad::integrate_composite(kernels::rotation_angle_density, 0.0, kPi, 4, 16), 1.0, 1e-14);
  for (double u : {1e-9, 0.01, 0.3, 0.77, 1.0}) {
    EXPECT_NEAR(kernels::rotation_angle_cdf(kernels::rotation_angle_quantile(u)), u, 1e-13);
  }
}

TEST(SO3, RandomRotationsAreHaar) {
  const auto rs = kernels::random_rotations(4000, 17);
  double tr = 0.0;
  for (const auto& g : rs) {
    // Orthogonality and determinant one.
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += g[static_cast<std::size_t>(3 * i + k)] * g[static_cast<std::size_t>(3 * j + k)];
        EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
      }
    }
    const double det = g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
                       g[2] * (g[3] * g[7] - g[4] * g[6]);
    EXPECT_NEAR(det, 1.0, 1e-12);
    tr += g[0] + g[4] + g[8];
  }
  // E tr = 0 and Var tr = 1 under Haar measure.
  EXPECT_NEAR(tr / 4000.0, 0.0, 5.0 / std::sqrt(4000.0));
  EXPECT_NEAR(kernels::rotation_distance(rs[0], rs[0]), 0.0, 1e-6);
}

TEST(SU2, AlphaClosedForm) {
  for (int l = 1; l <= 25; ++l) {
    const double expect = l % 2 == 0 ? 0.0 : -(4.0 / kPi) * (l + 1.0) / (double(l) * l * (l + 2.0) * (l + 2.0));
    EXPECT_NEAR(kernels::su2_alpha(l), expect, 1e-15) << l;
    EXPECT_NEAR(kernels::su2_alpha(l), kernels::su2_alpha_quadrature(l), 1e-12) << l;
  }
  const auto v = kernels::character_verdict(kernels::Space::su2, 50);
  EXPECT_TRUE(v.restricted_negative_definite);
  EXPECT_FALSE(v.witness.has_value());
}

TEST(S2, ArccosCoefficientsMatchQuadrature) {
  for (int l = 1; l <= 21; ++l) {
    const double ref = quad::integrate_composite(
        [l](double t) { return std::asin(t) * std::legendre(static_cast<unsigned>(l), t); }, -1.0, 1.0, 64, 16);
    EXPECT_NEAR(kernels::arccos_legendre_coeff(l), ref, 1e-6) << l;
  }
  const auto v = kernels::character_verdict(kernels::Space::s2, 40);
  EXPECT_TRUE(v.restricted_negative_definite);
}

TEST(S2, HalfsphereCoefficient) {
  for (int l = 1; l <= 15; ++l) {
    const double integral = quad::integrate(
        [l](double t) { return std::legendre(static_cast<unsigned>(l), t); }, 0.0, 1.0, 32);
    const double ref = 0.5 * std::sqrt(kPi) * std::sqrt(2.0 * l + 1.0) * integral;
    EXPECT_NEAR(kernels::halfsphere_coeff(l), ref, 1e-12) << l;
  }
}

TEST(Gram, ZeroSumSpectrum) {
  Eigen::MatrixXd two(2, 2);
  two << 0.0, 1.0, 1.0, 0.0;
  EXPECT_NEAR(kernels::zero_sum_max_eigenvalue(two).max_eigenvalue, -1.0, 1e-14);
  // -|x - y|^2 is positive on zero-sum vectors for distinct points on a line.
  Eigen::MatrixXd sq(3, 3);
  sq << 0, -1, -4, -1, 0, -1, -4, -1, 0;
  const auto r = kernels::zero_sum_max_eigenvalue(sq);
  EXPECT_GT(r.max_eigenvalue, 0.0);
  EXPECT_FALSE(r.restricted_negative_definite);
  // Brute force against the projector P D P on the same matrix.
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(3, 3) - Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P * sq * P);
  EXPECT_NEAR(r.max_eigenvalue, es.eigenvalues().maxCoeff(), 1e-12);
  EXPECT_THROW(kernels::zero_sum_max_eigenvalue(Eigen::MatrixXd::Zero(1, 1)), ConfigError);
}

TEST(Gram, SphereGeodesicIsNegativeType) {
  const auto pts = kernels::random_sphere_points(150, 3);
  const auto r = kernels::gram_restricted_nd_test<kernels::Vec3>(pts, kernels::sphere_distance);
  EXPECT_FALSE(r.degenerate);
  EXPECT_LT(r.max_eigenvalue, 1e-10);
}

TEST(Spaces, Parse) {
  EXPECT_EQ(kernels::parse_space("so3"), kernels::Space::so3);
  EXPECT_EQ(kernels::parse_space("s3"), kernels::Space::su2);
  EXPECT_STREQ(kernels::space_name(kernels::Space::s2), "s2");
  EXPECT_THROW(kernels::parse_space("torus"), ConfigError);
}

TEST(Gram, RotationAngleDistanceIsNotNegativeType) {
  // alpha_2 > 0 on SO(3), so some sample must show a positive direction.
  double best = -1.0;
  for (std::uint64_t seed = 1; seed <= 20 && best <= 1e-10; ++seed) {
    const auto rs = kernels::random_rotations(200, seed);
    best = std::max(best, kernels::gram_restricted_nd_test<kernels::Rotation>(rs, kernels::rotation_distance).max_eigenvalue);
  }
  EXPECT_GT(best, 1e-10);
}

TEST(Gram, AntipodalPair) {
  const std::vector<kernels::Vec3> pts{{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}};
  EXPECT_NEAR(kernels::gram_restricted_nd_test<kernels::Vec3>(pts, kernels::sphere_distance).max_eigenvalue, -kPi, 1e-12);
}
