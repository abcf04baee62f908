#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "randwave/errors.hpp"
#include "randwave/geomstats.hpp"
#include "randwave/oracles.hpp"
#include "randwave/sphere.hpp"

using namespace randwave;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(BesselKernel, ElementaryForms) {
  for (double x : {0.3, 2.0, 11.0, 40.0}) {
    EXPECT_NEAR(oracles::bessel_kernel(2, x), std::cyl_bessel_j(0.0, x), 1e-13);
    EXPECT_NEAR(oracles::bessel_kernel(3, x), std::sin(x) / x, 1e-14);
    EXPECT_NEAR(oracles::bessel_kernel(4, x), 2.0 * std::cyl_bessel_j(1.0, x) / x, 1e-13);
  }
  EXPECT_DOUBLE_EQ(oracles::bessel_kernel(5, 0.0), 1.0);
}

TEST(BesselKernel, IsGegenbauerScalingLimit) {
  const int l = 2000;
  for (int d = 2; d <= 5; ++d) {
    for (double psi : {0.5, 3.0, 8.0}) {
      EXPECT_NEAR(specfun::gegenbauer(l, d, std::cos(psi / l)), oracles::bessel_kernel(d, psi), 5e-3) << d << " " << psi;
    }
  }
}

TEST(Wynn, AcceleratesAlternatingSeries) {
  std::vector<double> s;
  double acc = 0.0;
  for (int k = 1; k <= 14; ++k) {
    acc += (k % 2 ? 1.0 : -1.0) / k;
    s.push_back(acc);
  }
  double err = 0.0;
  EXPECT_NEAR(oracles::wynn_epsilon(s, &err), std::log(2.0), 1e-9);
  EXPECT_LT(err, 1e-7);
}

TEST(Cqd, ClosedForms) {
  EXPECT_NEAR(oracles::c2_closed_form(2), 0.5, 1e-15);
  EXPECT_NEAR(oracles::c2_closed_form(3), kPi / 4.0, 1e-15);
  const auto c42 = oracles::cqd_constant(4, 2);
  EXPECT_EQ(c42.method, oracles::Method::log_law);
  EXPECT_NEAR(c42.value, 3.0 / (2.0 * kPi * kPi), 1e-15);
  EXPECT_THROW(oracles::cqd_constant(1, 2), ConfigError);
}

TEST(Cqd, OddOrderMatchesClosedForm) {
  for (int d = 3; d <= 6; ++d) {
    const auto v = oracles::cqd_constant(3, d);
    EXPECT_NEAR(v.value / oracles::c3_closed_form(d), 1.0, 1e-6) << d;
  }
  // d = 3: int (sin x / x)^3 x^2 dx = pi / 4.
  EXPECT_NEAR(oracles::c3_closed_form(3), kPi / 4.0, 1e-14);
}

TEST(Cqd, GegenbauerMomentScaling) {
  // l^d int_0^{pi/2} G^q sin^{d-1} -> c_{q;d}.
  for (auto [q, d] : {std::pair{3, 3}, std::pair{4, 3}, std::pair{5, 2}}) {
    const int l = 200;
    const auto m = oracles::gegenbauer_moment(l, q, d);
    const double c = oracles::cqd_constant(q, d).value;
    EXPECT_NEAR(std::pow(l, d) * m.value / c, 1.0, 0.05) << q << "," << d;
  }
}

TEST(Cqd, LogLawSlope) {
  // l^2 M_{4,2}(l) = c log l + O(1), so the difference over a doubling is c log 2.
  const double a = 200.0 * 200.0 * oracles::gegenbauer_moment(200, 4, 2).value;
  const double b = 400.0 * 400.0 * oracles::gegenbauer_moment(400, 4, 2).value;
  EXPECT_NEAR((b - a) / std::log(2.0) / oracles::cqd_constant(4, 2).value, 1.0, 0.05);
}

TEST(GegenbauerMoment, SecondMomentAndSymmetry) {
  for (int d = 2; d <= 4; ++d) {
    for (int l : {1, 6, 31}) {
      const auto full = oracles::gegenbauer_moment(l, 2, d, true);
      EXPECT_NEAR(full.value, oracles::gegenbauer_second_moment(l, d), 1e-12);
      // Even powers are symmetric about pi/2.
      EXPECT_NEAR(oracles::gegenbauer_moment(l, 2, d).value, 0.5 * full.value, 1e-12);
    }
  }
  EXPECT_THROW(oracles::gegenbauer_moment(3, 2, 1), ConfigError);
}

TEST(Defect, SeriesAgreesWithQuadrature) {
  const auto q = oracles::defect_constant_quadrature(2);
  const auto s = oracles::defect_constant_series(2);
  EXPECT_NEAR(s.value / q.value, 1.0, 1e-4);
  EXPECT_GT(q.value, 32.0 / std::sqrt(27.0));
  EXPECT_NEAR(oracles::arcsin_taylor(0), 1.0, 0.0);
  EXPECT_NEAR(oracles::arcsin_taylor(1), 1.0 / 6.0, 1e-16);
}

TEST(Defect, ExactVarianceApproachesConstant) {
  const double C = oracles::defect_constant_quadrature(2).value;
  EXPECT_NEAR(100.0 * 100.0 * oracles::defect_variance_exact(100, 2) / C, 1.0, 0.02);
}

TEST(Defect, ExactVarianceMatchesMonteCarlo) {
  const int l = 10, M = 1500;
  sphere::Synthesizer s(l, {});
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < M; ++r) {
    const double D = geom::defect(s(sphere::sample_coeffs(l, 31, static_cast<std::uint64_t>(r))));
    sum += D;
    sq += D * D;
  }
  const double var = sq / M - (sum / M) * (sum / M);
  EXPECT_NEAR(var / oracles::defect_variance_exact(l, 2), 1.0, 4.0 * std::sqrt(2.0 / M) + 0.02);
}

TEST(Targets, SphereMeans) {
  const auto t = oracles::expected_values(100, 2, 0.0);
  EXPECT_NEAR(t.area_mean, 2.0 * kPi, 1e-13);
  EXPECT_TRUE(t.nodal);
  EXPECT_NEAR(t.nodal_var, std::log(100.0) / 32.0, 1e-15);
  const auto u = oracles::expected_values(50, 2, 1.0);
  EXPECT_FALSE(u.nodal);
  EXPECT_NEAR(u.length_mean, 4.0 * kPi * std::exp(-0.5) * std::sqrt(2550.0) / (2.0 * std::numbers::sqrt2), 1e-10);
  EXPECT_THROW(oracles::expected_values(0, 2, 0.0), ConfigError);
}

TEST(Torus, Constants) {
  EXPECT_NEAR(oracles::torus_c(-7.0 / 25.0), 0.00210625, 1e-15);
  EXPECT_NEAR(oracles::psi(1.0), 0.5, 1e-16);
  for (double eta : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(oracles::quadratic_form_variance(eta), 1.0 + eta * eta, 1e-13);
    const auto law = oracles::m_eta_law(eta);
    EXPECT_NEAR(law.cumulant(2), 1.0, 1e-14);
    const Eigen::Matrix4d S = oracles::sigma_matrix(oracles::psi(eta));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(S);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-14);
  }
  EXPECT_NEAR(oracles::m_eta_law(0.0).cumulant(3), -2.0, 1e-14);
  EXPECT_NEAR(oracles::m_eta_law(0.0).cumulant(4), 6.0, 1e-14);
  EXPECT_NEAR(oracles::torus_length_mean(5), std::sqrt(20.0) * kPi / (2.0 * std::numbers::sqrt2), 1e-12);
}
