#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "randwave/errors.hpp"
#include "randwave/geomstats.hpp"
#include "randwave/sphere.hpp"

using namespace randwave;

namespace {

constexpr double kPi = std::numbers::pi;

sphere::SphereGrid latitude_field(int n_theta, int n_phi) {
  sphere::GridSpec spec;
  spec.n_theta = n_theta;
  spec.n_phi = n_phi;
  return sphere::sample_function(1, spec, [](double th, double) { return std::cos(th); });
}

}  // namespace

TEST(Length, Equator) {
  const auto g = latitude_field(200, 400);
  EXPECT_NEAR(geom::level_length(g, 0.0), 2.0 * kPi, 1e-4);
}

TEST(Length, LatitudeCircles) {
  const auto g = latitude_field(300, 600);
  for (double z : {-0.8, -0.3, 0.5, 0.9}) {
    EXPECT_NEAR(geom::level_length(g, z), 2.0 * kPi * std::sqrt(1.0 - z * z), 2e-4) << z;
  }
  EXPECT_DOUBLE_EQ(geom::level_length(g, 1.5), 0.0);
}

TEST(Length, TiltedGreatCircleThroughPoles) {
  sphere::GridSpec spec;
  spec.n_theta = 300;
  spec.n_phi = 600;
  const auto g = sphere::sample_function(1, spec, [](double th, double ph) { return std::sin(th) * std::cos(ph); });
  for (double z : {0.0, 0.6}) EXPECT_NEAR(geom::level_length(g, z), 2.0 * kPi * std::sqrt(1.0 - z * z), 1e-3);
}

TEST(Length, SymmetricUnderNegation) {
  const auto g = sphere::synthesize(sphere::sample_coeffs(20, 3, 1));
  const auto n = g.negated();
  for (double z : {0.0, 0.7, -1.2}) EXPECT_NEAR(geom::level_length(g, z), geom::level_length(n, -z), 1e-10);
}

TEST(Length, RejectsCoarseGrid) {
  // Synthesis floors already give >= 4 samples per wavelength, so relabel a
  // grid with a higher degree to fall below it.
  auto g = sphere::synthesize(sphere::sample_coeffs(30, 1, 0));
  EXPECT_NO_THROW(geom::level_length(g, 0.0));
  g.ell = 4 * g.n_phi;
  EXPECT_THROW(geom::level_length(g, 0.0), ConfigError);
}

TEST(Length, MeanMatchesKacRice) {
  // E L(z) = 4 pi sqrt(l(l+1)) exp(-z^2/2) / (2 sqrt 2).
  const int l = 20, M = 150;
  sphere::Synthesizer s(l, {});
  for (double z : {0.0, 1.0}) {
    double total = 0.0;
    for (int r = 0; r < M; ++r) total += geom::level_length(s(sphere::sample_coeffs(l, 77, static_cast<std::uint64_t>(r))), z);
    const double expect = 4.0 * kPi * std::sqrt(l * (l + 1.0)) * std::exp(-0.5 * z * z) / (2.0 * std::numbers::sqrt2);
    EXPECT_NEAR(total / M / expect, 1.0, 0.02) << z;
  }
}

TEST(Area, Caps) {
  const auto g = latitude_field(400, 8);
  for (double z : {-0.5, 0.0, 0.25}) EXPECT_NEAR(geom::excursion_area(g, z), 2.0 * kPi * (1.0 - z), 0.05);
  EXPECT_NEAR(geom::defect(g), 0.0, 1e-12);
  EXPECT_NEAR(geom::excursion_area(g, -2.0), 4.0 * kPi, 1e-12);
}

TEST(Area, ComplementIdentity) {
  const auto g = sphere::synthesize(sphere::sample_coeffs(15, 9, 2));
  const auto n = g.negated();
  for (double z : {-0.4, 0.0, 1.3}) {
    EXPECT_NEAR(geom::excursion_area(g, z) + geom::excursion_area(n, -z), 4.0 * kPi, 1e-10);
  }
  EXPECT_NEAR(geom::defect(g), -geom::defect(n), 1e-10);
}

TEST(Hermite, LowOrders) {
  const auto g = latitude_field(40, 80);
  EXPECT_NEAR(geom::hermite_functional(g, 0), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(geom::hermite_functional(g, 1), 0.0, 1e-12);
  // int (cos^2 - 1) = 4 pi / 3 - 4 pi.
  EXPECT_NEAR(geom::hermite_functional(g, 2), 4.0 * kPi / 3.0 - 4.0 * kPi, 1e-12);
  EXPECT_THROW(geom::hermite_functional(g, -1), ConfigError);
}

TEST(Hermite, SecondOrderMatchesCoefficients) {
  // Parseval: int T^2 = sum a_m^2, so h_2 = sum a_m^2 - 4 pi.
  const auto c = sphere::sample_coeffs(25, 4, 0);
  const auto g = sphere::synthesize(c);
  double s = 0.0;
  for (double a : c.values) s += a * a;
  EXPECT_NEAR(geom::hermite_functional(g, 2), s - 4.0 * kPi, 1e-10);
}

TEST(SecondChaos, VanishesAtZeroAndIsCentered) {
  const auto c = sphere::sample_coeffs(10, 1, 0);
  EXPECT_DOUBLE_EQ(geom::second_chaos_length(c, 0.0), 0.0);
  sphere::HarmonicCoeffs flat;
  flat.ell = 10;
  flat.values.assign(21, std::sqrt(flat.variance()));
  EXPECT_NEAR(geom::second_chaos_length(flat, 1.0), 0.0, 1e-12);
  double mean = 0.0;
  const int M = 4000;
  for (int r = 0; r < M; ++r) mean += geom::second_chaos_length(sphere::sample_coeffs(10, 2, static_cast<std::uint64_t>(r)), 1.0);
  // Var = (l(l+1)/2)(pi/8) phi^2 (2l+1) 2 (4 pi/(2l+1))^2 at z = 1.
  const double sd = std::sqrt(55.0 * kPi / 8.0 * std::pow(specfun::gauss_pdf(1.0), 2) * 21.0 * 2.0 * std::pow(4.0 * kPi / 21.0, 2));
  EXPECT_NEAR(mean / M, 0.0, 4.0 * sd / std::sqrt(M));
}

TEST(Kind, Names) {
  EXPECT_STREQ(geom::kind_name(geom::Kind::length), "length");
  EXPECT_STREQ(geom::kind_name(geom::Kind::defect), "defect");
}
