#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "randwave/errors.hpp"
#include "randwave/sphere.hpp"

using namespace randwave;

namespace {

sphere::HarmonicCoeffs unit_coeffs(int ell, int k) {
  sphere::HarmonicCoeffs c;
  c.ell = ell;
  c.values.assign(2 * static_cast<std::size_t>(ell) + 1, 0.0);
  c.values[static_cast<std::size_t>(k)] = 1.0;
  return c;
}

double field_at(const sphere::HarmonicCoeffs& c, double theta, double phi) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    s += c.values[k] * sphere::real_harmonic(c.ell, static_cast<int>(k), theta, phi);
  }
  return s;
}

}  // namespace

TEST(RealHarmonic, MatchesStdSphLegendre) {
  // libstdc++ carries the Condon-Shortley phase; this basis does not.
  for (int l : {1, 5, 40, 300}) {
    for (int m : {0, 1, 3, l}) {
      if (m > l) continue;
      for (double th : {0.2, 1.0, 1.5707963, 2.8}) {
        const double ref = (m % 2 ? -1.0 : 1.0) * std::sph_legendre(l, m, th) * (m ? std::numbers::sqrt2 : 1.0);
        const int k = m == 0 ? 0 : 2 * m - 1;
        EXPECT_NEAR(sphere::real_harmonic(l, k, th, 0.0), ref, 1e-10) << l << " " << m << " " << th;
      }
    }
  }
}

TEST(RealHarmonic, AdditionTheorem) {
  // sum_k Y_k(x) Y_k(y) = (2l+1)/(4 pi) P_l(<x,y>).
  const double t1 = 0.7, p1 = 1.1, t2 = 2.0, p2 = 4.0;
  const double dot = std::sin(t1) * std::sin(t2) * std::cos(p1 - p2) + std::cos(t1) * std::cos(t2);
  for (int l : {1, 2, 9, 60}) {
    double s = 0.0;
    for (int k = 0; k <= 2 * l; ++k) s += sphere::real_harmonic(l, k, t1, p1) * sphere::real_harmonic(l, k, t2, p2);
    EXPECT_NEAR(s, (2 * l + 1) / (4.0 * std::numbers::pi) * std::legendre(l, dot), 1e-11) << l;
  }
}

TEST(Synthesis, OrthonormalUnderGridQuadrature) {
  for (int l : {1, 7, 24}) {
    sphere::Synthesizer synth(l, {});
    std::vector<sphere::SphereGrid> basis;
    for (int k = 0; k <= 2 * l; ++k) basis.push_back(synth(unit_coeffs(l, k)));
    for (int a = 0; a <= 2 * l; ++a) {
      for (int b = a; b <= 2 * l; ++b) {
        double s = 0.0;
        const auto& ga = basis[static_cast<std::size_t>(a)];
        const auto& gb = basis[static_cast<std::size_t>(b)];
        for (int i = 0; i < ga.n_theta; ++i) {
          for (int j = 0; j < ga.n_phi; ++j) s += ga.weights[static_cast<std::size_t>(i)] * ga.value(i, j) * gb.value(i, j);
        }
        EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-12) << l << " " << a << " " << b;
      }
    }
  }
}

TEST(Synthesis, MatchesDirectEvaluation) {
  const int l = 37;
  const auto c = sphere::sample_coeffs(l, 99, 3);
  sphere::GridSpec spec;
  spec.with_gradient = true;
  const auto g = sphere::synthesize(c, spec);
  const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
  const double h = 1e-6;
  for (int i : {0, 5, g.n_theta / 2, g.n_theta - 1}) {
    for (int j : {0, 17, g.n_phi - 1}) {
      const double th = g.theta(i), ph = g.phi(j);
      EXPECT_NEAR(g.value(i, j), field_at(c, th, ph), 1e-10);
      const std::size_t idx = static_cast<std::size_t>(i) * static_cast<std::size_t>(g.n_phi) + static_cast<std::size_t>(j);
      const double dth = (field_at(c, th + h, ph) - field_at(c, th - h, ph)) / (2 * h);
      const double dph = (field_at(c, th, ph + h) - field_at(c, th, ph - h)) / (2 * h);
      EXPECT_NEAR(g.grad1[idx], norm * dth, 1e-6);
      EXPECT_NEAR(g.grad2[idx], norm * dph / std::sin(th), 1e-6);
    }
  }
  EXPECT_NEAR(g.north, field_at(c, 0.0, 0.0), 1e-10);
  EXPECT_NEAR(g.south, field_at(c, std::numbers::pi, 0.0), 1e-10);
}

TEST(Synthesis, Linear) {
  const int l = 12;
  auto a = sphere::sample_coeffs(l, 1, 0), b = sphere::sample_coeffs(l, 1, 1);
  auto sum = a;
  for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] = 2.0 * a.values[k] - 0.5 * b.values[k];
  sphere::Synthesizer s(l, {});
  const auto ga = s(a), gb = s(b), gs = s(sum);
  for (std::size_t k = 0; k < gs.values.size(); ++k) {
    EXPECT_NEAR(gs.values[k], 2.0 * ga.values[k] - 0.5 * gb.values[k], 1e-12);
  }
}

TEST(Sampling, VarianceAndCovariance) {
  // Empirical moments over replicates; the covariance oracle is P_l.
  const int l = 10;
  const int M = 4000;
  const double t1 = 0.4, p1 = 0.3, t2 = 0.9, p2 = 1.2;
  const double dot = std::sin(t1) * std::sin(t2) * std::cos(p1 - p2) + std::cos(t1) * std::cos(t2);
  double sxx = 0.0, sxy = 0.0;
  for (int r = 0; r < M; ++r) {
    const auto c = sphere::sample_coeffs(l, 2024, static_cast<std::uint64_t>(r));
    const double x = field_at(c, t1, p1), y = field_at(c, t2, p2);
    sxx += x * x;
    sxy += x * y;
  }
  EXPECT_NEAR(sxx / M, 1.0, 4.0 * std::sqrt(2.0 / M));
  EXPECT_NEAR(sxy / M, std::legendre(l, dot), 4.0 * std::sqrt((1.0 + dot * dot) / M));
}

TEST(Sampling, GradientVariance) {
  // Normalized gradient components have unit variance, i.e. E|grad T|^2 = l(l+1).
  const int l = 15;
  sphere::GridSpec spec;
  spec.with_gradient = true;
  sphere::Synthesizer s(l, spec);
  double g1 = 0.0, g2 = 0.0, w = 0.0;
  for (int r = 0; r < 200; ++r) {
    const auto g = s(sphere::sample_coeffs(l, 5, static_cast<std::uint64_t>(r)));
    for (int i = 0; i < g.n_theta; ++i) {
      for (int j = 0; j < g.n_phi; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * static_cast<std::size_t>(g.n_phi) + static_cast<std::size_t>(j);
        g1 += g.weights[static_cast<std::size_t>(i)] * g.grad1[idx] * g.grad1[idx];
        g2 += g.weights[static_cast<std::size_t>(i)] * g.grad2[idx] * g.grad2[idx];
        w += g.weights[static_cast<std::size_t>(i)];
      }
    }
  }
  // The sphere average of each component equals exactly half of |grad T|^2 / (l(l+1)/2).
  EXPECT_NEAR((g1 + g2) / w, 2.0, 0.1);
  EXPECT_NEAR(g1 / w, 1.0, 0.1);
}

TEST(Sampling, DeterministicPerReplicate) {
  const auto a = sphere::sample_coeffs(50, 7, 11);
  const auto b = sphere::sample_coeffs(50, 7, 11);
  const auto c = sphere::sample_coeffs(50, 7, 12);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_THROW(sphere::sample_coeffs(0, 7, 0), ConfigError);
}

TEST(Grid, Resolution) {
  for (int l : {1, 3, 50, 201, 400}) {
    const auto [nt, np] = sphere::resolve_grid(l, {});
    EXPECT_EQ(np % 2, 0);
    EXPECT_GE(np, 2 * (2 * l + 1));
    EXPECT_GE(nt, 2 * (l + 1));
  }
  sphere::GridSpec bad;
  bad.n_phi = 10;
  EXPECT_THROW(sphere::resolve_grid(5, bad), ConfigError);
  bad.n_phi = 0;
  bad.samples_per_wavelength = -1.0;
  EXPECT_THROW(sphere::resolve_grid(5, bad), ConfigError);
}

TEST(Grid, QuadratureIntegratesPolynomials) {
  const auto g = sphere::sample_function(8, {}, [](double th, double ph) {
    return std::pow(std::sin(th) * std::cos(ph), 2) + std::cos(th);
  });
  // int x^2 = 4 pi / 3, int z = 0.
  EXPECT_NEAR(g.integrate([](double v) { return v; }), 4.0 * std::numbers::pi / 3.0, 1e-12);
  EXPECT_NEAR(g.integrate([](double) { return 1.0; }), 4.0 * std::numbers::pi, 1e-12);
}

TEST(Grid, NegatedAndDump) {
  const auto g = sphere::synthesize(sphere::sample_coeffs(4, 1, 0));
  const auto n = g.negated();
  for (std::size_t k = 0; k < g.values.size(); ++k) EXPECT_EQ(n.values[k], -g.values[k]);
  EXPECT_EQ(n.north, -g.north);
  std::ostringstream os;
  sphere::write_grid(os, g);
  EXPECT_EQ(os.str().size(), 32 + 8 * g.values.size());
}
