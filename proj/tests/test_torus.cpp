#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "randwave/errors.hpp"
#include "randwave/torus.hpp"

using namespace randwave;

namespace {

// Jacobi: r_2(n) = 4 (d_1(n) - d_3(n)).
std::size_t jacobi_r2(long long n) {
  long long d1 = 0, d3 = 0;
  for (long long d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    if (d % 4 == 1) ++d1;
    if (d % 4 == 3) ++d3;
  }
  return static_cast<std::size_t>(4 * (d1 - d3));
}

// T(x) from the full lattice sum with a_{-lambda} = conj(a_lambda).
double field_at(const torus::ToralCoeffs& c, const torus::LatticeSet& L, double x1, double x2) {
  std::complex<double> s = 0.0;
  for (std::size_t k = 0; k < L.half.size(); ++k) {
    const double ph = 2.0 * std::numbers::pi * (L.half[k].first * x1 + L.half[k].second * x2);
    s += c.half[k] * std::polar(1.0, ph) + std::conj(c.half[k]) * std::polar(1.0, -ph);
  }
  return s.real() / std::sqrt(static_cast<double>(L.count()));
}

}  // namespace

TEST(Lattice, SmallCases) {
  const auto L1 = torus::lattice_points(1);
  EXPECT_EQ(L1.count(), 4u);
  EXPECT_EQ(L1.half.size(), 2u);
  EXPECT_EQ(L1.mu_hat4_exact, torus::Rational(1));
  const auto L5 = torus::lattice_points(5);
  EXPECT_EQ(L5.count(), 8u);
  EXPECT_EQ(L5.mu_hat4_exact, torus::Rational(-7, 25));
  EXPECT_NEAR(L5.energy(), 20.0 * std::numbers::pi * std::numbers::pi, 1e-12);
  EXPECT_THROW(torus::lattice_points(3), NotRepresentable);
  EXPECT_THROW(torus::lattice_points(0), ConfigError);
  try {
    torus::lattice_points(21);
    FAIL();
  } catch (const NotRepresentable& e) {
    EXPECT_EQ(e.value(), 21);
  }
}

TEST(Lattice, CountsMatchJacobi) {
  for (long long n = 1; n <= 1500; ++n) {
    const std::size_t r2 = jacobi_r2(n);
    EXPECT_EQ(torus::representable(n), r2 > 0) << n;
    if (r2 == 0) continue;
    const auto L = torus::lattice_points(n);
    ASSERT_EQ(L.count(), r2) << n;
    EXPECT_EQ(2 * L.half.size(), L.count());
    std::set<torus::Point> all(L.points.begin(), L.points.end());
    for (const auto& [x, y] : L.half) {
      EXPECT_EQ(x * x + y * y, n);
      EXPECT_TRUE(all.count({-x, -y}));
    }
    EXPECT_NEAR(torus::mu_hat4_angular(L), L.mu_hat4, 1e-12) << n;
  }
}

TEST(Lattice, SmallestWithCount) {
  EXPECT_EQ(torus::smallest_with_count(8), 5);
  EXPECT_EQ(torus::smallest_with_count(24), 325);
  std::size_t best = 0;
  for (long long n = 1; n < 325; ++n) best = std::max(best, jacobi_r2(n));
  EXPECT_LT(best, 24u);
  EXPECT_EQ(torus::smallest_with_count(10000, 50), 0);
}

TEST(Synthesis, DirectAndFftAgree) {
  for (long long n : {1LL, 25LL, 325LL}) {
    const auto L = torus::lattice_points(n);
    const auto c = torus::sample_coeffs(L, 42, 0);
    const int N = 4 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 6;
    const auto a = torus::synthesize(c, L, N, torus::Method::direct, true);
    const auto b = torus::synthesize(c, L, N, torus::Method::fft, true);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      EXPECT_NEAR(a.values[k], b.values[k], 1e-9);
      EXPECT_NEAR(a.grad1[k], b.grad1[k], 1e-9);
      EXPECT_NEAR(a.grad2[k], b.grad2[k], 1e-9);
    }
  }
}

TEST(Synthesis, MatchesExplicitSumAndGradient) {
  const auto L = torus::lattice_points(65);
  const auto c = torus::sample_coeffs(L, 3, 8);
  const int N = 40;
  const auto g = torus::synthesize(c, L, N, torus::Method::automatic, true);
  const double norm = std::sqrt(2.0 / L.energy());
  const double h = 1e-6;
  for (int i : {0, 7, 39}) {
    for (int j : {0, 13, 31}) {
      const double x1 = static_cast<double>(j) / N, x2 = static_cast<double>(i) / N;
      EXPECT_NEAR(g.at(i, j), field_at(c, L, x1, x2), 1e-11);
      const std::size_t idx = static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j);
      EXPECT_NEAR(g.grad1[idx], norm * (field_at(c, L, x1 + h, x2) - field_at(c, L, x1 - h, x2)) / (2 * h), 1e-5);
      EXPECT_NEAR(g.grad2[idx], norm * (field_at(c, L, x1, x2 + h) - field_at(c, L, x1, x2 - h)) / (2 * h), 1e-5);
    }
  }
}

TEST(Synthesis, UnitVariance) {
  const auto L = torus::lattice_points(25);
  double s = 0.0;
  const int M = 4000;
  for (int r = 0; r < M; ++r) {
    const double v = field_at(torus::sample_coeffs(L, 11, static_cast<std::uint64_t>(r)), L, 0.3, 0.71);
    s += v * v;
  }
  EXPECT_NEAR(s / M, 1.0, 4.0 * std::sqrt(2.0 / M));
}

TEST(Synthesis, RejectsCoarseGridAndMismatch) {
  const auto L = torus::lattice_points(25);
  const auto c = torus::sample_coeffs(L, 1, 0);
  EXPECT_THROW(torus::synthesize(c, L, 19), ConfigError);
  EXPECT_THROW(torus::synthesize(c, torus::lattice_points(5), 40), ConfigError);
}

TEST(NodalLength, AnalyticLines) {
  // cos(2 pi x1) vanishes on x1 = 1/4, 3/4.
  const int N = 64;
  auto f = [N](int, int j) { return std::cos(2.0 * std::numbers::pi * j / N); };
  EXPECT_NEAR(torus::level_length_periodic(f, N, 0.0), 2.0, 1e-12);
  // cos(2 pi (x1 + x2)): two diagonal closed lines of length sqrt 2 each.
  auto d = [N](int i, int j) { return std::cos(2.0 * std::numbers::pi * (i + j) / N); };
  EXPECT_NEAR(torus::level_length_periodic(d, N, 0.0), 2.0 * std::numbers::sqrt2, 1e-12);
}

TEST(NodalLength, MeanMatchesKacRice) {
  // E L = sqrt(E_n) / (2 sqrt 2) on the unit torus.
  const auto L = torus::lattice_points(25);
  const int M = 200, N = 160;
  double total = 0.0;
  for (int r = 0; r < M; ++r) total += torus::nodal_length(torus::synthesize(torus::sample_coeffs(L, 6, static_cast<std::uint64_t>(r)), L, N));
  EXPECT_NEAR(total / M / (std::sqrt(L.energy()) / (2.0 * std::numbers::sqrt2)), 1.0, 0.02);
}

TEST(HVector, TraceIdentityAndCenter) {
  const auto L = torus::lattice_points(325);
  double mean1 = 0.0;
  const int M = 2000;
  for (int r = 0; r < M; ++r) {
    const auto h = torus::h_vector(torus::sample_coeffs(L, 5, static_cast<std::uint64_t>(r)), L);
    EXPECT_NEAR(h[0], h[1] + h[2], 1e-12);
    mean1 += h[1];
  }
  // Var H_1 is O(1), so the mean sits well inside 5 / sqrt(M).
  EXPECT_NEAR(mean1 / M, 0.0, 5.0 / std::sqrt(M));
}

TEST(MEta, Moments) {
  for (double eta : {0.0, 0.4, 1.0}) {
    const auto xs = torus::sample_m_eta(eta, 12345, 200000);
    double m = 0.0, v = 0.0, k3 = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    for (double x : xs) {
      v += (x - m) * (x - m);
      k3 += std::pow(x - m, 3);
    }
    v /= static_cast<double>(xs.size());
    k3 /= static_cast<double>(xs.size());
    EXPECT_NEAR(m, 0.0, 0.015);
    EXPECT_NEAR(v, 1.0, 0.03);
    if (eta == 0.0) {
      EXPECT_NEAR(k3, -2.0, 0.15);
    }
  }
  EXPECT_DOUBLE_EQ(torus::m_eta(0.0, 0.0, 0.0), 1.0);
  EXPECT_THROW(torus::sample_m_eta(1.5, 1, 1), ConfigError);
}

TEST(MEta, StreamIsAddressable) {
  const auto all = torus::sample_m_eta(0.3, 9, 100);
  const auto tail = torus::sample_m_eta(0.3, 9, 40, 60);
  for (std::size_t k = 0; k < 40; ++k) EXPECT_EQ(all[60 + k], tail[k]);
}
