#pragma once

// Special functions: normalized Gegenbauer/Legendre polynomials, probabilists'
// Hermite polynomials, Bessel functions of integer and half-integer order,
// Gaussian density/cdf, eigenspace dimensions and sphere volumes.
//
// Everything here is a pure function of its arguments.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace randwave::specfun {

/// Normalized Gegenbauer polynomial G_{l;d}(t), the covariance of a degree-l
/// eigenfunction on S^d as a function of cos(geodesic distance). G(1) = 1 and
/// d = 2 gives the Legendre polynomial P_l.
///
/// Uses the three-term recurrence written directly for the normalized family,
///   G_{k+1} = ((2k+d-1) t G_k - k G_{k-1}) / (k+d-1),
/// which never forms the (large) raw Jacobi values.
inline double gegenbauer(int ell, int d, double t) {
  if (ell < 0) throw std::domain_error("gegenbauer: negative degree");
  if (d < 2) throw std::domain_error("gegenbauer: dimension d must be >= 2");
  if (!(std::abs(t) <= 1.0)) throw std::domain_error("gegenbauer: |t| > 1");
  if (ell == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int k = 1; k < ell; ++k) {
    const double next =
        ((2.0 * k + d - 1) * t * cur - k * prev) / static_cast<double>(k + d - 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Legendre polynomial P_l(t), the d = 2 Gegenbauer case.
inline double legendre(int ell, double t) { return gegenbauer(ell, 2, t); }

/// Probabilists' Hermite polynomial H_q(x): H_{q+1} = x H_q - q H_{q-1}.
inline double hermite(int q, double x) {
  if (q < 0) throw std::domain_error("hermite: negative order");
  if (q == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < q; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Fills out[0..q] with H_0(x)..H_q(x).
inline void hermite_all(int q, double x, double* out) {
  out[0] = 1.0;
  if (q >= 1) out[1] = x;
  for (int k = 1; k < q; ++k) out[k + 1] = x * out[k] - k * out[k - 1];
}

inline double gauss_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double gauss_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(z) without cancellation for large z.
inline double gauss_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Dimension n_{l;d} of the degree-l eigenspace on S^d.
inline std::uint64_t eigenspace_dim(int ell, int d) {
  if (ell < 0 || d < 2) throw std::domain_error("eigenspace_dim: need l >= 0, d >= 2");
  if (ell == 0) return 1;
  // C(l+d-2, l-1) built incrementally; exact while it fits in 64 bits.
  std::uint64_t binom = 1;
  const int n = ell + d - 2;
  const int k = std::min(ell - 1, d - 1);
  for (int i = 1; i <= k; ++i) binom = binom * static_cast<std::uint64_t>(n - k + i) / i;
  // (2l+d-1)/l * C(l+d-2, l-1) is an integer; multiply first, then divide.
  const std::uint64_t num = static_cast<std::uint64_t>(2 * ell + d - 1) * binom;
  return num / static_cast<std::uint64_t>(ell);
}

/// Hypersurface volume mu_d of the unit sphere S^d embedded in R^{d+1}.
inline double sphere_volume(int d) {
  if (d < 1) throw std::domain_error("sphere_volume: d must be >= 1");
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Laplace eigenvalue l(l+d-1) on S^d.
inline double eigenvalue(int ell, int d) { return static_cast<double>(ell) * (ell + d - 1); }

// ---------------------------------------------------------------------------
// Bessel functions

namespace detail {

inline void check_bessel_order(double nu) {
  const double twice = 2.0 * nu;
  if (!(nu >= 0.0) || twice != std::floor(twice)) {
    throw std::domain_error("bessel_j: order must be a nonnegative integer or half-integer");
  }
}

// Ascending power series, evaluated in extended precision. The largest term is
// about e^x / sqrt(2 pi x), so cancellation stays below 1e-12 up to the switch.
inline long double bessel_series(long double nu, long double x) {
  const long double half = x / 2.0L;
  long double term = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0L));
  long double sum = term;
  const long double h2 = half * half;
  for (int k = 1; k < 500; ++k) {
    term *= -h2 / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-21L * std::max(std::abs(sum), 1e-30L) && k > half) break;
  }
  return sum;
}

// Hankel asymptotic expansion; truncated at the smallest term. It terminates
// exactly for half-integer orders.
inline long double bessel_asymptotic(long double nu, long double x) {
  const long double mu = 4.0L * nu * nu;
  const long double pi = std::numbers::pi_v<long double>;
  long double p = 1.0L;
  long double q = 0.0L;
  long double term = 1.0L;
  long double last = 1.0L;
  for (int k = 1; k < 200; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    term *= (mu - odd * odd) / (static_cast<long double>(k) * 8.0L * x);
    const long double mag = std::abs(term);
    if (mag == 0.0L) break;
    if (mag > last && k > 2) break;  // asymptotic series started to diverge
    last = mag;
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (mag < 1e-22L) break;
  }
  const long double chi = x - (nu / 2.0L + 0.25L) * pi;
  return std::sqrt(2.0L / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

inline constexpr double kBesselSwitch = 17.0;

}  // namespace detail

/// Bessel function of the first kind J_nu(x) for nu in {0, 1/2, 1, 3/2, ...}
/// and x >= 0. Power series below x = 17, Hankel asymptotics above.
inline double bessel_j(double nu, double x) {
  detail::check_bessel_order(nu);
  if (!(x >= 0.0)) throw std::domain_error("bessel_j: negative argument");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x < detail::kBesselSwitch) {
    return static_cast<double>(detail::bessel_series(nu, x));
  }
  return static_cast<double>(detail::bessel_asymptotic(nu, x));
}

/// Derivative J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
inline double bessel_j_prime(double nu, double x) {
  if (x == 0.0) return nu == 1.0 ? 0.5 : 0.0;
  return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

/// The first `count` positive zeros of J_nu, ascending. Located by a sign-change
/// scan (zeros are spaced by roughly pi) and polished with safeguarded Newton.
inline std::vector<double> bessel_j_zeros(double nu, int count) {
  detail::check_bessel_order(nu);
  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(std::max(count, 0)));
  constexpr double kStep = 0.25;
  double a = std::max(nu, 0.5);  // no zero below nu
  double fa = bessel_j(nu, a);
  while (static_cast<int>(zeros.size()) < count) {
    double b = a + kStep;
    double fb = bessel_j(nu, b);
    if (fa == 0.0) {
      zeros.push_back(a);
    } else if (std::signbit(fa) != std::signbit(fb)) {
      double lo = a, hi = b, flo = fa;
      double x = 0.5 * (lo + hi);
      for (int it = 0; it < 100; ++it) {
        const double fx = bessel_j(nu, x);
        if (fx == 0.0) break;
        if (std::signbit(fx) == std::signbit(flo)) {
          lo = x;
          flo = fx;
        } else {
          hi = x;
        }
        const double step = fx / bessel_j_prime(nu, x);
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15 * x) {
          x = next;
          break;
        }
        x = next;
      }
      zeros.push_back(x);
    }
    a = b;
    fa = fb;
  }
  return zeros;
}

}  // namespace randwave::specfun
