#pragma once

// Reference values the simulations are compared against: Gegenbauer moments,
// the Bessel-integral constants c_{q;d}, the Defect constant C_d, closed-form
// means and leading variances on S^2, and the torus constants.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "randwave/errors.hpp"
#include "randwave/quadrature.hpp"
#include "randwave/specfun.hpp"

namespace randwave::oracles {

enum class Method { closed_form, quadrature, series, log_law };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::quadrature: return "quadrature";
    case Method::series: return "series";
    case Method::log_law: return "log-law";
  }
  return "?";
}

/// A reference value with the method used and an error estimate (for series,
/// `order` is the truncation order).
struct OracleValue {
  std::string name;
  double value = 0.0;
  Method method = Method::closed_form;
  double error_bound = 0.0;
  int order = 0;
};

// ---------------------------------------------------------------------------
// Gegenbauer moments

/// int G_{l;d}(cos t)^q sin^{d-1} t dt over [0, pi/2] (or [0, pi] when
/// full_range), composite Gauss-Legendre in t with max(l, 8) panels of 16
/// nodes. The error bound is the change against a rule with twice the panels.
inline OracleValue gegenbauer_moment(int ell, int q, int d, bool full_range = false) {
  if (ell < 0 || q < 0 || d < 2) throw ConfigError("gegenbauer_moment", "need l >= 0, q >= 0, d >= 2");
  const double upper = full_range ? std::numbers::pi : std::numbers::pi / 2.0;
  auto f = [&](double t) {
    const double g = specfun::gegenbauer(ell, d, std::clamp(std::cos(t), -1.0, 1.0));
    return std::pow(g, q) * std::pow(std::sin(t), d - 1);
  };
  const int panels = std::max(ell, 8) * (full_range ? 2 : 1);
  const double coarse = quad::integrate_composite(f, 0.0, upper, panels, 16);
  const double fine = quad::integrate_composite(f, 0.0, upper, 2 * panels, 16);
  return {"gegenbauer_moment", fine, Method::quadrature, std::abs(fine - coarse)};
}

/// mu_d / (mu_{d-1} n_{l;d}), the full-range second moment.
inline double gegenbauer_second_moment(int ell, int d) {
  return specfun::sphere_volume(d) /
         (specfun::sphere_volume(d - 1) * static_cast<double>(specfun::eigenspace_dim(ell, d)));
}

// ---------------------------------------------------------------------------
// Bessel-integral constants

/// Wynn's epsilon algorithm on a sequence of partial sums. Returns the most
/// stable even-column estimate; `err` receives the change from the previous one.
inline double wynn_epsilon(const std::vector<double>& s, double* err = nullptr) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  std::vector<double> prev(n + 1, 0.0);
  std::vector<double> cur(s);
  double best = s.back();
  double best_err = n >= 2 ? std::abs(s[n - 1] - s[n - 2]) : std::numeric_limits<double>::infinity();
  double last_even = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(cur.size() - 1);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double diff = cur[i + 1] - cur[i];
      if (diff == 0.0 || !std::isfinite(diff)) {
        ok = false;
        break;
      }
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    if (!ok || next.empty()) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0) {
      const double est = cur.back();
      const double e = std::abs(est - last_even);
      if (std::isfinite(est) && e < best_err) {
        best = est;
        best_err = e;
      }
      last_even = est;
    }
  }
  if (err) *err = best_err;
  return best;
}

/// B_d(psi) = 2^{nu} Gamma(nu+1) J_nu(psi) psi^{-nu}, nu = d/2 - 1; B_d(0) = 1.
/// This is the scaling limit of G_{l;d}(cos(psi/l)).
inline double bessel_kernel(int d, double psi) {
  const double nu = 0.5 * d - 1.0;
  if (psi == 0.0) return 1.0;
  if (nu == 0.0) return specfun::bessel_j(0.0, psi);
  // For half-integer orders use the elementary forms where available.
  if (d == 3) return std::sin(psi) / psi;
  const double pref = std::exp(nu * std::log(2.0) + std::lgamma(nu + 1.0));
  return pref * specfun::bessel_j(nu, psi) * std::pow(psi, -nu);
}

namespace detail {

// Integral of f over [0, z_K] split at the zeros of J_nu; returns the partial
// sums at each zero.
template <class F>
std::vector<double> partial_sums_at_zeros(F&& f, const std::vector<double>& zeros, int nodes_first = 16,
                                          int panels_first = 8) {
  std::vector<double> sums;
  sums.reserve(zeros.size());
  double acc = quad::integrate_composite(f, 0.0, zeros[0], panels_first, nodes_first);
  sums.push_back(acc);
  for (std::size_t k = 1; k < zeros.size(); ++k) {
    acc += quad::integrate(f, zeros[k - 1], zeros[k], 32);
    sums.push_back(acc);
  }
  return sums;
}

inline const std::vector<double>& kernel_zeros(int d, int count) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& z = cache[{d, count}];
  if (z.empty()) {
    if (d == 3) {
      for (int k = 1; k <= count; ++k) z.push_back(k * std::numbers::pi);
    } else {
      z = specfun::bessel_j_zeros(0.5 * d - 1.0, count);
    }
  }
  return z;
}

}  // namespace detail

/// Closed form for c_{3;d}.
inline double c3_closed_form(int d) {
  const double nu = 0.5 * d - 1.0;
  const double pref = std::exp(nu * std::log(2.0) + std::lgamma(nu + 1.0));
  return std::pow(pref, 3) * std::pow(3.0, 0.5 * d - 1.5) /
         (std::pow(2.0, 3.0 * nu - 1.0) * std::sqrt(std::numbers::pi) * std::tgamma(0.5 * d - 0.5));
}

/// c_{2;d} = (d-1)! mu_d / (4 mu_{d-1}).
inline double c2_closed_form(int d) {
  return std::tgamma(static_cast<double>(d)) * specfun::sphere_volume(d) / (4.0 * specfun::sphere_volume(d - 1));
}

/// c_{q;d} = int_0^inf B_d(psi)^q psi^{d-1} dpsi.
///
/// q = 2 uses the closed form. Odd q: partial sums at kernel zeros, then
/// Wynn acceleration (this covers the conditionally convergent (3,2), (3,3)).
/// Even q: integrate out to many zeros and add the tail of the
/// non-oscillating mean. For (q,d) = (4,2) the integral diverges
/// logarithmically; the returned constant is the coefficient of that log law,
/// (2/pi)^2 * 3/8 = 3/(2 pi^2).
inline OracleValue cqd_constant(int q, int d) {
  if (d < 2 || q < 2) throw ConfigError("cqd", "need q >= 2, d >= 2");
  const std::string name = "c_" + std::to_string(q) + "_" + std::to_string(d);
  if (q == 2) return {name, c2_closed_form(d), Method::closed_form, 0.0};
  const double nu = 0.5 * d - 1.0;
  // Large-psi envelope: B^q psi^{d-1} ~ A cos^q(...) psi^{-s}.
  const double pref = std::exp(nu * std::log(2.0) + std::lgamma(nu + 1.0));
  const double amp = std::pow(pref, q) * std::pow(2.0 / std::numbers::pi, 0.5 * q);
  const double s = q * (nu + 0.5) - (d - 1.0);
  const bool even = q % 2 == 0;
  double mean_cos = 0.0;  // average of cos^q
  if (even) {
    mean_cos = 1.0;
    for (int k = 1; k <= q / 2; ++k) mean_cos *= (q / 2.0 + k) / k;  // C(q, q/2)
    mean_cos /= std::pow(2.0, q);
  }
  if (even && std::abs(s - 1.0) < 1e-12) {
    return {name, amp * mean_cos, Method::log_law, 0.0};
  }
  auto f = [&](double psi) { return std::pow(bessel_kernel(d, psi), q) * std::pow(psi, d - 1); };
  if (!even) {
    const auto& zeros = detail::kernel_zeros(d, 60);
    const auto sums = detail::partial_sums_at_zeros(f, zeros, 16, 8);
    double err = 0.0;
    const double v = wynn_epsilon(sums, &err);
    return {name, v, Method::quadrature, err};
  }
  const auto& zeros = detail::kernel_zeros(d, 2000);
  const auto sums = detail::partial_sums_at_zeros(f, zeros, 16, 8);
  const double X = zeros.back();
  const double tail = amp * mean_cos * std::pow(X, 1.0 - s) / (s - 1.0);
  // The next term of the envelope is O(X^{-s}); use it as the error scale.
  return {name, sums.back() + tail, Method::quadrature, amp * std::pow(X, -s) * 10.0};
}

// ---------------------------------------------------------------------------
// Defect variance constant

/// a_k = (2k)! / (4^k (k!)^2 (2k+1)), the arcsine Taylor coefficients.
inline double arcsin_taylor(int k) {
  double c = 1.0;  // (2k)!/(4^k (k!)^2), built as a running product
  for (int j = 1; j <= k; ++j) c *= (2.0 * j - 1.0) / (2.0 * j);
  return c / (2.0 * k + 1.0);
}

/// C_d by direct quadrature of (4/pi) mu_d mu_{d-1} int psi^{d-1}(arcsin B - B).
inline OracleValue defect_constant_quadrature(int d) {
  if (d < 2) throw ConfigError("d", "must be >= 2");
  auto f = [&](double psi) {
    const double b = bessel_kernel(d, psi);
    return std::pow(psi, d - 1) * (std::asin(std::clamp(b, -1.0, 1.0)) - b);
  };
  const auto& zeros = detail::kernel_zeros(d, 60);
  const auto sums = detail::partial_sums_at_zeros(f, zeros, 16, 8);
  double err = 0.0;
  const double integral = wynn_epsilon(sums, &err);
  const double k = 4.0 / std::numbers::pi * specfun::sphere_volume(d) * specfun::sphere_volume(d - 1);
  return {"C_" + std::to_string(d), k * integral, Method::quadrature, k * err};
}

/// C_d by the series (4/pi) mu_d mu_{d-1} sum_{k>=1} a_k c_{2k+1;d}, summed to
/// `order` terms. The terms decay like k^{-(3+d)/2}; the remainder is estimated
/// by fitting that power to the last computed terms and summing it.
inline OracleValue defect_constant_series(int d, int order = 60) {
  if (d < 2) throw ConfigError("d", "must be >= 2");
  std::vector<double> terms;
  double sum = 0.0;
  for (int k = 1; k <= order; ++k) {
    const double t = arcsin_taylor(k) * cqd_constant(2 * k + 1, d).value;
    terms.push_back(t);
    sum += t;
  }
  double tail = 0.0;
  if (order >= 4) {
    // Fit t_k ~ A k^{-p} on the last two terms, then sum k > order by
    // Euler-Maclaurin: int_{K}^{inf} + correction.
    const double k1 = order - 1.0, k2 = order;
    const double t1 = terms[terms.size() - 2], t2 = terms.back();
    if (t1 > 0.0 && t2 > 0.0) {
      const double p = std::log(t1 / t2) / std::log(k2 / k1);
      const double A = t2 * std::pow(k2, p);
      if (p > 1.0) tail = A * std::pow(k2, 1.0 - p) / (p - 1.0) - 0.5 * t2;
    }
  }
  const double k = 4.0 / std::numbers::pi * specfun::sphere_volume(d) * specfun::sphere_volume(d - 1);
  OracleValue out{"C_" + std::to_string(d), k * (sum + tail), Method::series, k * std::abs(tail) * 0.1};
  out.order = order;
  return out;
}

/// Exact finite-l Defect variance on S^d:
///   Var D_l = (2/pi) mu_d mu_{d-1} int_0^pi arcsin(G_{l;d}(cos t)) sin^{d-1} t dt.
inline double defect_variance_exact(int ell, int d) {
  auto f = [&](double t) {
    const double g = specfun::gegenbauer(ell, d, std::clamp(std::cos(t), -1.0, 1.0));
    return std::asin(std::clamp(g, -1.0, 1.0)) * std::pow(std::sin(t), d - 1);
  };
  const double integral = quad::integrate_composite(f, 0.0, std::numbers::pi, 2 * std::max(ell, 8), 16);
  return 2.0 / std::numbers::pi * specfun::sphere_volume(d) * specfun::sphere_volume(d - 1) * integral;
}

// ---------------------------------------------------------------------------
// Means and leading variances on S^2

struct SphereTargets {
  int ell = 0;
  int d = 2;
  double z = 0.0;
  double area_mean = 0.0;
  double area_var = 0.0;          // leading term z^2 phi(z)^2 mu_d^2 / (2 n)
  double length_mean = 0.0;       // d = 2 only
  double length_var = 0.0;        // leading term (pi^2/2) z^4 e^{-z^2} l, z != 0
  bool nodal = false;             // z == 0: the variance law is logarithmic
  double nodal_var = 0.0;         // (1/32) log l
  double second_chaos_var = 0.0;  // exact variance of the second-chaos projection
};

inline SphereTargets expected_values(int ell, int d, double z) {
  if (ell < 1 || d < 2) throw ConfigError("ell", "need l >= 1 and d >= 2");
  SphereTargets t;
  t.ell = ell;
  t.d = d;
  t.z = z;
  const double mu = specfun::sphere_volume(d);
  const double n = static_cast<double>(specfun::eigenspace_dim(ell, d));
  const double phi = specfun::gauss_pdf(z);
  const double l = ell;
  t.area_mean = mu * specfun::gauss_sf(z);
  t.area_var = z * z * phi * phi * mu * mu / (2.0 * n);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  if (d == 2) {
    t.length_mean = 4.0 * std::numbers::pi * std::exp(-0.5 * z * z) * std::sqrt(l * (l + 1.0)) /
                    (2.0 * std::numbers::sqrt2);
    t.second_chaos_var = l * (l + 1.0) * (2.0 / (2.0 * l + 1.0)) * (pi2 / 2.0) * std::exp(-z * z) * z * z * z * z;
    if (z == 0.0) {
      t.nodal = true;
      t.nodal_var = std::log(l) / 32.0;
    } else {
      t.length_var = pi2 / 2.0 * z * z * z * z * std::exp(-z * z) * l;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Torus constants

/// psi(eta) = (3 + eta) / 8.
inline double psi(double eta) { return (3.0 + eta) / 8.0; }

/// c_n = (1 + mu^2) / 512.
inline double torus_c(double mu_hat4) { return (1.0 + mu_hat4 * mu_hat4) / 512.0; }

/// E[L_n] = sqrt(E_n) / (2 sqrt 2) on the unit torus.
inline double torus_length_mean(long long n) {
  const double E = 4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(n);
  return std::sqrt(E) / (2.0 * std::numbers::sqrt2);
}

/// Leading Var(L_n) = c_n E_n / N_n^2.
inline double torus_length_var(long long n, std::size_t count, double mu_hat4) {
  const double E = 4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(n);
  const double N = static_cast<double>(count);
  return torus_c(mu_hat4) * E / (N * N);
}

/// Covariance of the limit of H(n):
///   [[1, 1/2, 1/2, 0], [1/2, p, 1/2-p, 0], [1/2, 1/2-p, p, 0], [0, 0, 0, 1/2-p]].
inline Eigen::Matrix4d sigma_matrix(double p) {
  Eigen::Matrix4d S;
  S << 1.0, 0.5, 0.5, 0.0,  //
      0.5, p, 0.5 - p, 0.0,  //
      0.5, 0.5 - p, p, 0.0,  //
      0.0, 0.0, 0.0, 0.5 - p;
  return S;
}

/// Var(Z^T A Z) for Z ~ N(0, Sigma(psi)) and A = diag(1, -2, -2, -4):
/// 2 tr((A Sigma)^2).
inline double quadratic_form_variance(double eta) {
  const Eigen::Matrix4d S = sigma_matrix(psi(eta));
  const Eigen::Matrix4d A = Eigen::Vector4d(1.0, -2.0, -2.0, -4.0).asDiagonal();
  const Eigen::Matrix4d AS = A * S;
  return 2.0 * (AS * AS).trace();
}

/// M_eta = 1/(2 sqrt(1+eta^2)) (2 - (1+eta) X1^2 - (1-eta) X2^2) = const + a X1^2 + b X2^2.
struct MEtaLaw {
  double a = 0.0;
  double b = 0.0;

  /// p-th cumulant, p >= 2: 2^{p-1} (p-1)! (a^p + b^p).
  double cumulant(int p) const {
    double f = 1.0;
    for (int k = 2; k < p; ++k) f *= k;
    return std::pow(2.0, p - 1) * f * (std::pow(a, p) + std::pow(b, p));
  }
  double support_max(double eta) const { return 1.0 / std::sqrt(1.0 + eta * eta); }
};

inline MEtaLaw m_eta_law(double eta) {
  const double r = 2.0 * std::sqrt(1.0 + eta * eta);
  return {-(1.0 + eta) / r, -(1.0 - eta) / r};
}

}  // namespace randwave::oracles
