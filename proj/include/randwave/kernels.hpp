#pragma once

// Is Levy's Brownian kernel positive definite on a compact group? Equivalently,
// is the bi-invariant distance restricted negative definite? On a group this is
// decided by the character coefficients alpha_l of the distance from the
// identity: the kernel is restricted negative definite iff alpha_l <= 0 for all
// l >= 1. Also: the Gram-matrix test on finite samples, and the Legendre
// coefficients behind the Levy construction on S^2.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "randwave/errors.hpp"
#include "randwave/quadrature.hpp"
#include "randwave/rng.hpp"

namespace randwave::kernels {

// ---------------------------------------------------------------------------
// SO(3)

/// Haar density of the rotation angle on [0, pi]: (1 - cos t) / pi.
inline double rotation_angle_density(double t) { return (1.0 - std::cos(t)) / std::numbers::pi; }

inline double rotation_angle_cdf(double t) { return (t - std::sin(t)) / std::numbers::pi; }

/// Density of tr(g) on [-1, 3] for Haar-random g in SO(3).
inline double trace_density(double y) {
  if (y <= -1.0 || y >= 3.0) return 0.0;
  return std::sqrt(3.0 - y) / (2.0 * std::numbers::pi * std::sqrt(y + 1.0));
}

/// Character of the (2l+1)-dimensional representation: 1 + 2 sum_{m<=l} cos(m t).
inline double so3_character(int ell, double t) {
  double s = 1.0;
  for (int m = 1; m <= ell; ++m) s += 2.0 * std::cos(m * t);
  return s;
}

/// alpha_l = int_0^pi t chi_l(t) p_T(t) dt, by the partial-fraction form
///   (2/pi) (1 + sum_{m=1}^{l} ((-1)^m - 1)/m^2
///              + sum_{m=2}^{l} (m^2+1)/(m^2-1)^2 ((-1)^m + 1)),   l >= 1,
/// and alpha_0 = pi/2 + 2/pi.
inline double so3_alpha(int ell) {
  if (ell < 0) throw ConfigError("ell", "must be >= 0");
  if (ell == 0) return std::numbers::pi / 2.0 + 2.0 / std::numbers::pi;
  double s = 1.0;
  for (int m = 1; m <= ell; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    s += (sign - 1.0) / (static_cast<double>(m) * m);
    if (m >= 2) {
      const double m2 = static_cast<double>(m) * m;
      s += (m2 + 1.0) / ((m2 - 1.0) * (m2 - 1.0)) * (sign + 1.0);
    }
  }
  return 2.0 / std::numbers::pi * s;
}

/// The same coefficient by composite Gauss-Legendre quadrature.
inline double so3_alpha_quadrature(int ell) {
  auto f = [ell](double t) { return t * so3_character(ell, t) * rotation_angle_density(t); };
  return quad::integrate_composite(f, 0.0, std::numbers::pi, 4 * (ell + 1), 24);
}

// ---------------------------------------------------------------------------
// SU(2) ~ S^3

namespace detail {

// int_0^pi t cos(m t) dt
inline double t_cos_integral(int m) {
  if (m == 0) return std::numbers::pi * std::numbers::pi / 2.0;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return (sign - 1.0) / (static_cast<double>(m) * m);
}

}  // namespace detail

/// alpha_l = (1/pi) int_0^pi t sin((l+1)t) sin t dt, from the exact
/// antiderivative: (1/(2 pi)) (I(l) - I(l+2)) with I(m) = int t cos(m t).
/// Closed form: 0 for even l, -(4/pi)(l+1)/(l^2 (l+2)^2) for odd l.
inline double su2_alpha(int ell) {
  if (ell < 1) throw ConfigError("ell", "must be >= 1");
  return (detail::t_cos_integral(ell) - detail::t_cos_integral(ell + 2)) / (2.0 * std::numbers::pi);
}

inline double su2_alpha_quadrature(int ell) {
  auto f = [ell](double t) { return t * std::sin((ell + 1.0) * t) * std::sin(t) / std::numbers::pi; };
  return quad::integrate_composite(f, 0.0, std::numbers::pi, 4 * (ell + 1), 24);
}

// ---------------------------------------------------------------------------
// Verdicts

enum class Space { s2, su2, so3 };

inline const char* space_name(Space s) {
  switch (s) {
    case Space::s2: return "s2";
    case Space::su2: return "su2";
    case Space::so3: return "so3";
  }
  return "?";
}

inline Space parse_space(const std::string& s) {
  if (s == "s2") return Space::s2;
  if (s == "su2" || s == "s3") return Space::su2;
  if (s == "so3") return Space::so3;
  throw ConfigError("space", "unknown space '" + s + "' (expected s2, su2 or so3)");
}

/// Legendre coefficient of arcsin on [-1, 1]:
///   c_l = int arcsin(t) P_l(t) dt = pi ((3*5*...*(l-2)) / (2*4*...*(l+1)))^2, l odd,
/// and 0 for even l. Built from c_1 = pi/4 and c_{l+2} / c_l = (l/(l+3))^2.
/// The geodesic distance arccos = pi/2 - arcsin has the same coefficients up
/// to sign for l >= 1.
inline double arccos_legendre_coeff(int ell) {
  if (ell < 1) throw ConfigError("ell", "must be >= 1");
  if (ell % 2 == 0) return 0.0;
  double c = std::numbers::pi / 4.0;
  for (int l = 1; l < ell; l += 2) {
    const double r = static_cast<double>(l) / (l + 3.0);
    c *= r * r;
  }
  return c;
}

/// Coefficient of the half-sphere indicator in the orthonormal basis,
/// (sqrt(pi)/2) sqrt(2l+1) int_0^1 P_l = (-1)^m (1/2) sqrt(2l+1) sqrt(c_l), l = 2m+1.
inline double halfsphere_coeff(int ell) {
  if (ell < 1) throw ConfigError("ell", "must be >= 1");
  if (ell % 2 == 0) return 0.0;
  const int m = (ell - 1) / 2;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * 0.5 * std::sqrt(2.0 * ell + 1.0) * std::sqrt(arccos_legendre_coeff(ell));
}

struct KernelVerdict {
  Space space = Space::so3;
  std::vector<double> alpha;  // alpha[l], l = 0..lmax (S^2: Legendre coefficients of -d)
  bool restricted_negative_definite = true;
  std::optional<int> witness;  // first l >= 1 with alpha_l > tolerance
};

inline constexpr double kVerdictTolerance = 1e-10;

/// Coefficients up to lmax and the verdict "all alpha_l <= 0 for l >= 1".
/// For S^2 the coefficients are those of -arccos, i.e. -c_l for l >= 1.
inline KernelVerdict character_verdict(Space space, int lmax) {
  if (lmax < 1) throw ConfigError("lmax", "must be >= 1");
  KernelVerdict v;
  v.space = space;
  v.alpha.resize(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) {
    double a = 0.0;
    switch (space) {
      case Space::so3: a = so3_alpha(l); break;
      case Space::su2: a = l == 0 ? std::numbers::pi / 2.0 : su2_alpha(l); break;
      case Space::s2: a = l == 0 ? std::numbers::pi / 2.0 : -arccos_legendre_coeff(l); break;
    }
    v.alpha[static_cast<std::size_t>(l)] = a;
    if (l >= 1 && a > kVerdictTolerance && !v.witness) {
      v.witness = l;
      v.restricted_negative_definite = false;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Gram-matrix test

struct GramResult {
  double max_eigenvalue = 0.0;  // on the zero-sum subspace
  bool restricted_negative_definite = true;
  bool degenerate = false;      // repeated points
};

/// Largest eigenvalue of D restricted to {xi : sum xi = 0}. The all-ones
/// direction is deflated with a Householder reflection H (H 1 ~ e_1), after
/// which the trailing (n-1) x (n-1) block of H D H is the restriction.
inline GramResult zero_sum_max_eigenvalue(const Eigen::MatrixXd& D) {
  const Eigen::Index n = D.rows();
  if (n < 2 || D.cols() != n) throw ConfigError("points", "need a square matrix of at least 2 points");
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  v(0) += 1.0;  // v = u + e_1 with u the unit ones vector; H = I - 2 v v^T / |v|^2
  const double vv = v.squaredNorm();
  const Eigen::VectorXd Dv = D * v;
  const double vDv = v.dot(Dv);
  // H D H = D - (2/vv)(v (Dv)^T + Dv v^T) + (4 vDv / vv^2) v v^T
  Eigen::MatrixXd M = D - (2.0 / vv) * (v * Dv.transpose() + Dv * v.transpose()) + (4.0 * vDv / (vv * vv)) * v * v.transpose();
  const Eigen::MatrixXd block = M.bottomRightCorner(n - 1, n - 1);
  GramResult r;
  if (n - 1 == 1) {
    r.max_eigenvalue = block(0, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (block + block.transpose()), Eigen::EigenvaluesOnly);
    r.max_eigenvalue = es.eigenvalues().maxCoeff();
  }
  r.restricted_negative_definite = r.max_eigenvalue <= kVerdictTolerance;
  return r;
}

template <class P>
GramResult gram_restricted_nd_test(const std::vector<P>& points, const std::function<double(const P&, const P&)>& dist) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 2) throw ConfigError("points", "need at least 2 points");
  Eigen::MatrixXd D(n, n);
  bool degenerate = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    D(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = dist(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      if (d == 0.0) degenerate = true;
      D(i, j) = D(j, i) = d;
    }
  }
  GramResult r = zero_sum_max_eigenvalue(D);
  r.degenerate = degenerate;
  return r;
}

using Vec3 = std::array<double, 3>;
using Rotation = std::array<double, 9>;  // row-major

inline double sphere_distance(const Vec3& a, const Vec3& b) {
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

/// Uniform points on S^2 from normalized Gaussian triples.
inline std::vector<Vec3> random_sphere_points(std::size_t count, std::uint64_t seed) {
  std::vector<Vec3> pts(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto [x, y] = rng::normal_pair(seed, rng::make_counter(k, 0x5332, 0));
    const auto [z, unused] = rng::normal_pair(seed, rng::make_counter(k, 0x5332, 1));
    (void)unused;
    const double r = std::sqrt(x * x + y * y + z * z);
    pts[k] = {x / r, y / r, z / r};
  }
  return pts;
}

/// Inverse of the rotation-angle cdf (t - sin t)/pi, by safeguarded Newton.
inline double rotation_angle_quantile(double u) {
  double lo = 0.0, hi = std::numbers::pi;
  double t = std::cbrt(6.0 * std::numbers::pi * u);  // small-t inversion of t^3/6
  t = std::clamp(t, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double f = rotation_angle_cdf(t) - u;
    if (f > 0) hi = t; else lo = t;
    const double fp = rotation_angle_density(t);
    double next = fp > 0 ? t - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-15) return next;
    t = next;
  }
  return t;
}

/// Haar-random rotations: angle from the Haar angle law, axis uniform on S^2.
inline std::vector<Rotation> random_rotations(std::size_t count, std::uint64_t seed) {
  const auto axes = random_sphere_points(count, rng::mix64(seed));
  std::vector<Rotation> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto [u, unused] = rng::uniform_pair(seed, rng::make_counter(k, 0x534F33, 0));
    (void)unused;
    const double t = rotation_angle_quantile(u);
    const auto& a = axes[k];
    const double c = std::cos(t), s = std::sin(t), C = 1.0 - c;
    out[k] = {c + a[0] * a[0] * C,        a[0] * a[1] * C - a[2] * s, a[0] * a[2] * C + a[1] * s,
              a[1] * a[0] * C + a[2] * s, c + a[1] * a[1] * C,        a[1] * a[2] * C - a[0] * s,
              a[2] * a[0] * C - a[1] * s, a[2] * a[1] * C + a[0] * s, c + a[2] * a[2] * C};
  }
  return out;
}

/// Bi-invariant distance arccos((tr(g h^T) - 1) / 2).
inline double rotation_distance(const Rotation& g, const Rotation& h) {
  double tr = 0.0;
  for (int i = 0; i < 9; ++i) tr += g[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
  return std::acos(std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
}

}  // namespace randwave::kernels
