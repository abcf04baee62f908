#pragma once

// Geometric functionals of a sampled spherical field: excursion area, Defect,
// level-curve length (marching squares), Hermite functionals and the explicit
// second-chaos projection of the length.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "randwave/errors.hpp"
#include "randwave/specfun.hpp"
#include "randwave/sphere.hpp"

namespace randwave::geom {

enum class Kind { area, defect, length, hermite };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::area: return "area";
    case Kind::defect: return "defect";
    case Kind::length: return "length";
    case Kind::hermite: return "hermite";
  }
  return "?";
}

/// One measured functional. `order` is q for Hermite functionals.
struct FunctionalSample {
  Kind kind = Kind::area;
  double z = 0.0;
  int order = 0;
  double value = 0.0;
  int ell = 0;
  int n_theta = 0;
  int n_phi = 0;
};

/// Quadrature of the indicator 1(T > z) with the grid weights.
inline double excursion_area(const sphere::SphereGrid& g, double z) {
  return g.integrate([z](double v) { return v > z ? 1.0 : 0.0; });
}

/// Positive area minus negative area: 2 S(0) - 4 pi.
inline double defect(const sphere::SphereGrid& g) {
  return 2.0 * excursion_area(g, 0.0) - 4.0 * std::numbers::pi;
}

/// Quadrature of H_q(T).
inline double hermite_functional(const sphere::SphereGrid& g, int q) {
  if (q < 0) throw ConfigError("q", "Hermite order must be >= 0");
  return g.integrate([q](double v) { return specfun::hermite(q, v); });
}

/// Second-chaos projection of the length of the z-level curve, computed from
/// the coefficients:
///   sqrt(l(l+1)/2) sqrt(pi/8) phi(z) z^2 sum_m (a_m^2 - 4 pi/(2l+1)).
inline double second_chaos_length(const sphere::HarmonicCoeffs& c, double z) {
  if (c.ell < 1) throw ConfigError("ell", "degree must be >= 1");
  const double var = c.variance();
  double centered = 0.0;
  for (double a : c.values) centered += a * a - var;
  const double l = c.ell;
  return std::sqrt(l * (l + 1.0) / 2.0) * std::sqrt(std::numbers::pi / 8.0) * specfun::gauss_pdf(z) * z * z *
         centered;
}

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 crossing(const Vec3& a, double va, const Vec3& b, double vb, double z) {
  const double t = (z - va) / (vb - va);
  Vec3 p{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
  const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  return {p[0] / n, p[1] / n, p[2] / n};
}

// Great-circle distance between unit vectors, from the chord.
inline double arc(const Vec3& p, const Vec3& q) {
  const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
  const double chord = std::sqrt(dx * dx + dy * dy + dz * dz);
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

// Level-set length inside one triangle (0 or 2 crossings).
inline double triangle_length(const Vec3* p, const double* v, double z) {
  Vec3 pts[2];
  int n = 0;
  for (int e = 0; e < 3; ++e) {
    const int a = e, b = (e + 1) % 3;
    if ((v[a] > z) != (v[b] > z)) pts[n++] = crossing(p[a], v[a], p[b], v[b], z);
  }
  return n == 2 ? arc(pts[0], pts[1]) : 0.0;
}

// Level-set length inside one quad cell with corners in cyclic order.
// Ambiguous saddles are resolved with the mean of the four corners.
inline double quad_length(const Vec3* p, const double* v, double z) {
  Vec3 pts[4];
  int n = 0;
  for (int e = 0; e < 4; ++e) {
    const int a = e, b = (e + 1) % 4;
    if ((v[a] > z) != (v[b] > z)) pts[n++] = crossing(p[a], v[a], p[b], v[b], z);
  }
  if (n == 2) return arc(pts[0], pts[1]);
  if (n != 4) return 0.0;
  // Crossings are on edges 0,1,2,3 in order. If the centre is on the side of
  // corner 0, corners 1 and 3 are cut off: join (e0,e1) and (e2,e3).
  // Otherwise corners 0 and 2 are cut off: join (e3,e0) and (e1,e2).
  const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
  if ((centre > z) == (v[0] > z)) return arc(pts[0], pts[1]) + arc(pts[2], pts[3]);
  return arc(pts[3], pts[0]) + arc(pts[1], pts[2]);
}

}  // namespace detail

/// Minimum samples per wavelength 2 pi / sqrt(l(l+1)) along both grid axes.
inline constexpr double kMinSamplesPerWavelength = 4.0;

inline void check_length_resolution(const sphere::SphereGrid& g) {
  if (g.ell < 1) return;  // analytic calibration fields carry their own scale
  const double k = std::sqrt(static_cast<double>(g.ell) * (g.ell + 1.0));
  const double along_phi = g.n_phi / k;          // samples per wavelength on the equator
  const double along_theta = 2.0 * g.n_theta / k;
  if (along_phi < kMinSamplesPerWavelength) {
    throw ConfigError("n_phi", "level length needs >= 4 samples per wavelength");
  }
  if (along_theta < kMinSamplesPerWavelength) {
    throw ConfigError("n_theta", "level length needs >= 4 samples per wavelength");
  }
}

/// Total geodesic length of {T = z} by marching squares over the (theta, phi)
/// grid, periodic in phi. Crossings are interpolated linearly between the
/// corner unit vectors and segment lengths are great-circle arcs; the polar
/// caps are closed with triangle fans to the pole value.
inline double level_length(const sphere::SphereGrid& g, double z) {
  check_length_resolution(g);
  using detail::Vec3;
  const int nt = g.n_theta, np = g.n_phi;
  std::vector<double> cphi(static_cast<std::size_t>(np)), sphi(static_cast<std::size_t>(np));
  for (int j = 0; j < np; ++j) {
    cphi[static_cast<std::size_t>(j)] = std::cos(g.phi(j));
    sphi[static_cast<std::size_t>(j)] = std::sin(g.phi(j));
  }
  auto vertex = [&](int i, int j) -> Vec3 {
    const double s = g.sin_theta[static_cast<std::size_t>(i)];
    return {s * cphi[static_cast<std::size_t>(j)], s * sphi[static_cast<std::size_t>(j)],
            g.cos_theta[static_cast<std::size_t>(i)]};
  };
  double total = 0.0;
  for (int i = 0; i + 1 < nt; ++i) {
    const double* r0 = g.values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(np);
    const double* r1 = r0 + np;
    for (int j = 0; j < np; ++j) {
      const int k = (j + 1 == np) ? 0 : j + 1;
      const double v[4] = {r0[j], r0[k], r1[k], r1[j]};
      const bool s0 = v[0] > z;
      if ((v[1] > z) == s0 && (v[2] > z) == s0 && (v[3] > z) == s0) continue;
      const Vec3 p[4] = {vertex(i, j), vertex(i, k), vertex(i + 1, k), vertex(i + 1, j)};
      total += detail::quad_length(p, v, z);
    }
  }
  // Polar caps.
  const Vec3 north{0.0, 0.0, 1.0}, south{0.0, 0.0, -1.0};
  const double* top = g.values.data();
  const double* bottom = g.values.data() + static_cast<std::size_t>(nt - 1) * static_cast<std::size_t>(np);
  for (int j = 0; j < np; ++j) {
    const int k = (j + 1 == np) ? 0 : j + 1;
    {
      const double v[3] = {g.north, top[j], top[k]};
      if (!((v[0] > z) == (v[1] > z) && (v[1] > z) == (v[2] > z))) {
        const Vec3 p[3] = {north, vertex(0, j), vertex(0, k)};
        total += detail::triangle_length(p, v, z);
      }
    }
    {
      const double v[3] = {g.south, bottom[k], bottom[j]};
      if (!((v[0] > z) == (v[1] > z) && (v[1] > z) == (v[2] > z))) {
        const Vec3 p[3] = {south, vertex(nt - 1, k), vertex(nt - 1, j)};
        total += detail::triangle_length(p, v, z);
      }
    }
  }
  return total;
}

}  // namespace randwave::geom
