#pragma once

// Random degree-l eigenfunctions on S^2 in the real spherical-harmonic basis
//
//   T(theta, phi) = sum_m a_m Y_m(theta, phi),
//   Y_0 = P_0(cos theta),  Y_{m,c} = sqrt2 P_m cos(m phi),  Y_{m,s} = sqrt2 P_m sin(m phi),
//
// where P_m is the associated Legendre function of degree l normalized so that
// every Y is orthonormal on the sphere. With Var a_m = 4 pi / (2l+1) this gives
// E T(x)^2 = 1 and Cov(T(x), T(y)) = P_l(<x, y>).
//
// Grids are Gauss-Legendre in cos(theta) (rows ordered by increasing theta) and
// uniform in phi. Each row is one inverse real FFT.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "randwave/detail/fft.hpp"
#include "randwave/errors.hpp"
#include "randwave/quadrature.hpp"
#include "randwave/rng.hpp"

namespace randwave::sphere {

/// Real-basis coefficients of one replicate. Layout: values[0] = a_0,
/// values[2m-1] = cosine coefficient, values[2m] = sine coefficient.
struct HarmonicCoeffs {
  int ell = 0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

  double variance() const { return 4.0 * std::numbers::pi / (2.0 * ell + 1.0); }
  double cos_coeff(int m) const { return values[static_cast<std::size_t>(2 * m - 1)]; }
  double sin_coeff(int m) const { return values[static_cast<std::size_t>(2 * m)]; }
};

/// Draws the 2l+1 coefficients for (seed, replicate, l). Coefficient m uses
/// counter block (m / 2, l, replicate), so the draw is a pure function of those.
inline HarmonicCoeffs sample_coeffs(int ell, std::uint64_t seed, std::uint64_t replicate) {
  if (ell < 1) throw ConfigError("ell", "degree must be >= 1 (constant field excluded)");
  HarmonicCoeffs c;
  c.ell = ell;
  c.seed = seed;
  c.replicate = replicate;
  const std::size_t n = 2 * static_cast<std::size_t>(ell) + 1;
  c.values.resize(n);
  const double sd = std::sqrt(c.variance());
  for (std::size_t k = 0; k < n; k += 2) {
    const auto [g1, g2] =
        rng::normal_pair(seed, rng::make_counter(k / 2, static_cast<std::uint64_t>(ell), replicate));
    c.values[k] = sd * g1;
    if (k + 1 < n) c.values[k + 1] = sd * g2;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Grid layout

struct GridSpec {
  int n_theta = 0;  // 0: derived from samples_per_wavelength
  int n_phi = 0;
  double samples_per_wavelength = 12.0;
  bool with_gradient = false;
};

namespace detail {

// Smallest 2^a 3^b 5^c >= n (FFT-friendly sizes).
inline int smooth_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace detail

/// Concrete grid sizes for degree l. Explicit sizes in `spec` win; otherwise
/// n_phi ~ spw * sqrt(l(l+1)) and n_theta = n_phi / 2, both lifted to the
/// anti-aliasing floor n_phi >= 2(2l+1), n_theta >= 2(l+1).
inline std::pair<int, int> resolve_grid(int ell, const GridSpec& spec) {
  if (ell < 1) throw ConfigError("ell", "degree must be >= 1");
  const int floor_phi = 2 * (2 * ell + 1);
  const int floor_theta = 2 * (ell + 1);
  int n_phi = spec.n_phi;
  int n_theta = spec.n_theta;
  if (n_phi == 0) {
    if (!(spec.samples_per_wavelength > 0.0)) {
      throw ConfigError("samples_per_wavelength", "must be positive");
    }
    const double k = std::sqrt(static_cast<double>(ell) * (ell + 1.0));
    n_phi = std::max(static_cast<int>(std::ceil(spec.samples_per_wavelength * k)), floor_phi);
    n_phi = 2 * detail::smooth_size((n_phi + 1) / 2);
  }
  if (n_theta == 0) n_theta = std::max(n_phi / 2, floor_theta);
  if (n_phi < floor_phi) {
    throw ConfigError("n_phi", "must be >= 2(2l+1) = " + std::to_string(floor_phi));
  }
  if (n_theta < floor_theta) {
    throw ConfigError("n_theta", "must be >= 2(l+1) = " + std::to_string(floor_theta));
  }
  if (n_phi % 2 != 0) throw ConfigError("n_phi", "must be even");
  return {n_theta, n_phi};
}

/// Sampled field on a latitude-longitude grid. Row i is colatitude
/// acos(cos_theta[i]); column j is phi = 2 pi j / n_phi. grad1/grad2 are the
/// normalized derivatives d_theta T and (1/sin theta) d_phi T, each scaled by
/// sqrt(2 / (l(l+1))) so that they have unit variance. They are empty unless
/// requested.
struct SphereGrid {
  int ell = 0;
  int n_theta = 0;
  int n_phi = 0;
  std::uint64_t seed = 0;
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;
  std::vector<double> weights;  // per row: Gauss weight * 2 pi / n_phi
  std::vector<double> values;
  std::vector<double> grad1;
  std::vector<double> grad2;
  double north = 0.0;  // field value at theta = 0
  double south = 0.0;  // field value at theta = pi

  double value(int i, int j) const {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_phi) + static_cast<std::size_t>(j)];
  }
  double phi(int j) const { return 2.0 * std::numbers::pi * j / n_phi; }
  double theta(int i) const { return std::acos(cos_theta[static_cast<std::size_t>(i)]); }

  /// Sum of weights * f(value) over all nodes.
  template <class F>
  double integrate(F&& f) const {
    double total = 0.0;
    for (int i = 0; i < n_theta; ++i) {
      const double* row = values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_phi);
      double s = 0.0;
      for (int j = 0; j < n_phi; ++j) s += f(row[j]);
      total += weights[static_cast<std::size_t>(i)] * s;
    }
    return total;
  }

  /// Pointwise negation, e.g. for complement-symmetry checks.
  SphereGrid negated() const {
    SphereGrid g = *this;
    for (double& v : g.values) v = -v;
    for (double& v : g.grad1) v = -v;
    for (double& v : g.grad2) v = -v;
    g.north = -north;
    g.south = -south;
    return g;
  }
};

namespace detail {

// Gauss-Legendre rows in increasing theta.
inline void fill_rows(SphereGrid& g) {
  const quad::Rule& rule = quad::gauss_legendre(g.n_theta);
  g.cos_theta.resize(static_cast<std::size_t>(g.n_theta));
  g.sin_theta.resize(static_cast<std::size_t>(g.n_theta));
  g.weights.resize(static_cast<std::size_t>(g.n_theta));
  const double dphi = 2.0 * std::numbers::pi / g.n_phi;
  for (int i = 0; i < g.n_theta; ++i) {
    const auto src = static_cast<std::size_t>(g.n_theta - 1 - i);
    const double x = rule.nodes[src];
    g.cos_theta[static_cast<std::size_t>(i)] = x;
    g.sin_theta[static_cast<std::size_t>(i)] = std::sqrt((1.0 - x) * (1.0 + x));
    g.weights[static_cast<std::size_t>(i)] = rule.weights[src] * dphi;
  }
}

}  // namespace detail


/// Orthonormal associated Legendre values P_l^m(cos theta), m = 0..l, and their
/// theta derivatives, for one fixed degree l at every row of a grid. Built once
/// per (l, n_theta) and shared read-only.
class LegendreTable {
 public:
  LegendreTable(int ell, int n_theta) : ell_(ell), n_theta_(n_theta) {
    SphereGrid rows;
    rows.n_theta = n_theta;
    rows.n_phi = 2;
    detail::fill_rows(rows);
    const std::size_t width = static_cast<std::size_t>(ell) + 1;
    p_.assign(width * static_cast<std::size_t>(n_theta), 0.0);
    dp_.assign(width * static_cast<std::size_t>(n_theta), 0.0);
    for (int i = 0; i < n_theta; ++i) {
      const auto r = static_cast<std::size_t>(i);
      fill_row(ell, rows.cos_theta[r], rows.sin_theta[r], p_.data() + width * r, dp_.data() + width * r);
    }
  }

  int ell() const { return ell_; }
  int n_theta() const { return n_theta_; }
  const double* p(int row) const { return p_.data() + width() * static_cast<std::size_t>(row); }
  const double* dp(int row) const { return dp_.data() + width() * static_cast<std::size_t>(row); }

  static std::shared_ptr<const LegendreTable> get(int ell, int n_theta) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const LegendreTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{ell, n_theta}];
    if (!slot) slot = std::make_shared<const LegendreTable>(ell, n_theta);
    return slot;
  }

  /// Writes P_l^m(x) and dP_l^m/dtheta into p[0..l], dp[0..l] for x = cos theta,
  /// s = sin theta > 0. The forward recurrence in degree runs on a rescaled
  /// value whose scale is carried as a logarithm, so sin(theta)^m cannot
  /// underflow before the recurrence has grown it back.
  static void fill_row(int ell, double x, double s, double* p, double* dp) {
    constexpr double kBig = 1e150;
    const double log_big = std::log(kBig);
    const double log_s = std::log(s);
    double log_pmm = -0.5 * std::log(4.0 * std::numbers::pi);
    for (int m = 0; m <= ell; ++m) {
      if (m > 0) log_pmm += 0.5 * std::log((2.0 * m + 1.0) / (2.0 * m)) + log_s;
      const double m2 = static_cast<double>(m) * m;
      double prev = 0.0;  // degree l-1
      double cur = 1.0;   // degree m, then upward
      double log_scale = log_pmm;
      if (ell > m) {
        prev = cur;
        cur = std::sqrt(2.0 * m + 3.0) * x;
        for (int l = m + 2; l <= ell; ++l) {
          const double l2 = static_cast<double>(l) * l;
          const double lm1 = l - 1.0;
          const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
          const double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
          const double next = a * (x * cur - b * prev);
          prev = cur;
          cur = next;
          if (std::abs(cur) > kBig) {
            cur /= kBig;
            prev /= kBig;
            log_scale += log_big;
          }
        }
      }
      const double l = ell;
      const double c = ell > m ? std::sqrt((2.0 * l + 1.0) * (l * l - m2) / (2.0 * l - 1.0)) : 0.0;
      const double scale = log_scale < -700.0 ? 0.0 : std::exp(log_scale);
      p[m] = cur * scale;
      dp[m] = (l * x * cur - c * prev) * scale / s;
    }
  }

 private:
  std::size_t width() const { return static_cast<std::size_t>(ell_) + 1; }

  int ell_;
  int n_theta_;
  std::vector<double> p_;
  std::vector<double> dp_;
};

/// Reusable synthesizer for one (l, grid) pair. Holds FFT workspaces, so one
/// instance per thread; the Legendre table underneath is shared.
class Synthesizer {
 public:
  Synthesizer(int ell, const GridSpec& spec) : ell_(ell), spec_(spec) {
    std::tie(n_theta_, n_phi_) = resolve_grid(ell, spec);
    table_ = LegendreTable::get(ell, n_theta_);
    fft_ = std::make_unique<randwave::detail::InverseRealFft>(n_phi_);
    layout_.ell = ell;
    layout_.n_theta = n_theta_;
    layout_.n_phi = n_phi_;
    detail::fill_rows(layout_);
  }

  int ell() const { return ell_; }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }

  SphereGrid operator()(const HarmonicCoeffs& c) {
    if (c.ell != ell_) throw ConfigError("ell", "coefficients do not match the synthesizer degree");
    if (c.values.size() != 2 * static_cast<std::size_t>(ell_) + 1) {
      throw ConfigError("values", "expected 2l+1 coefficients");
    }
    SphereGrid g = layout_;
    g.seed = c.seed;
    const std::size_t cells = static_cast<std::size_t>(n_theta_) * static_cast<std::size_t>(n_phi_);
    g.values.resize(cells);
    const double l = ell_;
    const double grad_norm = std::sqrt(2.0 / (l * (l + 1.0)));
    if (spec_.with_gradient) {
      g.grad1.resize(cells);
      g.grad2.resize(cells);
    }
    const double rs2 = 1.0 / std::numbers::sqrt2;
    for (int i = 0; i < n_theta_; ++i) {
      const double* p = table_->p(i);
      double* out = g.values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_phi_);
      run_row(c, p, [&](int m) { return std::complex<double>(c.cos_coeff(m), -c.sin_coeff(m)) * rs2; }, 1.0, out);
      if (!spec_.with_gradient) continue;
      const double* dp = table_->dp(i);
      double* g1 = g.grad1.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_phi_);
      double* g2 = g.grad2.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_phi_);
      run_row(c, dp, [&](int m) { return std::complex<double>(c.cos_coeff(m), -c.sin_coeff(m)) * rs2; },
              grad_norm, g1);
      // d/dphi multiplies mode m by i m; the m = 0 term drops out.
      const double inv_s = grad_norm / g.sin_theta[static_cast<std::size_t>(i)];
      run_row(c, p,
              [&](int m) { return std::complex<double>(c.sin_coeff(m), c.cos_coeff(m)) * (rs2 * m); },
              inv_s, g2, /*drop_zero=*/true);
    }
    const double pole = c.values[0] * std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi));
    g.north = pole;
    g.south = (ell_ % 2 == 0) ? pole : -pole;
    return g;
  }

 private:
  template <class Mode>
  void run_row(const HarmonicCoeffs& c, const double* p, Mode mode, double scale, double* out,
               bool drop_zero = false) {
    fft_->clear_input();
    std::complex<double>* x = fft_->input();
    x[0] = drop_zero ? 0.0 : c.values[0] * p[0];
    for (int m = 1; m <= ell_; ++m) x[m] = mode(m) * p[m];
    fft_->execute();
    const double* y = fft_->output();
    for (int j = 0; j < n_phi_; ++j) out[j] = scale * y[j];
  }

  int ell_;
  GridSpec spec_;
  int n_theta_ = 0;
  int n_phi_ = 0;
  std::shared_ptr<const LegendreTable> table_;
  std::unique_ptr<randwave::detail::InverseRealFft> fft_;
  SphereGrid layout_;
};

/// One-shot synthesis; prefer a Synthesizer when producing many replicates.
inline SphereGrid synthesize(const HarmonicCoeffs& c, const GridSpec& spec = {}) {
  Synthesizer s(c.ell, spec);
  return s(c);
}

/// Samples an arbitrary function f(theta, phi) on the grid of degree `ell`
/// (used for analytic calibration fields).
inline SphereGrid sample_function(int ell, const GridSpec& spec,
                                  const std::function<double(double, double)>& f) {
  SphereGrid g;
  g.ell = ell;
  std::tie(g.n_theta, g.n_phi) = resolve_grid(ell, spec);
  detail::fill_rows(g);
  g.values.resize(static_cast<std::size_t>(g.n_theta) * static_cast<std::size_t>(g.n_phi));
  for (int i = 0; i < g.n_theta; ++i) {
    const double th = g.theta(i);
    for (int j = 0; j < g.n_phi; ++j) {
      g.values[static_cast<std::size_t>(i) * static_cast<std::size_t>(g.n_phi) + static_cast<std::size_t>(j)] =
          f(th, g.phi(j));
    }
  }
  g.north = f(0.0, 0.0);
  g.south = f(std::numbers::pi, 0.0);
  return g;
}

/// Real spherical harmonic Y_k of degree l at (theta, phi), k in the
/// coefficient layout above.
inline double real_harmonic(int ell, int k, double theta, double phi) {
  std::vector<double> p(static_cast<std::size_t>(ell) + 1);
  std::vector<double> dp(p.size());
  const double s = std::max(std::sin(theta), 1e-300);
  LegendreTable::fill_row(ell, std::cos(theta), s, p.data(), dp.data());
  if (k == 0) return p[0];
  const int m = (k + 1) / 2;
  const double trig = (k % 2 == 1) ? std::cos(m * phi) : std::sin(m * phi);
  return std::numbers::sqrt2 * p[static_cast<std::size_t>(m)] * trig;
}

// Binary dump: int64 l, int64 n_theta, int64 n_phi, uint64 seed, then the
// values row-major as little-endian float64.
inline void write_grid(std::ostream& os, const SphereGrid& g) {
  auto put_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
  };
  put_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(g.ell)));
  put_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(g.n_theta)));
  put_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(g.n_phi)));
  put_u64(g.seed);
  for (double v : g.values) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, 8);
    put_u64(bits);
  }
}

}  // namespace randwave::sphere
