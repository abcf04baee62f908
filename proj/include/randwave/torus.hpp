#pragma once

// Arithmetic random waves on the flat torus R^2 / Z^2:
//
//   T_n(x) = N_n^{-1/2} sum_{|lambda|^2 = n} a_lambda exp(2 pi i <lambda, x>),
//
// with a_{-lambda} = conj(a_lambda), so only the half-plane coefficients
// (lambda_2 > 0, or lambda_2 = 0 and lambda_1 > 0) are drawn.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "randwave/detail/fft.hpp"
#include "randwave/errors.hpp"
#include "randwave/rng.hpp"

namespace randwave::torus {

using Rational = boost::multiprecision::cpp_rational;
using Point = std::pair<long long, long long>;

/// Lambda_n with its cardinality and the fourth angular Fourier coefficient.
struct LatticeSet {
  long long n = 0;
  std::vector<Point> points;       // sorted lexicographically
  std::vector<Point> half;         // half-plane representatives, sorted
  Rational mu_hat4_exact;
  double mu_hat4 = 0.0;

  std::size_t count() const { return points.size(); }
  double energy() const { return 4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(n); }
};

namespace detail {

inline long long isqrt(long long v) {
  if (v < 0) return -1;
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

}  // namespace detail

/// True if n is a sum of two squares.
inline bool representable(long long n) {
  if (n < 0) return false;
  for (long long a = 0; a * a <= n; ++a) {
    const long long b = detail::isqrt(n - a * a);
    if (b * b == n - a * a) return true;
  }
  return false;
}

/// Exhaustive enumeration of {lambda in Z^2 : |lambda|^2 = n}.
inline LatticeSet lattice_points(long long n) {
  if (n < 1) throw ConfigError("n", "energy index must be >= 1");
  LatticeSet L;
  L.n = n;
  for (long long a = 0; a * a <= n; ++a) {
    const long long b = detail::isqrt(n - a * a);
    if (b * b != n - a * a) continue;
    for (long long sa : {1LL, -1LL}) {
      for (long long sb : {1LL, -1LL}) L.points.emplace_back(sa * a, sb * b);
    }
  }
  std::sort(L.points.begin(), L.points.end());
  L.points.erase(std::unique(L.points.begin(), L.points.end()), L.points.end());
  if (L.points.empty()) throw NotRepresentable(n);
  for (const auto& [x, y] : L.points) {
    if (y > 0 || (y == 0 && x > 0)) L.half.emplace_back(x, y);
  }
  // cos(4 theta) = (l1^4 - 6 l1^2 l2^2 + l2^4) / n^2 exactly.
  boost::multiprecision::cpp_int num = 0;
  for (const auto& [x, y] : L.points) {
    const boost::multiprecision::cpp_int x2 = x * x, y2 = y * y;
    num += x2 * x2 - 6 * x2 * y2 + y2 * y2;
  }
  const boost::multiprecision::cpp_int den =
      boost::multiprecision::cpp_int(n) * n * static_cast<long long>(L.points.size());
  L.mu_hat4_exact = Rational(num, den);
  L.mu_hat4 = L.mu_hat4_exact.convert_to<double>();
  return L;
}

/// mu_hat_n(4) by the angular definition (1/N) sum exp(4 i theta_lambda). The
/// imaginary part cancels by symmetry; a residue above 1e-12 is an error.
inline double mu_hat4_angular(const LatticeSet& L) {
  double re = 0.0, im = 0.0;
  for (const auto& [x, y] : L.points) {
    const double t = std::atan2(static_cast<double>(y), static_cast<double>(x));
    re += std::cos(4.0 * t);
    im += std::sin(4.0 * t);
  }
  const double N = static_cast<double>(L.count());
  if (std::abs(im / N) > 1e-12) throw std::logic_error("mu_hat4: imaginary part does not vanish");
  return re / N;
}

/// Smallest representable n in [1, n_max] with N_n >= min_count, or 0.
inline long long smallest_with_count(std::size_t min_count, long long n_max = 100000) {
  for (long long n = 1; n <= n_max; ++n) {
    if (!representable(n)) continue;
    if (lattice_points(n).count() >= min_count) return n;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Coefficients and synthesis

/// Half-plane coefficients, one per entry of LatticeSet::half. Real and
/// imaginary parts are independent with variance 1/2.
struct ToralCoeffs {
  long long n = 0;
  std::vector<std::complex<double>> half;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

inline ToralCoeffs sample_coeffs(const LatticeSet& L, std::uint64_t seed, std::uint64_t replicate) {
  ToralCoeffs c;
  c.n = L.n;
  c.seed = seed;
  c.replicate = replicate;
  c.half.resize(L.half.size());
  const double sd = std::sqrt(0.5);
  for (std::size_t k = 0; k < c.half.size(); ++k) {
    const auto [x, y] = rng::normal_pair(seed, rng::make_counter(k, static_cast<std::uint64_t>(L.n), replicate));
    c.half[k] = {sd * x, sd * y};
  }
  return c;
}

/// N x N samples of T_n on the grid x = (j/N, i/N); values[i*N + j].
/// grad1, grad2 are d/dx1, d/dx2 scaled by sqrt(2/E_n) (unit variance).
struct ToralGrid {
  long long n = 0;
  int size = 0;
  std::vector<double> values;
  std::vector<double> grad1;
  std::vector<double> grad2;

  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) + static_cast<std::size_t>(j)];
  }
};

enum class Method { automatic, direct, fft };

/// Operation-count threshold below which direct summation is used.
inline constexpr double kDirectBudget = 1e8;

inline void check_torus_resolution(long long n, int N) {
  const long long need = 4 * static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (N < need) throw ConfigError("grid", "torus grid needs N >= 4 ceil(sqrt(n)) = " + std::to_string(need));
}

namespace detail {

inline std::vector<std::complex<double>> unit_roots(int N) {
  std::vector<std::complex<double>> w(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) w[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / N);
  return w;
}

inline int wrap(long long v, int N) {
  long long r = v % N;
  return static_cast<int>(r < 0 ? r + N : r);
}

// sum over the half plane of 2 Re(w_lambda a_lambda e(<lambda,x>)) with
// per-mode weights w (complex), separably in x1 and x2.
inline void direct_sum(const LatticeSet& L, const std::vector<std::complex<double>>& amp, int N, double scale,
                       std::vector<double>& out) {
  const auto roots = unit_roots(N);
  out.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0.0);
  std::vector<std::complex<double>> ex(static_cast<std::size_t>(N));
  for (std::size_t k = 0; k < L.half.size(); ++k) {
    const auto [l1, l2] = L.half[k];
    for (int j = 0; j < N; ++j) ex[static_cast<std::size_t>(j)] = roots[static_cast<std::size_t>(wrap(l1 * j, N))];
    for (int i = 0; i < N; ++i) {
      const std::complex<double> row = amp[k] * roots[static_cast<std::size_t>(wrap(l2 * i, N))];
      double* o = out.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(N);
      const double rr = row.real(), ri = row.imag();
      for (int j = 0; j < N; ++j) {
        const auto& e = ex[static_cast<std::size_t>(j)];
        o[j] += rr * e.real() - ri * e.imag();
      }
    }
  }
  for (double& v : out) v *= 2.0 * scale;
}

inline void fft_sum(const LatticeSet& L, const std::vector<std::complex<double>>& amp, int N, double scale,
                    std::vector<double>& out) {
  randwave::detail::InverseFft2d fft(N);
  fft.clear();
  std::complex<double>* buf = fft.data();
  for (std::size_t k = 0; k < L.half.size(); ++k) {
    const auto [l1, l2] = L.half[k];
    buf[static_cast<std::size_t>(wrap(l2, N)) * static_cast<std::size_t>(N) + static_cast<std::size_t>(wrap(l1, N))] +=
        amp[k];
    buf[static_cast<std::size_t>(wrap(-l2, N)) * static_cast<std::size_t>(N) +
        static_cast<std::size_t>(wrap(-l1, N))] += std::conj(amp[k]);
  }
  fft.execute();
  out.resize(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = scale * buf[k].real();
}

}  // namespace detail

inline ToralGrid synthesize(const ToralCoeffs& c, const LatticeSet& L, int N, Method method = Method::automatic,
                            bool with_gradient = false) {
  if (c.n != L.n || c.half.size() != L.half.size()) throw ConfigError("coeffs", "do not match the lattice");
  check_torus_resolution(L.n, N);
  ToralGrid g;
  g.n = L.n;
  g.size = N;
  const double scale = 1.0 / std::sqrt(static_cast<double>(L.count()));
  if (method == Method::automatic) {
    const double ops = static_cast<double>(L.count()) * N * static_cast<double>(N);
    method = ops <= kDirectBudget ? Method::direct : Method::fft;
  }
  auto run = [&](const std::vector<std::complex<double>>& amp, double s, std::vector<double>& out) {
    if (method == Method::direct) {
      detail::direct_sum(L, amp, N, s, out);
    } else {
      detail::fft_sum(L, amp, N, s, out);
    }
  };
  run(c.half, scale, g.values);
  if (with_gradient) {
    // d/dx_k multiplies the mode by 2 pi i lambda_k.
    const double gscale = scale * 2.0 * std::numbers::pi * std::sqrt(2.0 / L.energy());
    std::vector<std::complex<double>> d1(c.half.size()), d2(c.half.size());
    for (std::size_t k = 0; k < c.half.size(); ++k) {
      const std::complex<double> ia = std::complex<double>(0.0, 1.0) * c.half[k];
      d1[k] = ia * static_cast<double>(L.half[k].first);
      d2[k] = ia * static_cast<double>(L.half[k].second);
    }
    run(d1, gscale, g.grad1);
    run(d2, gscale, g.grad2);
  }
  return g;
}

/// Length of {T = z} in the unit square by marching squares with periodic
/// boundaries and the flat metric. Saddles are resolved by the cell mean.
template <class Field>
double level_length_periodic(const Field& value, int N, double z) {
  const double h = 1.0 / N;
  double total = 0.0;
  auto seg = [](double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); };
  for (int i = 0; i < N; ++i) {
    const int i1 = (i + 1 == N) ? 0 : i + 1;
    for (int j = 0; j < N; ++j) {
      const int j1 = (j + 1 == N) ? 0 : j + 1;
      // corners in cyclic order: (i,j), (i,j+1), (i+1,j+1), (i+1,j), local coords (x=j, y=i)
      const double v[4] = {value(i, j), value(i, j1), value(i1, j1), value(i1, j)};
      const bool s0 = v[0] > z;
      if ((v[1] > z) == s0 && (v[2] > z) == s0 && (v[3] > z) == s0) continue;
      static constexpr double cx[4] = {0.0, 1.0, 1.0, 0.0};
      static constexpr double cy[4] = {0.0, 0.0, 1.0, 1.0};
      double px[4], py[4];
      int n = 0;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if ((v[a] > z) != (v[b] > z)) {
          const double t = (z - v[a]) / (v[b] - v[a]);
          px[n] = cx[a] + t * (cx[b] - cx[a]);
          py[n] = cy[a] + t * (cy[b] - cy[a]);
          ++n;
        }
      }
      if (n == 2) {
        total += seg(px[0], py[0], px[1], py[1]);
      } else if (n == 4) {
        const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        if ((centre > z) == s0) {
          total += seg(px[0], py[0], px[1], py[1]) + seg(px[2], py[2], px[3], py[3]);
        } else {
          total += seg(px[3], py[3], px[0], py[0]) + seg(px[1], py[1], px[2], py[2]);
        }
      }
    }
  }
  return total * h;
}

inline double nodal_length(const ToralGrid& g, double z = 0.0) {
  return level_length_periodic([&](int i, int j) { return g.at(i, j); }, g.size, z);
}

/// H(n) = (n sqrt(N_n/2))^{-1} sum_{half plane} (|a|^2 - 1) (n, l1^2, l2^2, l1 l2).
inline std::array<double, 4> h_vector(const ToralCoeffs& c, const LatticeSet& L) {
  if (c.half.size() != L.half.size()) throw ConfigError("coeffs", "do not match the lattice");
  std::array<double, 4> h{0.0, 0.0, 0.0, 0.0};
  const double n = static_cast<double>(L.n);
  for (std::size_t k = 0; k < L.half.size(); ++k) {
    const double w = std::norm(c.half[k]) - 1.0;
    const double l1 = static_cast<double>(L.half[k].first), l2 = static_cast<double>(L.half[k].second);
    h[0] += w * n;
    h[1] += w * l1 * l1;
    h[2] += w * l2 * l2;
    h[3] += w * l1 * l2;
  }
  const double norm = 1.0 / (n * std::sqrt(static_cast<double>(L.count()) / 2.0));
  for (double& v : h) v *= norm;
  return h;
}

// ---------------------------------------------------------------------------
// Limit law M_eta = (2 - (1+eta) X1^2 - (1-eta) X2^2) / (2 sqrt(1+eta^2))

inline double m_eta(double eta, double x1, double x2) {
  return (2.0 - (1.0 + eta) * x1 * x1 - (1.0 - eta) * x2 * x2) / (2.0 * std::sqrt(1.0 + eta * eta));
}

/// Draws M_eta samples first .. first+count-1 of the stream `key`.
inline std::vector<double> sample_m_eta(double eta, std::uint64_t key, std::size_t count, std::uint64_t first = 0) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta", "must lie in [0, 1]");
  constexpr std::uint64_t kTag = 0x4D455441;  // distinguishes this stream's counters
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t idx = first + k;
    const auto [x1, x2] = rng::normal_pair(key, rng::make_counter(idx, kTag, idx >> 32));
    out[k] = m_eta(eta, x1, x2);
  }
  return out;
}

}  // namespace randwave::torus
