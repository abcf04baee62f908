#pragma once

// Wiener-chaos coefficient families for the level-length, excursion-area and
// Defect expansions.
//
//   beta_l(z)      Hermite coefficients of the Dirac mass at z
//   alpha_{a,b}    Hermite coefficients of the Euclidean norm in R^2
//   J_q(z)         Hermite coefficients of the indicator 1(x > z)
//   J_{2k+1}(D)    Hermite coefficients of the sign function

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "randwave/specfun.hpp"

namespace randwave::chaos {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline double beta(int l, double z) {
  if (l < 0) throw std::domain_error("beta: negative order");
  return specfun::gauss_pdf(z) * specfun::hermite(l, z);
}

inline BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Integer coefficients c_j of p_N(x) = sum_j c_j x^j,
/// c_j = (-1)^{j+N} C(N,j) (2j+1)!/(j!)^2.
inline std::vector<BigInt> p_poly_coefficients(int N) {
  if (N < 0) throw std::domain_error("p_poly: negative order");
  std::vector<BigInt> c(static_cast<std::size_t>(N + 1));
  for (int j = 0; j <= N; ++j) {
    const BigInt fj = factorial(j);
    BigInt v = binomial(N, j) * factorial(2 * j + 1) / (fj * fj);
    if ((j + N) % 2 != 0) v = -v;
    c[static_cast<std::size_t>(j)] = v;
  }
  return c;
}

/// p_N(x) as an exact rational for a dyadic x = num / 2^shift.
inline BigRational p_poly_exact(int N, const BigInt& num, unsigned shift) {
  const auto c = p_poly_coefficients(N);
  // sum_j c_j num^j 2^{shift (N-j)} / 2^{shift N}
  BigInt acc = 0;
  BigInt xpow = 1;
  for (int j = 0; j <= N; ++j) {
    acc += c[static_cast<std::size_t>(j)] * xpow * (BigInt(1) << (shift * static_cast<unsigned>(N - j)));
    xpow *= num;
  }
  return BigRational(acc, BigInt(1) << (shift * static_cast<unsigned>(N)));
}

/// p_N(x) evaluated exactly (every finite double is a dyadic rational) and
/// rounded once to double.
inline double p_poly(int N, double x) {
  if (N < 0) throw std::domain_error("p_poly: negative order");
  if (!std::isfinite(x)) throw std::domain_error("p_poly: non-finite argument");
  if (x == 0.0) return (N % 2 == 0) ? 1.0 : -1.0;
  int exp2 = 0;
  const double mant = std::frexp(x, &exp2);  // x = mant * 2^exp2, |mant| in [0.5, 1)
  const auto m53 = static_cast<long long>(std::ldexp(mant, 53));
  const int e = exp2 - 53;  // x = m53 * 2^e exactly
  BigInt num = m53;
  unsigned shift = 0;
  if (e >= 0) {
    num <<= static_cast<unsigned>(e);
  } else {
    shift = static_cast<unsigned>(-e);
  }
  return p_poly_exact(N, num, shift).convert_to<double>();
}

/// Exact rational part of alpha_{2n,2m}: (2n)!(2m)!/(n! m! 2^{n+m}) p_{n+m}(1/4).
inline BigRational alpha_rational(int n, int m) {
  const BigRational p = p_poly_exact(n + m, BigInt(1), 2);
  const BigRational pre(factorial(2 * n) * factorial(2 * m),
                        factorial(n) * factorial(m) * (BigInt(1) << static_cast<unsigned>(n + m)));
  return pre * p;
}

/// alpha_{a,b}: zero unless both orders are even; otherwise
/// sqrt(pi/2) (2n)!(2m)!/(n! m!) 2^{-(n+m)} p_{n+m}(1/4) with a = 2n, b = 2m.
inline double alpha(int a, int b) {
  if (a < 0 || b < 0) throw std::domain_error("alpha: negative order");
  if (a % 2 != 0 || b % 2 != 0) return 0.0;
  const double r = alpha_rational(a / 2, b / 2).convert_to<double>();
  return std::sqrt(std::numbers::pi / 2.0) * r;
}

/// J_q(z) = E[1(Z > z) H_q(Z)]: J_0 = 1 - Phi(z), J_q = phi(z) H_{q-1}(z).
inline double indicator_chaos(int q, double z) {
  if (q < 0) throw std::domain_error("indicator_chaos: negative order");
  if (q == 0) return specfun::gauss_sf(z);
  return specfun::gauss_pdf(z) * specfun::hermite(q - 1, z);
}

/// (2k-1)!! with (-1)!! = 1.
inline double odd_double_factorial(int k) {
  double r = 1.0;
  for (int i = 3; i <= 2 * k - 1; i += 2) r *= i;
  return r;
}

/// Hermite coefficient of the sign function at odd order 2k+1:
/// E[sign(Z) H_{2k+1}(Z)] = 2 phi(0) H_{2k}(0) = sqrt(2/pi) (-1)^k (2k-1)!!.
inline double defect_chaos(int k) {
  if (k < 1) throw std::domain_error("defect_chaos: k must be >= 1");
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return std::sqrt(2.0 / std::numbers::pi) * sign * odd_double_factorial(k);
}

/// Sign-function coefficient for any order q (zero for even q).
inline double defect_chaos_order(int q) {
  if (q < 0) throw std::domain_error("defect_chaos_order: negative order");
  if (q % 2 == 0) return 0.0;
  if (q == 1) return std::sqrt(2.0 / std::numbers::pi);
  return defect_chaos((q - 1) / 2);
}

/// Memoized coefficient table. Lookups and insertions are serialized, so a
/// single table can be shared by workers.
class ChaosTable {
 public:
  /// Truncation order of the length expansion; the reliable radius is not
  /// known, so callers choose it.
  explicit ChaosTable(int max_order = 6) : max_order_(max_order) {
    if (max_order < 0) throw std::domain_error("ChaosTable: negative truncation order");
  }

  int max_order() const { return max_order_; }

  double alpha(int a, int b) const {
    return memo(alpha_, std::make_tuple(a, b, 0.0), [&] { return chaos::alpha(a, b); });
  }
  double beta(int l, double z) const {
    return memo(beta_, std::make_tuple(l, 0, z), [&] { return chaos::beta(l, z); });
  }
  double indicator(int q, double z) const {
    return memo(ind_, std::make_tuple(q, 0, z), [&] { return chaos::indicator_chaos(q, z); });
  }
  double defect(int q) const {
    return memo(def_, std::make_tuple(q, 0, 0.0), [&] { return chaos::defect_chaos_order(q); });
  }

  std::size_t cached_entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return alpha_.size() + beta_.size() + ind_.size() + def_.size();
  }

 private:
  using Key = std::tuple<int, int, double>;

  template <class F>
  double memo(std::map<Key, double>& cache, const Key& key, F compute) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard<std::mutex> lock(mu_);
    cache.emplace(key, v);
    return v;
  }

  int max_order_;
  mutable std::mutex mu_;
  mutable std::map<Key, double> alpha_, beta_, ind_, def_;
};

/// One row of a coefficient dump: family, index1, index2, z, value.
struct TableRow {
  std::string family;
  int index1 = 0;
  int index2 = 0;
  double z = 0.0;
  double value = 0.0;
};

/// alpha for even orders up to max_order, and beta(z), J(z) for l, q up to
/// max_order at each requested level.
inline std::vector<TableRow> coefficient_rows(int max_order, const std::vector<double>& levels) {
  std::vector<TableRow> rows;
  for (int a = 0; a <= max_order; a += 2) {
    for (int b = 0; a + b <= max_order; b += 2) rows.push_back({"alpha", a, b, 0.0, alpha(a, b)});
  }
  for (double z : levels) {
    for (int l = 0; l <= max_order; ++l) rows.push_back({"beta", l, 0, z, beta(l, z)});
    for (int q = 0; q <= max_order; ++q) rows.push_back({"J", q, 0, z, indicator_chaos(q, z)});
  }
  for (int q = 1; q <= max_order; q += 2) rows.push_back({"defect", q, 0, 0.0, defect_chaos_order(q)});
  return rows;
}

}  // namespace randwave::chaos
