#pragma once

// Gauss-Legendre and Gauss-Hermite rules. Rules are computed once per size and
// cached; the returned references stay valid for the program's lifetime.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace randwave::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

namespace detail {

// Nodes on [-1,1] in ascending order, by Newton iteration on P_n.
inline Rule compute_gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's initial guess for the i-th largest root.
    const double theta = std::numbers::pi * (i + 0.75) / (n + 0.5);
    double x = std::cos(theta) * (1.0 - (n - 1.0) / (8.0 * n * n * n));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0, p1 = x;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    rule.weights[static_cast<std::size_t>(i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

// Physicists' Gauss-Hermite (weight e^{-x^2}), rescaled to the standard normal
// density. Starting nodes are the eigenvalues of the Jacobi matrix; Newton on
// the orthonormal recurrence then polishes them and supplies the weights,
// which keeps the tiny outer weights relatively accurate. The unweighted
// recurrence overflows past n ~ 700.
inline Rule compute_gauss_hermite(int n) {
  if (n > 700) throw std::invalid_argument("gauss_hermite: n must be <= 700");
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int j = 1; j < n; ++j) sub(j - 1) = std::sqrt(0.5 * j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& guess = es.eigenvalues();  // ascending
  Rule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = guess(i);
    double pp = 0.0;
    for (int it = 0; it < 20; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = std::numbers::sqrt2 * z;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp) / std::sqrt(std::numbers::pi);
  }
  return rule;
}

template <class Factory>
const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mu, int n,
                   Factory make) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Rule>(make(n))).first;
  return *it->second;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1].
inline const Rule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return detail::cached(cache, mu, n, detail::compute_gauss_legendre);
}

/// n-point Gauss-Hermite rule for the standard normal density:
/// sum_i w_i f(x_i) ~ E[f(Z)], Z ~ N(0,1).
inline const Rule& gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return detail::cached(cache, mu, n, detail::compute_gauss_hermite);
}

/// Integrates f over [a, b] with the n-point Gauss-Legendre rule.
template <class F>
double integrate(F&& f, double a, double b, int n = 32) {
  const Rule& r = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) sum += r.weights[i] * f(mid + half * r.nodes[i]);
  return sum * half;
}

/// Composite Gauss-Legendre on `panels` equal subintervals of [a, b].
template <class F>
double integrate_composite(F&& f, double a, double b, int panels, int n = 16) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) sum += integrate(f, a + p * h, a + (p + 1) * h, n);
  return sum;
}

}  // namespace randwave::quad
