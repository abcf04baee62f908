#pragma once

// Monte-Carlo runner and statistics. Replicate r of an experiment draws from
// the stream key derive_key(master_seed, experiment_id) with r in the counter,
// so results are the same whatever the number of workers or the order in
// which replicates run.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "randwave/errors.hpp"
#include "randwave/geomstats.hpp"
#include "randwave/oracles.hpp"
#include "randwave/rng.hpp"
#include "randwave/sphere.hpp"
#include "randwave/torus.hpp"

namespace randwave::harness {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Statistics

/// Streaming central moments up to order 4 (Welford / Chan et al. updates),
/// mergeable so that partial results from workers can be combined.
class Moments {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double t1 = delta * dn * n1;
    mean_ += dn;
    m4_ += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
    m3_ += t1 * dn * (n - 2.0) - 3.0 * dn * m2_;
    m2_ += t1;
  }

  void merge(const Moments& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double d = o.mean_ - mean_;
    const double d2 = d * d, d3 = d2 * d, d4 = d2 * d2;
    const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
    const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * o.m2_ - nb * m2_) / n;
    const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) + 4.0 * d * (na * o.m3_ - nb * m3_) / n;
    mean_ = (na * mean_ + nb * o.mean_) / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  /// Plug-in central moments m_k = (1/M) sum (x - mean)^k.
  double central2() const { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
  double central3() const { return n_ ? m3_ / static_cast<double>(n_) : 0.0; }
  double central4() const { return n_ ? m4_ / static_cast<double>(n_) : 0.0; }
  double skewness() const {
    const double c2 = central2();
    return c2 > 0 ? central3() / std::pow(c2, 1.5) : 0.0;
  }
  double excess_kurtosis() const {
    const double c2 = central2();
    return c2 > 0 ? central4() / (c2 * c2) - 3.0 : 0.0;
  }
  /// Fourth cumulant m4 - 3 m2^2.
  double k4() const {
    const double c2 = central2();
    return central4() - 3.0 * c2 * c2;
  }
  double standard_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

inline Moments moments_of(const std::vector<double>& xs) {
  Moments m;
  for (double x : xs) m.add(x);
  return m;
}

/// Fourth cumulant m4 - 3 m2^2 of a sample (M >= 4).
inline double fourth_cumulant(const std::vector<double>& xs) {
  if (xs.size() < 4) throw ConfigError("samples", "fourth cumulant needs at least 4 samples");
  return moments_of(xs).k4();
}

/// Standard error of the sample variance, from the fourth central moment:
/// sqrt((m4 - m2^2 (M-3)/(M-1)) / M).
inline double variance_standard_error(const Moments& m) {
  const double M = static_cast<double>(m.count());
  const double c2 = m.central2();
  return std::sqrt(std::max(0.0, (m.central4() - c2 * c2 * (M - 3.0) / (M - 1.0)) / M));
}

/// sup_x |F_M(x) - F(x)|.
inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw ConfigError("samples", "empty sample");
  std::sort(xs.begin(), xs.end());
  const double M = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / M - F, F - static_cast<double>(i) / M});
  }
  return d;
}

/// sup_x |F_a(x) - F_b(x)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("samples", "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// 99% one-sample Kolmogorov critical value, asymptotic form 1.63 / sqrt(M).
inline double ks_critical_99(std::size_t M) { return 1.63 / std::sqrt(static_cast<double>(M)); }

/// (x - mean) / sd with the sample's own moments.
inline std::vector<double> standardize(const std::vector<double>& xs) {
  const Moments m = moments_of(xs);
  const double sd = std::sqrt(m.variance());
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = (xs[k] - m.mean()) / sd;
  return out;
}

// ---------------------------------------------------------------------------
// Reports

/// A measured statistic, its reference value and tolerance. Passes iff
/// |measured - target| <= tolerance.
struct OracleCheck {
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool stochastic = false;
  std::string note;

  bool passed() const { return std::isfinite(measured) && std::abs(measured - target) <= tolerance; }
};

struct ColumnStats {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double k4 = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
};

inline ColumnStats column_stats(const std::vector<double>& xs) {
  const Moments m = moments_of(xs);
  return {m.mean(), m.variance(), m.skewness(), m.excess_kurtosis(), m.k4(), m.standard_error(),
          variance_standard_error(m)};
}

// ---------------------------------------------------------------------------
// Experiment specification

enum class Domain { sphere, torus };

/// What to measure on each replicate.
///   sphere: area(z), defect, length(z), hermite(q), chaos2(z), mean_square,
///           value/grad1/grad2 at a grid node (index = flat node index)
///   torus:  length(z), h1..h4
enum class Functional { area, defect, length, hermite, chaos2, mean_square, point_value, point_grad1, point_grad2, h1, h2, h3, h4 };

inline const char* functional_name(Functional f) {
  switch (f) {
    case Functional::area: return "area";
    case Functional::defect: return "defect";
    case Functional::length: return "length";
    case Functional::hermite: return "hermite";
    case Functional::chaos2: return "chaos2";
    case Functional::mean_square: return "mean_square";
    case Functional::point_value: return "point_value";
    case Functional::point_grad1: return "point_grad1";
    case Functional::point_grad2: return "point_grad2";
    case Functional::h1: return "h1";
    case Functional::h2: return "h2";
    case Functional::h3: return "h3";
    case Functional::h4: return "h4";
  }
  return "?";
}

struct FunctionalRequest {
  Functional kind = Functional::area;
  double z = 0.0;
  int order = 0;  // Hermite order, or flat node index for point_* functionals
};

struct ExperimentSpec {
  std::string id;
  Domain domain = Domain::sphere;
  int ell = 0;         // sphere degree
  long long n = 0;     // torus energy
  sphere::GridSpec grid;
  int torus_grid = 0;  // torus N (0: 16 ceil(sqrt n))
  std::vector<FunctionalRequest> functionals;
  std::size_t replicates = 0;
  std::size_t first_replicate = 0;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
};

inline void validate(const ExperimentSpec& s) {
  if (s.id.empty()) throw ConfigError("id", "experiment id must be non-empty");
  if (s.replicates == 0) throw ConfigError("replicates", "M must be >= 1");
  if (s.workers == 0) throw ConfigError("workers", "must be >= 1");
  if (s.functionals.empty()) throw ConfigError("functionals", "nothing to measure");
  if (s.domain == Domain::sphere) {
    if (s.ell < 1) throw ConfigError("ell", "degree must be >= 1");
    sphere::resolve_grid(s.ell, s.grid);
    for (const auto& f : s.functionals) {
      if (f.kind == Functional::hermite && f.order < 0) throw ConfigError("q", "Hermite order must be >= 0");
      if (f.kind >= Functional::h1) throw ConfigError("functionals", "torus functional requested on the sphere");
    }
  } else {
    if (s.n < 1) throw ConfigError("n", "energy must be >= 1");
    for (const auto& f : s.functionals) {
      if (f.kind != Functional::length && f.kind < Functional::h1) {
        throw ConfigError("functionals", std::string(functional_name(f.kind)) + " is not a torus functional");
      }
    }
  }
}

struct Column {
  FunctionalRequest request;
  std::vector<double> values;  // indexed by replicate - first_replicate
  ColumnStats stats;
};

struct McReport {
  ExperimentSpec spec;
  int n_theta = 0;
  int n_phi = 0;
  std::vector<Column> columns;
  std::vector<OracleCheck> checks;

  const Column& column(Functional kind, double z = 0.0, int order = 0) const {
    for (const auto& c : columns) {
      if (c.request.kind == kind && c.request.z == z && c.request.order == order) return c;
    }
    throw ConfigError("functionals", std::string("no column ") + functional_name(kind));
  }
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed(); });
  }
};

// ---------------------------------------------------------------------------
// Parallel replicate loop

/// Calls work(state, r) for r in [0, count) on `workers` threads. Each thread
/// owns one State from make_state(). Results must be written by index.
template <class MakeState, class Work>
void parallel_replicates(std::size_t count, unsigned workers, MakeState make_state, Work work) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    try {
      auto state = make_state();
      for (std::size_t r = next++; r < count; r = next++) work(state, r);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      next = count;
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

inline int default_torus_grid(long long n) {
  return 16 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
}

namespace detail {

inline bool needs_grid(const ExperimentSpec& s) {
  return std::any_of(s.functionals.begin(), s.functionals.end(), [](const FunctionalRequest& f) {
    return f.kind != Functional::chaos2 && f.kind < Functional::h1;
  });
}

inline double sphere_functional(const FunctionalRequest& f, const sphere::HarmonicCoeffs& c,
                                const sphere::SphereGrid* g) {
  switch (f.kind) {
    case Functional::area: return geom::excursion_area(*g, f.z);
    case Functional::defect: return geom::defect(*g);
    case Functional::length: return geom::level_length(*g, f.z);
    case Functional::hermite: return geom::hermite_functional(*g, f.order);
    case Functional::chaos2: return geom::second_chaos_length(c, f.z);
    case Functional::mean_square:
      return g->integrate([](double v) { return v * v; }) / (4.0 * std::numbers::pi);
    case Functional::point_value: return g->values.at(static_cast<std::size_t>(f.order));
    case Functional::point_grad1: return g->grad1.at(static_cast<std::size_t>(f.order));
    case Functional::point_grad2: return g->grad2.at(static_cast<std::size_t>(f.order));
    default: break;
  }
  throw ConfigError("functionals", "unsupported sphere functional");
}

// Default oracle rows attached to a sphere report.
inline void attach_sphere_checks(McReport& rep) {
  const int ell = rep.spec.ell;
  for (const auto& col : rep.columns) {
    const auto& f = col.request;
    const auto& st = col.stats;
    const auto t = oracles::expected_values(ell, 2, f.z);
    const std::string tag = std::string(functional_name(f.kind)) + "(z=" + nlohmann::json(f.z).dump() + ")";
    switch (f.kind) {
      case Functional::area:
        rep.checks.push_back({tag + " mean", st.mean, t.area_mean, 3.0 * st.mean_se, true, "3 SE"});
        if (f.z != 0.0) {
          rep.checks.push_back({tag + " variance ratio", st.variance / t.area_var, 1.0, 0.25, true,
                                "leading-order variance, 25%"});
        }
        break;
      case Functional::defect:
        rep.checks.push_back({tag + " mean", st.mean, 0.0, 3.0 * st.mean_se, true, "3 SE"});
        if (ell % 2 == 0) {
          rep.checks.push_back({tag + " variance ratio", st.variance / oracles::defect_variance_exact(ell, 2), 1.0,
                                0.25, true, "exact finite-l variance, 25%"});
        }
        break;
      case Functional::length:
        rep.checks.push_back({tag + " mean ratio", st.mean / t.length_mean, 1.0, 0.03, true, "3%"});
        if (!t.nodal) {
          rep.checks.push_back({tag + " variance ratio", st.variance / t.length_var, 1.0, 0.30, true,
                                "leading-order variance, 30%"});
        }
        break;
      case Functional::chaos2:
        if (f.z != 0.0) {
          rep.checks.push_back({tag + " variance ratio", st.variance / t.second_chaos_var, 1.0, 0.05, true, "5%"});
        }
        break;
      case Functional::mean_square:
        rep.checks.push_back({tag + " mean", st.mean, 1.0, 3.0 * st.mean_se, true, "3 SE"});
        break;
      case Functional::hermite:
        if (f.order == 2) {
          const double target = 2.0 * 16.0 * std::numbers::pi * std::numbers::pi / (2.0 * ell + 1.0);
          rep.checks.push_back({"hermite(q=2) variance ratio", st.variance / target, 1.0, 0.10, true, "10%"});
        }
        break;
      default: break;
    }
  }
}

inline void attach_torus_checks(McReport& rep, const torus::LatticeSet& L) {
  for (const auto& col : rep.columns) {
    if (col.request.kind != Functional::length || col.request.z != 0.0) continue;
    const auto& st = col.stats;
    rep.checks.push_back({"nodal length mean ratio", st.mean / oracles::torus_length_mean(L.n), 1.0, 0.02, true, "2%"});
    rep.checks.push_back({"nodal length variance ratio",
                          st.variance / oracles::torus_length_var(L.n, L.count(), L.mu_hat4), 1.0, 0.35, true,
                          "35%"});
  }
}

}  // namespace detail

/// Runs every replicate of `spec` and summarizes each functional.
inline McReport run(const ExperimentSpec& spec) {
  validate(spec);
  McReport rep;
  rep.spec = spec;
  const std::size_t M = spec.replicates;
  const std::uint64_t key = rng::derive_key(spec.master_seed, spec.id);
  for (const auto& f : spec.functionals) rep.columns.push_back({f, std::vector<double>(M, 0.0), {}});

  if (spec.domain == Domain::sphere) {
    sphere::GridSpec grid = spec.grid;
    for (const auto& f : spec.functionals) {
      if (f.kind == Functional::point_grad1 || f.kind == Functional::point_grad2) grid.with_gradient = true;
    }
    std::tie(rep.n_theta, rep.n_phi) = sphere::resolve_grid(spec.ell, grid);
    const bool grid_needed = detail::needs_grid(spec);
    parallel_replicates(
        M, spec.workers,
        [&] { return grid_needed ? std::make_unique<sphere::Synthesizer>(spec.ell, grid) : nullptr; },
        [&](std::unique_ptr<sphere::Synthesizer>& synth, std::size_t r) {
          const auto c = sphere::sample_coeffs(spec.ell, key, spec.first_replicate + r);
          sphere::SphereGrid g;
          if (synth) g = (*synth)(c);
          for (std::size_t k = 0; k < spec.functionals.size(); ++k) {
            rep.columns[k].values[r] = detail::sphere_functional(spec.functionals[k], c, synth ? &g : nullptr);
          }
        });
  } else {
    const torus::LatticeSet L = torus::lattice_points(spec.n);
    const int N = spec.torus_grid > 0 ? spec.torus_grid : default_torus_grid(spec.n);
    torus::check_torus_resolution(spec.n, N);
    rep.n_theta = rep.n_phi = N;
    const bool grid_needed = std::any_of(spec.functionals.begin(), spec.functionals.end(),
                                         [](const FunctionalRequest& f) { return f.kind == Functional::length; });
    parallel_replicates(
        M, spec.workers, [] { return 0; },
        [&](int&, std::size_t r) {
          const auto c = torus::sample_coeffs(L, key, spec.first_replicate + r);
          torus::ToralGrid g;
          if (grid_needed) g = torus::synthesize(c, L, N);
          std::array<double, 4> h{};
          const bool need_h = std::any_of(spec.functionals.begin(), spec.functionals.end(),
                                          [](const FunctionalRequest& f) { return f.kind >= Functional::h1; });
          if (need_h) h = torus::h_vector(c, L);
          for (std::size_t k = 0; k < spec.functionals.size(); ++k) {
            const auto& f = spec.functionals[k];
            double v = 0.0;
            if (f.kind == Functional::length) {
              v = torus::nodal_length(g, f.z);
            } else {
              v = h[static_cast<std::size_t>(static_cast<int>(f.kind) - static_cast<int>(Functional::h1))];
            }
            rep.columns[k].values[r] = v;
          }
        });
    for (auto& col : rep.columns) col.stats = column_stats(col.values);
    detail::attach_torus_checks(rep, L);
    return rep;
  }
  for (auto& col : rep.columns) col.stats = column_stats(col.values);
  detail::attach_sphere_checks(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

/// One CSV row per replicate and functional: kind,ell,z,replicate,value.
/// For the torus the `ell` column carries n.
inline void write_csv(std::ostream& os, const McReport& rep) {
  os << "kind,ell,z,replicate,value\n";
  os.precision(17);
  const long long degree = rep.spec.domain == Domain::sphere ? rep.spec.ell : rep.spec.n;
  for (const auto& col : rep.columns) {
    std::string kind = functional_name(col.request.kind);
    if (col.request.kind == Functional::hermite) kind += std::to_string(col.request.order);
    for (std::size_t r = 0; r < col.values.size(); ++r) {
      os << kind << ',' << degree << ',' << col.request.z << ',' << (rep.spec.first_replicate + r) << ','
         << col.values[r] << '\n';
    }
  }
}

inline nlohmann::json to_json(const McReport& rep) {
  nlohmann::json j;
  j["id"] = rep.spec.id;
  j["version"] = kVersion;
  j["domain"] = rep.spec.domain == Domain::sphere ? "sphere" : "torus";
  j["ell"] = rep.spec.ell;
  j["n"] = rep.spec.n;
  j["grid"] = {{"n_theta", rep.n_theta}, {"n_phi", rep.n_phi}};
  j["replicates"] = rep.spec.replicates;
  j["master_seed"] = rep.spec.master_seed;
  j["workers"] = rep.spec.workers;
  for (const auto& col : rep.columns) {
    nlohmann::json c;
    c["kind"] = functional_name(col.request.kind);
    c["z"] = col.request.z;
    c["order"] = col.request.order;
    c["mean"] = col.stats.mean;
    c["variance"] = col.stats.variance;
    c["skewness"] = col.stats.skewness;
    c["excess_kurtosis"] = col.stats.excess_kurtosis;
    c["k4"] = col.stats.k4;
    c["mean_se"] = col.stats.mean_se;
    c["variance_se"] = col.stats.variance_se;
    j["functionals"].push_back(c);
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& chk : rep.checks) {
    j["checks"].push_back({{"name", chk.name},
                           {"measured", chk.measured},
                           {"target", chk.target},
                           {"tolerance", chk.tolerance},
                           {"stochastic", chk.stochastic},
                           {"passed", chk.passed()},
                           {"note", chk.note}});
  }
  j["passed"] = rep.all_passed();
  return j;
}

}  // namespace randwave::harness
