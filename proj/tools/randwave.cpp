// randwave: command-line front end.
//
//   randwave sphere --ell 100 --functional area,length --z 1 --M 2000
//   randwave torus --n 325 --M 1000
//   randwave lattice --n 5
//   randwave chaos-table --max-order 6 --z 0,1
//   randwave constants --family cqd --q 4 --d 2
//   randwave kernel --space so3 --lmax 2
//   randwave verify --quick
//
// Exit codes: 0 success, 1 failed acceptance, 2 configuration error.
// Settings come from flags, then `--config FILE` (key=value lines, keys are
// the long flag names), then built-in defaults. Without --out, files go to
// $RANDWAVE_OUT_DIR when set and to stdout otherwise.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "randwave/randwave.hpp"

namespace {

using namespace randwave;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_reals(const std::string& field, const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(field, "not a number: " + tok);
    }
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// key=value lines -> "--key=value" arguments. Blank lines and '#' comments
// are skipped.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config", path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Where and how results are written.
struct Output {
  std::string dir;
  std::string format = "csv";  // csv | json | both
  std::string header;          // "# randwave <version> seed=<s> config=<hash>"

  bool to_files() const { return !dir.empty(); }

  void emit(const std::string& stem, const std::string& csv, const nlohmann::json* json) const {
    const bool want_csv = format != "json";
    const bool want_json = format != "csv" && json != nullptr;
    if (to_files()) {
      fs::create_directories(dir);
      if (want_csv) write_file(fs::path(dir) / (stem + ".csv"), header + "\n" + csv);
      if (want_json) write_file(fs::path(dir) / (stem + ".json"), json->dump(2) + "\n");
      return;
    }
    std::cout << header << '\n';
    if (want_csv) std::cout << csv;
    if (want_json) std::cout << json->dump(2) << '\n';
  }

  static void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("out", "cannot write " + p.string());
    out << text;
    std::cerr << "wrote " << p.string() << '\n';
  }
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Common {
  std::uint64_t seed = 20240611;
  unsigned workers = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c, bool with_run_opts) {
  sub->add_option("--out", c.out, "output directory (default: $RANDWAVE_OUT_DIR, else stdout)");
  sub->add_option("--format", c.format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();
  if (with_run_opts) {
    sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  }
}

Output make_output(const CLI::App* sub, const Common& c) {
  Output o;
  o.dir = c.out;
  if (o.dir.empty()) {
    if (const char* env = std::getenv("RANDWAVE_OUT_DIR"); env && *env) o.dir = env;
  }
  o.format = c.format;
  // Hash of the resolved settings of this subcommand, defaults included.
  const std::string resolved = std::string(sub->get_name()) + "\n" + sub->config_to_str(true, false);
  o.header = std::string("# randwave ") + harness::kVersion + " seed=" + std::to_string(c.seed) +
             " config=" + hex64(rng::hash_id(resolved));
  return o;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

harness::Functional parse_functional(const std::string& s) {
  using F = harness::Functional;
  static const std::map<std::string, F> names = {
      {"area", F::area},     {"defect", F::defect}, {"length", F::length},           {"hermite", F::hermite},
      {"chaos2", F::chaos2}, {"mean_square", F::mean_square}, {"h", F::h1}};
  const auto it = names.find(s);
  if (it == names.end()) throw ConfigError("functional", "unknown functional '" + s + "'");
  return it->second;
}

void print_checks(const harness::McReport& rep) {
  for (const auto& chk : rep.checks) {
    std::fprintf(stderr, "%s %-40s measured %.8g target %.8g tol %.3g\n", chk.passed() ? "ok  " : "MISS",
                 chk.name.c_str(), chk.measured, chk.target, chk.tolerance);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random eigenfunctions on the sphere and the torus: simulation and reference values", "randwave"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(harness::kVersion));
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; flags given on the command line take precedence");

  // sphere ------------------------------------------------------------------
  Common sphere_common;
  int s_ell = 100, s_q = 2, s_ntheta = 0, s_nphi = 0;
  double s_spw = 12.0;
  std::size_t s_M = 1000, s_first = 0;
  std::string s_z = "1", s_func = "area,length", s_id;
  auto* sphere_cmd = app.add_subcommand("sphere", "Monte-Carlo functionals of T_l on S^2");
  sphere_cmd->add_option("--ell", s_ell, "degree l")->check(CLI::Range(1, 4000))->capture_default_str();
  sphere_cmd->add_option("--z", s_z, "comma-separated levels")->capture_default_str();
  sphere_cmd->add_option("--functional", s_func, "area, defect, length, hermite, chaos2, mean_square")
      ->capture_default_str();
  sphere_cmd->add_option("--q", s_q, "Hermite order for 'hermite'")->check(CLI::Range(0, 60))->capture_default_str();
  sphere_cmd->add_option("--M", s_M, "replicates")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
      ->capture_default_str();
  sphere_cmd->add_option("--first", s_first, "index of the first replicate")->capture_default_str();
  sphere_cmd->add_option("--n-theta", s_ntheta, "colatitude nodes (0: automatic)")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sphere_cmd->add_option("--n-phi", s_nphi, "longitude nodes (0: automatic)")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sphere_cmd->add_option("--spw", s_spw, "samples per wavelength for automatic grids")
      ->check(CLI::Range(1.0, 1000.0))->capture_default_str();
  sphere_cmd->add_option("--id", s_id, "experiment id (seeds the stream; default derived from l)");
  add_common(sphere_cmd, sphere_common, true);

  // torus -------------------------------------------------------------------
  Common torus_common;
  long long t_n = 325;
  int t_grid = 0;
  std::size_t t_M = 1000, t_first = 0;
  std::string t_func = "length", t_z = "0", t_id;
  auto* torus_cmd = app.add_subcommand("torus", "Monte-Carlo nodal length and H(n) for arithmetic random waves");
  torus_cmd->add_option("--n", t_n, "energy index n (a sum of two squares)")
      ->check(CLI::Range(1LL, 100000000LL))->capture_default_str();
  torus_cmd->add_option("--grid", t_grid, "grid size N (0: 16 ceil(sqrt n))")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  torus_cmd->add_option("--functional", t_func, "length and/or h")->capture_default_str();
  torus_cmd->add_option("--z", t_z, "comma-separated levels for 'length'")->capture_default_str();
  torus_cmd->add_option("--M", t_M, "replicates")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
      ->capture_default_str();
  torus_cmd->add_option("--first", t_first, "index of the first replicate")->capture_default_str();
  torus_cmd->add_option("--id", t_id, "experiment id (default derived from n)");
  add_common(torus_cmd, torus_common, true);

  // lattice -----------------------------------------------------------------
  Common lattice_common;
  std::string l_n = "5";
  long long l_min_count = 0;
  auto* lattice_cmd = app.add_subcommand("lattice", "Lattice sets: n, N_n, mu_n(4), c_n, E_n");
  lattice_cmd->add_option("--n", l_n, "comma-separated energies")->capture_default_str();
  lattice_cmd->add_option("--min-count", l_min_count, "instead: smallest n with N_n >= this")
      ->check(CLI::Range(0LL, 100000LL));
  add_common(lattice_cmd, lattice_common, false);

  // chaos-table -------------------------------------------------------------
  Common chaos_common;
  int c_order = 6;
  std::string c_z = "0,1";
  auto* chaos_cmd = app.add_subcommand("chaos-table", "Chaos coefficients alpha, beta, J and Defect");
  chaos_cmd->add_option("--max-order", c_order, "largest order")->check(CLI::Range(0, 40))->capture_default_str();
  chaos_cmd->add_option("--z", c_z, "comma-separated levels")->capture_default_str();
  add_common(chaos_cmd, chaos_common, false);

  // constants ---------------------------------------------------------------
  Common const_common;
  std::string k_family = "cqd";
  int k_q = 3, k_d = 2, k_ell = 100, k_order = 60;
  double k_z = 1.0, k_eta = 0.0;
  auto* const_cmd = app.add_subcommand("constants", "Reference constants and oracle values");
  const_cmd
      ->add_option("--family", k_family,
                   "cqd, defect (C_d), arcsin (a_k), moment (Gegenbauer), sphere (expected values), torus, sigma")
      ->check(CLI::IsMember({"cqd", "defect", "arcsin", "moment", "sphere", "torus", "sigma"}))
      ->capture_default_str();
  const_cmd->add_option("--q", k_q, "order q")->check(CLI::Range(2, 200))->capture_default_str();
  const_cmd->add_option("--d", k_d, "sphere dimension d")->check(CLI::Range(2, 40))->capture_default_str();
  const_cmd->add_option("--ell", k_ell, "degree l")->check(CLI::Range(1, 100000))->capture_default_str();
  const_cmd->add_option("--z", k_z, "level z")->capture_default_str();
  const_cmd->add_option("--eta", k_eta, "eta = mu(4) in [-1, 1]")->check(CLI::Range(-1.0, 1.0))->capture_default_str();
  const_cmd->add_option("--order", k_order, "series order")->check(CLI::Range(1, 500))->capture_default_str();
  add_common(const_cmd, const_common, false);

  // kernel ------------------------------------------------------------------
  Common kernel_common;
  std::string g_space = "so3";
  int g_lmax = 10, g_points = 0;
  auto* kernel_cmd = app.add_subcommand("kernel", "Restricted negative definiteness of the geodesic distance");
  kernel_cmd->add_option("--space", g_space, "s2, su2 or so3")->check(CLI::IsMember({"s2", "su2", "so3"}))
      ->capture_default_str();
  kernel_cmd->add_option("--lmax", g_lmax, "largest degree")->check(CLI::Range(1, 10000))->capture_default_str();
  kernel_cmd->add_option("--points", g_points, "also run a Gram test on this many random points")
      ->check(CLI::Range(0, 5000));
  add_common(kernel_cmd, kernel_common, true);

  // verify ------------------------------------------------------------------
  Common verify_common;
  verify_common.workers = std::max(1u, std::thread::hardware_concurrency());
  bool v_quick = false, v_full = false;
  std::string v_only;
  auto* verify_cmd = app.add_subcommand("verify", "Acceptance suite");
  auto* quick_flag = verify_cmd->add_flag("--quick", v_quick, "reduced replicates, widened tolerances");
  verify_cmd->add_flag("--full", v_full, "full replicate counts and tolerances (default)")->excludes(quick_flag);
  verify_cmd->add_option("--only", v_only, "comma-separated criterion ids");
  add_common(verify_cmd, verify_common, true);

  // Splice the config file in front of the command-line flags so that the
  // latter win under TakeLast.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        continue;
      }
      const auto extra = read_config(path);
      // Insert right after the subcommand name.
      std::size_t at = 0;
      while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;
      if (at < args.size()) ++at;
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
      break;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sphere_cmd) {
      harness::ExperimentSpec spec;
      spec.id = s_id.empty() ? "sphere-l" + std::to_string(s_ell) : s_id;
      spec.domain = harness::Domain::sphere;
      spec.ell = s_ell;
      spec.grid.n_theta = s_ntheta;
      spec.grid.n_phi = s_nphi;
      spec.grid.samples_per_wavelength = s_spw;
      spec.replicates = s_M;
      spec.first_replicate = s_first;
      spec.master_seed = sphere_common.seed;
      spec.workers = sphere_common.workers;
      const auto levels = parse_reals("z", s_z);
      for (const auto& name : split(s_func)) {
        const auto kind = parse_functional(name);
        if (kind == harness::Functional::defect || kind == harness::Functional::mean_square) {
          spec.functionals.push_back({kind, 0.0, 0});
        } else if (kind == harness::Functional::hermite) {
          spec.functionals.push_back({kind, 0.0, s_q});
        } else {
          for (double z : levels) spec.functionals.push_back({kind, z, 0});
        }
      }
      const auto rep = harness::run(spec);
      std::ostringstream csv;
      harness::write_csv(csv, rep);
      const auto json = harness::to_json(rep);
      make_output(sphere_cmd, sphere_common).emit(spec.id, csv.str(), &json);
      print_checks(rep);
      return kExitOk;
    }

    if (*torus_cmd) {
      harness::ExperimentSpec spec;
      spec.id = t_id.empty() ? "torus-n" + std::to_string(t_n) : t_id;
      spec.domain = harness::Domain::torus;
      spec.n = t_n;
      spec.torus_grid = t_grid;
      spec.replicates = t_M;
      spec.first_replicate = t_first;
      spec.master_seed = torus_common.seed;
      spec.workers = torus_common.workers;
      for (const auto& name : split(t_func)) {
        if (name == "length") {
          for (double z : parse_reals("z", t_z)) spec.functionals.push_back({harness::Functional::length, z, 0});
        } else if (name == "h") {
          for (auto f : {harness::Functional::h1, harness::Functional::h2, harness::Functional::h3,
                         harness::Functional::h4}) {
            spec.functionals.push_back({f, 0.0, 0});
          }
        } else {
          throw ConfigError("functional", "torus functionals are 'length' and 'h'");
        }
      }
      const auto rep = harness::run(spec);
      std::ostringstream csv;
      harness::write_csv(csv, rep);
      const auto json = harness::to_json(rep);
      make_output(torus_cmd, torus_common).emit(spec.id, csv.str(), &json);
      print_checks(rep);
      return kExitOk;
    }

    if (*lattice_cmd) {
      std::vector<long long> ns;
      if (l_min_count > 0) {
        ns.push_back(torus::smallest_with_count(static_cast<std::size_t>(l_min_count)));
      } else {
        for (double v : parse_reals("n", l_n)) {
          if (v < 1 || v != std::floor(v)) throw ConfigError("n", "must be a positive integer");
          ns.push_back(static_cast<long long>(v));
        }
      }
      std::ostringstream csv;
      nlohmann::json json = nlohmann::json::array();
      csv << "n,N,mu_hat4,c_n,E_n\n";
      for (long long n : ns) {
        const auto L = torus::lattice_points(n);
        const double c = oracles::torus_c(L.mu_hat4);
        csv << n << ',' << L.count() << ',' << fmt(L.mu_hat4) << ',' << fmt(c) << ',' << fmt(L.energy()) << '\n';
        json.push_back({{"n", n},
                        {"N", L.count()},
                        {"mu_hat4", L.mu_hat4},
                        {"mu_hat4_exact", L.mu_hat4_exact.str()},
                        {"c_n", c},
                        {"E_n", L.energy()}});
      }
      make_output(lattice_cmd, lattice_common).emit("lattice", csv.str(), &json);
      return kExitOk;
    }

    if (*chaos_cmd) {
      const auto rows = chaos::coefficient_rows(c_order, parse_reals("z", c_z));
      std::ostringstream csv;
      csv << "family,index1,index2,z,value\n" << std::setprecision(17);
      nlohmann::json json = nlohmann::json::array();
      for (const auto& r : rows) {
        csv << r.family << ',' << r.index1 << ',' << r.index2 << ',' << r.z << ',' << r.value << '\n';
        json.push_back({{"family", r.family}, {"index1", r.index1}, {"index2", r.index2}, {"z", r.z}, {"value", r.value}});
      }
      make_output(chaos_cmd, chaos_common).emit("chaos-table", csv.str(), &json);
      return kExitOk;
    }

    if (*const_cmd) {
      std::vector<oracles::OracleValue> values;
      if (k_family == "cqd") {
        values.push_back(oracles::cqd_constant(k_q, k_d));
      } else if (k_family == "defect") {
        values.push_back(oracles::defect_constant_quadrature(k_d));
        values.push_back(oracles::defect_constant_series(k_d, k_order));
        values.push_back({"var_defect_exact_l" + std::to_string(k_ell), oracles::defect_variance_exact(k_ell, k_d),
                          oracles::Method::quadrature, 0.0});
      } else if (k_family == "arcsin") {
        for (int k = 1; k <= k_order; ++k) {
          values.push_back({"a_" + std::to_string(k), oracles::arcsin_taylor(k), oracles::Method::closed_form, 0.0});
        }
      } else if (k_family == "moment") {
        auto half = oracles::gegenbauer_moment(k_ell, k_q, k_d);
        half.name = "moment_half";
        auto full = oracles::gegenbauer_moment(k_ell, k_q, k_d, true);
        full.name = "moment_full";
        values.push_back(half);
        values.push_back(full);
        values.push_back({"l^d*moment_half", std::pow(static_cast<double>(k_ell), k_d) * half.value,
                          oracles::Method::quadrature, std::pow(static_cast<double>(k_ell), k_d) * half.error_bound});
      } else if (k_family == "sphere") {
        const auto t = oracles::expected_values(k_ell, k_d, k_z);
        const auto cf = oracles::Method::closed_form;
        values.push_back({"area_mean", t.area_mean, cf, 0.0});
        values.push_back({"area_var_leading", t.area_var, cf, 0.0});
        if (k_d == 2) {
          values.push_back({"length_mean", t.length_mean, cf, 0.0});
          if (t.nodal) {
            values.push_back({"nodal_var_log_law", t.nodal_var, oracles::Method::log_law, 0.0});
          } else {
            values.push_back({"length_var_leading", t.length_var, cf, 0.0});
          }
          values.push_back({"second_chaos_var", t.second_chaos_var, cf, 0.0});
        }
      } else if (k_family == "torus") {
        const auto law = oracles::m_eta_law(std::abs(k_eta));
        const auto cf = oracles::Method::closed_form;
        values.push_back({"c", oracles::torus_c(k_eta), cf, 0.0});
        values.push_back({"psi", oracles::psi(k_eta), cf, 0.0});
        values.push_back({"quadratic_form_variance", oracles::quadratic_form_variance(k_eta), cf, 0.0});
        values.push_back({"m_eta_a", law.a, cf, 0.0});
        values.push_back({"m_eta_b", law.b, cf, 0.0});
        for (int p = 2; p <= 4; ++p) {
          values.push_back({"m_eta_kappa_" + std::to_string(p), law.cumulant(p), cf, 0.0});
        }
        values.push_back({"m_eta_support_max", law.support_max(k_eta), cf, 0.0});
      } else if (k_family == "sigma") {
        const auto S = oracles::sigma_matrix(oracles::psi(k_eta));
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) {
            values.push_back({"sigma_" + std::to_string(i + 1) + std::to_string(j + 1), S(i, j),
                              oracles::Method::closed_form, 0.0});
          }
        }
      }
      std::ostringstream csv;
      csv << "name,value,method,error_bound,order\n";
      nlohmann::json json = nlohmann::json::array();
      for (const auto& v : values) {
        csv << v.name << ',' << fmt(v.value) << ',' << oracles::method_name(v.method) << ',' << fmt(v.error_bound) << ','
            << v.order << '\n';
        json.push_back({{"name", v.name},
                        {"value", v.value},
                        {"method", oracles::method_name(v.method)},
                        {"error_bound", v.error_bound},
                        {"order", v.order}});
      }
      make_output(const_cmd, const_common).emit("constants-" + k_family, csv.str(), &json);
      return kExitOk;
    }

    if (*kernel_cmd) {
      const auto space = kernels::parse_space(g_space);
      const auto v = kernels::character_verdict(space, g_lmax);
      std::ostringstream csv;
      csv << "space,l,alpha\n";
      for (std::size_t l = 0; l < v.alpha.size(); ++l) {
        csv << kernels::space_name(space) << ',' << l << ',' << fmt(v.alpha[l]) << '\n';
      }
      nlohmann::json json{{"space", kernels::space_name(space)},
                          {"lmax", g_lmax},
                          {"restricted_negative_definite", v.restricted_negative_definite},
                          {"alpha", v.alpha}};
      if (v.witness) json["witness"] = *v.witness;
      if (g_points > 0) {
        kernels::GramResult g;
        const auto key = rng::derive_key(kernel_common.seed, "gram");
        if (space == kernels::Space::so3) {
          const auto pts = kernels::random_rotations(static_cast<std::size_t>(g_points), key);
          g = kernels::gram_restricted_nd_test<kernels::Rotation>(pts, kernels::rotation_distance);
        } else if (space == kernels::Space::s2) {
          const auto pts = kernels::random_sphere_points(static_cast<std::size_t>(g_points), key);
          g = kernels::gram_restricted_nd_test<kernels::Vec3>(pts, kernels::sphere_distance);
        } else {
          throw ConfigError("points", "the Gram test is available for s2 and so3");
        }
        json["gram"] = {{"points", g_points},
                        {"max_eigenvalue", g.max_eigenvalue},
                        {"restricted_negative_definite", g.restricted_negative_definite}};
      }
      make_output(kernel_cmd, kernel_common).emit("kernel-" + g_space, csv.str(), &json);
      std::fprintf(stderr, "verdict: %s", v.restricted_negative_definite ? "restricted negative definite" : "NOT restricted negative definite");
      if (v.witness) {
        std::fprintf(stderr, " (witness l=%d, alpha=%.12g)", *v.witness, v.alpha[static_cast<std::size_t>(*v.witness)]);
      }
      std::fprintf(stderr, "\n");
      return kExitOk;
    }

    if (*verify_cmd) {
      acceptance::Options opt;
      opt.level = v_quick ? acceptance::Level::quick : acceptance::Level::full;
      opt.seed = verify_common.seed;
      opt.workers = verify_common.workers;
      opt.log = [](const std::string& s) { std::cerr << "  .. " << s << '\n'; };
      std::vector<int> ids;
      if (v_only.empty()) {
        ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
      } else {
        for (double v : parse_reals("only", v_only)) {
          if (v < 1 || v > 9 || v != std::floor(v)) throw ConfigError("only", "criterion ids are 1..9");
          ids.push_back(static_cast<int>(v));
        }
      }
      const Output out = make_output(verify_cmd, verify_common);
      std::printf("%s\n", out.header.c_str());
      acceptance::Suite suite(opt);
      nlohmann::json json{{"version", harness::kVersion},
                          {"level", v_quick ? "quick" : "full"},
                          {"seed", opt.seed},
                          {"workers", opt.workers}};
      json["criteria"] = nlohmann::json::array();
      int failed = 0;
      for (int id : ids) {
        const auto c = acceptance::run_guarded(suite, id);
        failed += c.passed() ? 0 : 1;
        acceptance::write_text(stdout, c);
        json["criteria"].push_back(acceptance::to_json(c));
      }
      json["passed"] = failed == 0;
      std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
      if (out.to_files()) {
        Output::write_file(fs::path(out.dir) / "verify.json", json.dump(2) + "\n");
      }
      return failed == 0 ? kExitOk : kExitFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NotRepresentable& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
