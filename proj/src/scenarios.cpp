#include "qprop/scenarios.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "qprop/chains.hpp"
#include "qprop/errors.hpp"
#include "qprop/evolution.hpp"
#include "qprop/grid.hpp"
#include "qprop/hamiltonian.hpp"
#include "qprop/ladder.hpp"
#include "qprop/propagator.hpp"
#include "qprop/version.hpp"

namespace qprop::cli {

namespace {

using nlohmann::json;

// Configuration shape errors; distinct from model-validation errors.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Model-level validation failure raised by scenario code itself.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing config key: ") + key);
  return *it;
}

double need_num(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number()) throw ConfigError(std::string("config key must be a number: ") + key);
  return v.get<double>();
}

int need_int(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer()) throw ConfigError(std::string("config key must be an integer: ") + key);
  return v.get<int>();
}

double opt_num(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("config key must be a number: ") + key);
  return it->get<double>();
}

Eigen::VectorXd parse_vector(const json& v, int n) {
  if (!v.is_array()) throw ConfigError("expected a numeric array");
  if (static_cast<int>(v.size()) != n) throw ConfigError("vector length mismatch");
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = v.at(i).get<double>();
  return out;
}

Eigen::MatrixXd parse_matrix(const json& v, int n) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw ConfigError("expected an n x n numeric array of arrays");
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = v.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ConfigError("matrix row length mismatch");
    for (int j = 0; j < n; ++j) out(i, j) = row.at(j).get<double>();
  }
  return out;
}

template <class T, class Parse>
TimeDep<T> parse_timedep(const json& j, Parse parse_value) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "constant") {
    return TimeDep<T>::constant(parse_value(need(j, "value")));
  }
  if (kind == "table") {
    const json& jt = need(j, "times");
    const json& jv = need(j, "values");
    if (!jt.is_array() || !jv.is_array() || jt.size() != jv.size())
      throw ConfigError("table needs matching times/values arrays");
    std::vector<double> times;
    std::vector<T> values;
    for (std::size_t i = 0; i < jt.size(); ++i) {
      times.push_back(jt.at(i).get<double>());
      values.push_back(parse_value(jv.at(i)));
    }
    return TimeDep<T>::table(std::move(times), std::move(values));
  }
  if (kind == "preset") {
    const std::string name = need(j, "name").get<std::string>();
    return TimeDep<T>::preset(parse_value(need(j, "base")), profile_from_name(name),
                              need_num(j, "p0"), need_num(j, "p1"));
  }
  throw ConfigError("unknown time-dependence kind: " + kind);
}

MatrixTimeDep parse_matrix_timedep(const json& j, int n) {
  return parse_timedep<Eigen::MatrixXd>(j, [n](const json& v) { return parse_matrix(v, n); });
}

VectorTimeDep parse_vector_timedep(const json& j, int n) {
  return parse_timedep<Eigen::VectorXd>(j, [n](const json& v) { return parse_vector(v, n); });
}

ScalarTimeDep parse_scalar_timedep(const json& j) {
  return parse_timedep<double>(j, [](const json& v) { return v.get<double>(); });
}

QuadraticHamiltonian parse_hamiltonian(const json& j) {
  QuadraticHamiltonian H;
  H.n = need_int(j, "n");
  if (H.n < 1) throw ValidationError("hamiltonian needs n >= 1");
  H.hbar = opt_num(j, "hbar", 1.0);
  H.Z = parse_matrix_timedep(need(j, "Z"), H.n);
  H.L = parse_matrix_timedep(need(j, "L"), H.n);
  H.K = parse_matrix_timedep(need(j, "K"), H.n);
  H.mu = parse_vector_timedep(need(j, "mu"), H.n);
  H.nu = parse_vector_timedep(need(j, "nu"), H.n);
  return H;
}

ChainSpec parse_chain(const json& j) {
  ChainSpec spec;
  spec.n = need_int(j, "n");
  spec.mass = opt_num(j, "mass", 1.0);
  spec.omega0 = need_num(j, "omega0");
  const std::string b = need(j, "boundary").get<std::string>();
  if (b == "periodic")
    spec.boundary = Boundary::Periodic;
  else if (b == "dirichlet")
    spec.boundary = Boundary::Dirichlet;
  else
    throw ConfigError("boundary must be 'periodic' or 'dirichlet'");
  if (j.contains("force")) spec.force = parse_vector_timedep(j.at("force"), spec.n);
  return spec;
}

LadderChain parse_ladder(const json& j) {
  LadderChain chain;
  chain.n = need_int(j, "n");
  chain.omega0 = need_num(j, "omega0");
  chain.g = need_num(j, "g");
  if (j.contains("alpha")) {
    const json& a = j.at("alpha");
    if (a.is_number())
      chain.alpha = std::complex<double>(a.get<double>(), 0.0);
    else
      chain.alpha = std::complex<double>(need_num(a, "re"), need_num(a, "im"));
  }
  if (j.contains("drive")) chain.drive = parse_scalar_timedep(j.at("drive"));
  return chain;
}

std::vector<double> parse_time_grid(const json& j) {
  const double start = need_num(j, "start");
  const double stop = need_num(j, "stop");
  const double step = need_num(j, "step");
  if (!(step > 0.0) || !(stop >= start) || !(start >= 0.0))
    throw ValidationError("bad time grid");
  const std::size_t count =
      static_cast<std::size_t>((stop - start) / step + 1e-9) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

GridAxis parse_axis(const json& j) {
  GridAxis a;
  a.min = need_num(j, "min");
  a.max = need_num(j, "max");
  a.count = need_int(j, "count");
  if (!(a.max > a.min) || a.count < 2) throw ValidationError("bad grid axis");
  return a;
}

std::vector<GridAxis> parse_axes(const json& j, int n) {
  std::vector<GridAxis> axes;
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != n) throw ConfigError("grid axis list length mismatch");
    for (const auto& a : j) axes.push_back(parse_axis(a));
  } else {
    axes.assign(n, parse_axis(j));
  }
  return axes;
}

// --- output helpers -------------------------------------------------------

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file " + path.string());
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& scenario,
                    const std::string& config_text, const std::vector<std::string>& outputs,
                    const json& extra = json::object()) {
  json m;
  m["tool"] = "qprop";
  m["version"] = QPROP_VERSION;
  m["scenario"] = scenario;
  char hex[32];
  std::snprintf(hex, sizeof hex, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(config_text)));
  m["config_hash"] = hex;
  m["outputs"] = outputs;
  if (!extra.empty()) m["details"] = extra;
  std::ofstream out(out_dir / "manifest.json");
  out << m.dump(2) << "\n";
}

// --- scenarios ------------------------------------------------------------

void run_chain_eigs(const json& cfg, const std::filesystem::path& out_dir,
                    const std::string& text) {
  const ChainSpec spec = parse_chain(need(cfg, "chain"));
  const ModeDecomposition modes = decompose(build_Z(spec), spec.mass);

  std::string header = "k,z_k,omega_k";
  for (int j = 1; j <= spec.n; ++j) header += ",v_k" + std::to_string(j);
  CsvWriter csv(out_dir / "chain_eigs.csv", header);
  for (int k = 0; k < spec.n; ++k) {
    std::vector<std::string> cells{std::to_string(k + 1), fmt(modes.z[k]), fmt(modes.omega[k])};
    for (int j = 0; j < spec.n; ++j) cells.push_back(fmt(modes.V(j, k)));
    csv.row(cells);
  }
  write_manifest(out_dir, "chain-eigs", text, {"chain_eigs.csv"});
}

void run_excitation_map(const json& cfg, const std::filesystem::path& out_dir,
                        const std::string& text, int threads) {
  const LadderChain chain = parse_ladder(need(cfg, "ladder"));
  const std::vector<double> taus = parse_time_grid(need(cfg, "tau"));
  int site_min = 1, site_max = chain.n;
  if (cfg.contains("sites")) {
    site_min = need_int(cfg.at("sites"), "min");
    site_max = need_int(cfg.at("sites"), "max");
  }
  const TransitionMap map = excitation_map(chain, taus, site_min, site_max, threads);

  CsvWriter csv(out_dir / "excitation_map.csv", "tau,site,P");
  for (std::size_t c = 0; c < map.taus.size(); ++c)
    for (std::size_t r = 0; r < map.sites.size(); ++r)
      csv.row({fmt(map.taus[c]), std::to_string(map.sites[r]),
               fmt(map.P(static_cast<int>(r), static_cast<int>(c)))});
  write_manifest(out_dir, "excitation-map", text, {"excitation_map.csv"});
}

void run_first_maxima(const json& cfg, const std::filesystem::path& out_dir,
                      const std::string& text, int threads) {
  const LadderChain chain = parse_ladder(need(cfg, "ladder"));
  const std::vector<double> taus = parse_time_grid(need(cfg, "tau"));
  int site_min = 1, site_max = chain.n;
  if (cfg.contains("sites")) {
    site_min = need_int(cfg.at("sites"), "min");
    site_max = need_int(cfg.at("sites"), "max");
  }
  const TransitionMap map = excitation_map(chain, taus, site_min, site_max, threads);
  const FirstMaxima maxima = first_maxima(map);

  CsvWriter csv(out_dir / "first_maxima.csv", "site,tau_star");
  for (std::size_t i = 0; i < maxima.sites.size(); ++i)
    csv.row({std::to_string(maxima.sites[i]), fmt(maxima.tau_star[i])});
  CsvWriter fit(out_dir / "fit.csv", "slope,intercept,r2");
  fit.row({fmt(maxima.fit.slope), fmt(maxima.fit.intercept), fmt(maxima.fit.r2)});
  write_manifest(out_dir, "first-maxima", text, {"first_maxima.csv", "fit.csv"});
}

void run_propagate(const json& cfg, const std::filesystem::path& out_dir,
                   const std::string& text) {
  const QuadraticHamiltonian H = parse_hamiltonian(need(cfg, "hamiltonian"));
  const double t = need_num(cfg, "time");
  const double step = need_num(cfg, "step");
  if (!(t >= 0.0) || !(step > 0.0)) throw ValidationError("need time >= 0 and step > 0");

  std::vector<double> sample_times{0.0, 0.5 * t, t};
  const ValidationReport report = validate(H, sample_times);
  if (!report.passed) {
    std::string msg = "hamiltonian validation failed:";
    for (const auto& issue : report.issues) msg += " " + issue;
    throw ValidationError(msg);
  }

  const PropagationResult result = propagate(H, t, step);

  const json& grid = need(cfg, "grid");
  const std::vector<GridAxis> q_axes = parse_axes(need(grid, "q"), H.n);
  const std::vector<GridAxis> qp_axes = parse_axes(need(grid, "q_prime"), H.n);

  std::string header;
  if (H.n == 1) {
    header = "q,q_prime,re,im";
  } else {
    for (int k = 1; k <= H.n; ++k) header += "q" + std::to_string(k) + ",";
    for (int k = 1; k <= H.n; ++k) header += "qp" + std::to_string(k) + ",";
    header += "re,im";
  }
  CsvWriter csv(out_dir / "kernel.csv", header);

  std::vector<int> qi(H.n, 0), pi(H.n, 0);
  Eigen::VectorXd q(H.n), qp(H.n);
  bool more_q = true;
  while (more_q) {
    for (int k = 0; k < H.n; ++k) q[k] = q_axes[k].coord(qi[k]);
    std::fill(pi.begin(), pi.end(), 0);
    bool more_p = true;
    while (more_p) {
      for (int k = 0; k < H.n; ++k) qp[k] = qp_axes[k].coord(pi[k]);
      const std::complex<double> kval = kernel_eval(result.params, q, qp);
      std::vector<std::string> cells;
      for (int k = 0; k < H.n; ++k) cells.push_back(fmt(q[k]));
      for (int k = 0; k < H.n; ++k) cells.push_back(fmt(qp[k]));
      cells.push_back(fmt(kval.real()));
      cells.push_back(fmt(kval.imag()));
      csv.row(cells);
      more_p = false;
      for (int k = H.n - 1; k >= 0; --k) {
        if (++pi[k] < qp_axes[k].count) {
          more_p = true;
          break;
        }
        pi[k] = 0;
      }
    }
    more_q = false;
    for (int k = H.n - 1; k >= 0; --k) {
      if (++qi[k] < q_axes[k].count) {
        more_q = true;
        break;
      }
      qi[k] = 0;
    }
  }

  json extra;
  extra["theta"] = result.theta;
  extra["log_amp"] = result.params.log_amp;
  extra["symplectic_defect"] = symplectic_defect(result.blocks);
  write_manifest(out_dir, "propagate", text, {"kernel.csv"}, extra);
}

void run_evolve_state(const json& cfg, const std::filesystem::path& out_dir,
                      const std::string& text) {
  const ChainSpec spec = parse_chain(need(cfg, "chain"));
  const double t = need_num(cfg, "time");
  const double step = need_num(cfg, "step");
  const double norm_tol = opt_num(cfg, "norm_tol", 1e-3);
  if (!(t >= 0.0) || !(step > 0.0)) throw ValidationError("need time >= 0 and step > 0");

  const ModeDecomposition modes = decompose(build_Z(spec), spec.mass);
  const std::vector<GridAxis> axes = parse_axes(need(cfg, "grid"), spec.n);

  const json& init = need(cfg, "initial");
  if (need(init, "kind").get<std::string>() != "gaussian")
    throw ConfigError("initial.kind must be 'gaussian'");
  const GridState psi0 = gaussian_state(axes, parse_vector(need(init, "center"), spec.n),
                                        parse_vector(need(init, "width"), spec.n),
                                        parse_vector(need(init, "momentum"), spec.n), 1.0);

  std::vector<SourceResponse> resp_path;
  if (spec.force) resp_path = propagate_path(chain_hamiltonian(spec), t, step).responses;
  const GridState psi = evolve_wavefunction(modes, resp_path, psi0, t, 1.0, norm_tol);

  std::string header;
  for (int k = 1; k <= spec.n; ++k) header += "i" + std::to_string(k) + ",";
  header += "re,im";
  CsvWriter csv(out_dir / "state.csv", header);
  std::vector<int> idx(spec.n, 0);
  for (std::size_t flat = 0; flat < psi.values.size(); ++flat) {
    std::vector<std::string> cells;
    for (int k = 0; k < spec.n; ++k) cells.push_back(std::to_string(idx[k]));
    cells.push_back(fmt(psi.values[flat].real()));
    cells.push_back(fmt(psi.values[flat].imag()));
    csv.row(cells);
    for (int k = spec.n - 1; k >= 0; --k) {
      if (++idx[k] < axes[k].count) break;
      idx[k] = 0;
    }
  }

  json extra;
  extra["axes"] = json::array();
  for (const auto& a : axes)
    extra["axes"].push_back({{"min", a.min}, {"max", a.max}, {"count", a.count}});
  extra["norm"] = psi.norm();
  write_manifest(out_dir, "evolve-state", text, {"state.csv"}, extra);
}

void run_forced_chain(const json& cfg, const std::filesystem::path& out_dir,
                      const std::string& text) {
  const LadderChain chain = parse_ladder(need(cfg, "ladder"));
  if (!chain.drive) throw ValidationError("forced-chain needs ladder.drive");
  const std::vector<double> times = parse_time_grid(need(cfg, "time"));
  const double quad_step = opt_num(cfg, "quad_step", 1e-3);

  CsvWriter csv(out_dir / "occupations.csv", "t,site,n_mean");
  ForcedResponse last;
  for (double t : times) {
    last = forced_response(chain, t, quad_step);
    for (int s = 0; s < chain.n; ++s)
      csv.row({fmt(t), std::to_string(s + 1), fmt(last.occupations[s])});
  }
  CsvWriter rt(out_dir / "rtilde.csv", "mode,re,im");
  for (int m = 0; m < chain.n; ++m)
    rt.row({std::to_string(m + 1), fmt(last.rtilde[m].real()), fmt(last.rtilde[m].imag())});
  write_manifest(out_dir, "forced-chain", text, {"occupations.csv", "rtilde.csv"});
}

}  // namespace

int run_scenario(const std::string& config_text, const std::filesystem::path& out_dir,
                 int threads) {
  std::string scenario;
  try {
    const json cfg = json::parse(config_text);
    scenario = need(cfg, "scenario").get<std::string>();

    std::filesystem::create_directories(out_dir);
    if (scenario == "chain-eigs")
      run_chain_eigs(cfg, out_dir, config_text);
    else if (scenario == "excitation-map")
      run_excitation_map(cfg, out_dir, config_text, threads);
    else if (scenario == "first-maxima")
      run_first_maxima(cfg, out_dir, config_text, threads);
    else if (scenario == "propagate")
      run_propagate(cfg, out_dir, config_text);
    else if (scenario == "evolve-state")
      run_evolve_state(cfg, out_dir, config_text);
    else if (scenario == "forced-chain")
      run_forced_chain(cfg, out_dir, config_text);
    else
      throw ConfigError("unknown scenario: " + scenario);
    return kOk;
  } catch (const json::exception& e) {
    std::cerr << "qprop: config parse error: " << e.what() << "\n";
    return kConfigParse;
  } catch (const ConfigError& e) {
    std::cerr << "qprop: config parse error: " << e.what() << "\n";
    return kConfigParse;
  } catch (const CausticError& e) {
    std::cerr << "qprop: caustic refusal: " << e.what() << "\n";
    return kCaustic;
  } catch (const GridResolutionError& e) {
    std::cerr << "qprop: resolution failure: " << e.what() << "\n";
    return kResolution;
  } catch (const ValidationError& e) {
    std::cerr << "qprop: validation failure: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qprop: validation failure: " << e.what() << "\n";
    return kValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "qprop: validation failure: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "qprop: error: " << e.what() << "\n";
    return kFailure;
  }
}

int run_config_file(const std::filesystem::path& config_path,
                    const std::filesystem::path& out_dir, int threads,
                    const std::string& expected_scenario) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "qprop: cannot read config file " << config_path << "\n";
    return kConfigParse;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  if (!expected_scenario.empty()) {
    try {
      const json cfg = json::parse(text);
      const std::string in_cfg = need(cfg, "scenario").get<std::string>();
      if (in_cfg != expected_scenario) {
        std::cerr << "qprop: config scenario '" << in_cfg << "' does not match subcommand '"
                  << expected_scenario << "'\n";
        return kConfigParse;
      }
    } catch (const std::exception& e) {
      std::cerr << "qprop: config parse error: " << e.what() << "\n";
      return kConfigParse;
    }
  }
  return run_scenario(text, out_dir, threads);
}

}  // namespace qprop::cli
