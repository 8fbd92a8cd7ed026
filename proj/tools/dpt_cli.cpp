#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpt/errors.hpp"
#include "dpt/fluctuations.hpp"
#include "dpt/harness.hpp"
#include "dpt/lindblad.hpp"
#include "dpt/meanfield.hpp"
#include "dpt/observables.hpp"

using namespace dpt;
using harness::RunConfig;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;

// Flags mirrored from configuration keys. The CLI value wins over the file.
const std::vector<std::pair<std::string, std::string>> kKeyFlags = {
    {"model", "independent_xy | collective_xy | driven | general"},
    {"backend", "meanfield | fluctuations | dicke | perm | brute"},
    {"n-atoms", "number of atoms N"},
    {"gamma-c", "collective decay rate"},
    {"gamma-i", "independent decay rate"},
    {"vx", "Vx coupling (XY models: V, with vy = -vx)"},
    {"vy", "Vy coupling"},
    {"omega", "drive strength"},
    {"sweep", "param:lo:hi:steps"},
    {"tol", "relative tolerance in [1e-13, 1e-6]"},
    {"t-max", "integration time cap (0: default)"},
    {"out", "output path (default: stdout)"},
    {"workers", "sweep worker threads"},
    {"window", "Dicke window: keep only the lowest levels (0: all)"},
    {"method", "auto | time-march | null-space | closed-form"},
};

struct Common {
  std::string config;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> opts;
  bool seedless = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "flat key = value configuration file");
  for (const auto& [key, help] : kKeyFlags) c.opts.emplace_back(key, sub->add_option("--" + key, c.values[key], help));
  sub->add_flag("--seedless", c.seedless, "deterministic run (always on; recorded in provenance)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  // NaN marks "not given"; filled with the model's natural channel below.
  cfg.params.gamma_c = std::numeric_limits<double>::quiet_NaN();
  cfg.params.gamma_i = std::numeric_limits<double>::quiet_NaN();
  if (!c.config.empty()) cfg = harness::load_config(c.config, cfg);
  for (const auto& [key, opt] : c.opts)
    if (opt->count() > 0) harness::set_key(cfg, key, c.values.at(key));
  ModelParams& p = cfg.params;
  const bool indep = p.model == Model::IndependentXY;
  if (std::isnan(p.gamma_c)) p.gamma_c = indep ? 0.0 : (std::isnan(p.gamma_i) || p.gamma_i == 0.0 ? 1.0 : 0.0);
  if (std::isnan(p.gamma_i)) p.gamma_i = indep ? 1.0 : 0.0;
  harness::normalize(cfg);
  cfg.seedless = true;
  return cfg;
}

// Writes text to cfg.out (or stdout) and the provenance sidecar.
void emit(const RunConfig& cfg, const std::string& command, const std::string& text,
          const std::map<std::string, std::string>& extra = {}) {
  if (cfg.out.empty()) {
    std::cout << text;
    harness::write_provenance("dpt-" + command, cfg, command, extra);
    return;
  }
  std::ofstream f(cfg.out, std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + cfg.out + "'");
  f << text;
  harness::write_provenance(cfg.out, cfg, command, extra);
}

json cplx_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json bloch_json(const BlochVector& b) { return json::array({b.x, b.y, b.z}); }

lindblad::LiouvillianPtr make_liouvillian(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  switch (cfg.backend) {
    case harness::Backend::Dicke:
      return lindblad::build_liouvillian_collective(spin::DickeBasis(p.n_atoms), p, cfg.dicke_window);
    case harness::Backend::Perm:
      return lindblad::build_liouvillian_independent(lindblad::PermBasis(p.n_atoms), p);
    case harness::Backend::Brute:
      return lindblad::brute_force_liouvillian(p.n_atoms, p);
    default:
      throw ConfigError("this command needs an exact backend (dicke, perm or brute)");
  }
}

lindblad::SteadyResult solve_steady(const RunConfig& cfg) {
  const auto liou = make_liouvillian(cfg);
  lindblad::SteadyOptions opts;
  opts.method = cfg.method;
  opts.t_max = cfg.t_max;
  opts.tol = {cfg.tol, cfg.tol * 1e-2};
  return lindblad::steady_state(*liou, opts);
}

int cmd_meanfield(const RunConfig& cfg, const std::string& traj_path) {
  const ModelParams& p = cfg.params;
  json j;
  j["model"] = std::string(to_string(p.model));
  try {
    j["critical_point"] = meanfield::critical_point(p);
  } catch (const Error&) {
    j["critical_point"] = nullptr;
  }
  json fps = json::array();
  try {
    for (const auto& f : meanfield::fixed_points(p)) {
      json e;
      e["point"] = bloch_json(f.point);
      e["classification"] = meanfield::to_string(f.classification);
      json ev = json::array();
      for (const auto& z : f.classifying_eigenvalues) ev.push_back(cplx_json(z));
      e["eigenvalues"] = ev;
      fps.push_back(e);
    }
  } catch (const DomainError& e) {
    j["fixed_points_note"] = e.what();
  }
  j["fixed_points"] = fps;
  if (p.model == Model::Driven) {
    try {
      const auto r = meanfield::relaxation(p);
      j["relaxation"] = {{"lambda", r.lambda}, {"tau", r.tau}, {"fixed_point", bloch_json(r.fixed_point)}};
    } catch (const NoFixedPoint& e) {
      j["relaxation"] = e.what();
    }
  }
  if (cfg.t_max > 0.0) {
    const BlochVector init{0.1, 0.05, -std::sqrt(1.0 - 0.0125)};
    const auto traj = meanfield::integrate(p, init, cfg.t_max, cfg.tol);
    j["trajectory"] = {{"t_end", cfg.t_max},
                       {"initial", bloch_json(init)},
                       {"final", bloch_json(traj.states.back())},
                       {"time_average", bloch_json(meanfield::time_average(traj, 0.5))},
                       {"accepted_steps", traj.accepted_steps}};
    if (const auto per = meanfield::orbit_period(traj, 0.5))
      j["trajectory"]["period"] = per->period;
    if (!traj_path.empty()) {
      std::ofstream f(traj_path, std::ios::trunc);
      if (!f) throw ConfigError("cannot write '" + traj_path + "'");
      f << "t,x,y,z\n";
      for (std::size_t i = 0; i < traj.times.size(); ++i)
        f << harness::fmt(traj.times[i]) << ',' << harness::fmt(traj.states[i].x) << ','
          << harness::fmt(traj.states[i].y) << ',' << harness::fmt(traj.states[i].z) << '\n';
      harness::write_provenance(traj_path, cfg, "meanfield");
    }
  }
  emit(cfg, "meanfield", j.dump(2) + "\n");
  return 0;
}

int cmd_fluct(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  json j;
  try {
    const auto a = fluct::steady_angles(p);
    j["theta"] = a.theta;
    j["phi"] = a.phi;
    const auto q = fluct::quad_coeffs(p, a);
    j["b1"] = cplx_json(q.b1);
    j["b2"] = q.b2;
    const auto m = fluct::moment_steady_state(p);
    j["a_sq"] = cplx_json(m.a_sq);
    j["n_occ"] = m.n_occ;
    j["xi2"] = fluct::xi2_from_moments(m);
    j["status"] = "ok";
  } catch (const NoFixedPoint& e) {
    j["status"] = "no-fixed-point";
    j["message"] = e.what();
  } catch (const CriticalDivergence& e) {
    j["status"] = "critical";
    j["message"] = e.what();
  }
  json cf = json::object();
  for (auto v : {fluct::ClosedForm::Paramagnet, fluct::ClosedForm::DrivenGeneral, fluct::ClosedForm::DrivenVx0,
                 fluct::ClosedForm::DrivenVxInf}) {
    try {
      cf[fluct::to_string(v)] = fluct::xi2_closed_form(v, p);
    } catch (const DomainError&) {
    }
  }
  j["closed_forms"] = cf;
  emit(cfg, "fluct", j.dump(2) + "\n");
  return 0;
}

int cmd_steady(const RunConfig& cfg, const std::string& state_path) {
  const auto res = solve_steady(cfg);
  json j;
  j["method"] = lindblad::to_string(res.method);
  j["solver"] = res.solver;
  j["residual"] = res.residual;
  j["t_reached"] = res.t_reached;
  j["trace"] = res.rho.trace().real();
  j["min_eigenvalue"] = res.rho.min_eigenvalue();
  j["bloch"] = bloch_json(obs::bloch_from_rho(res.rho).normalized);
  try {
    j["squeezing"] = json::parse(obs::to_json(obs::xi2_from_rho(res.rho)));
  } catch (const UndefinedSqueezing& e) {
    j["squeezing"] = e.what();
  }
  if (!state_path.empty()) {
    lindblad::StateFile file;
    file.params = cfg.params;
    file.tolerances = {cfg.tol, cfg.tol * 1e-2};
    file.states.push_back(res.rho);
    file.note = std::string("steady state, ") + lindblad::to_string(res.method);
    lindblad::write_states(state_path, file);
    harness::write_provenance(state_path, cfg, "steady");
  }
  emit(cfg, "steady", j.dump(2) + "\n", {{"steady_method", lindblad::to_string(res.method)}});
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.out.empty()) {
    RunConfig c = cfg;
    const auto res = harness::run_sweep(c);
    std::cout << harness::kCsvHeader << '\n';
    for (const auto& l : res.lines) std::cout << l << '\n';
    harness::write_provenance("dpt-sweep", cfg, "sweep");
    return res.any_nonconverged ? kExitNonConvergence : 0;
  }
  const auto res = harness::run_sweep(cfg);
  harness::write_provenance(cfg.out, cfg, "sweep",
                            {{"csv_header", harness::kCsvHeader}, {"rows_reused", std::to_string(res.reused)}});
  std::cerr << res.lines.size() << " rows (" << res.reused << " reused) -> " << cfg.out << '\n';
  return res.any_nonconverged ? kExitNonConvergence : 0;
}

int cmd_wigner(RunConfig cfg, int n_theta, const std::string& matrix_path) {
  if (cfg.backend != harness::Backend::Dicke) throw ConfigError("wigner needs the dicke backend");
  if (n_theta < 3) throw ConfigError("grid needs at least 3 theta points");
  const auto res = solve_steady(cfg);
  const auto theta = obs::linspace(0.0, M_PI, static_cast<std::size_t>(n_theta));
  const auto phi = obs::linspace(0.0, 2.0 * M_PI, static_cast<std::size_t>(2 * n_theta - 1));
  const auto grid = obs::wigner(res.rho, theta, phi);
  std::ostringstream os;
  obs::write_wigner_csv(os, grid);
  std::map<std::string, std::string> extra{{"grid", std::to_string(n_theta) + "x" + std::to_string(phi.size())}};
  const auto peaks = obs::local_maxima(grid);
  for (std::size_t i = 0; i < std::min<std::size_t>(peaks.size(), 4); ++i)
    extra["peak" + std::to_string(i)] = harness::fmt(peaks[i].theta) + "," + harness::fmt(peaks[i].phi) + "," +
                                        harness::fmt(peaks[i].value);
  emit(cfg, "wigner", os.str(), extra);
  if (!matrix_path.empty()) {
    std::ofstream f(matrix_path, std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + matrix_path + "'");
    obs::write_wigner_matrix(f, grid);
    harness::write_provenance(matrix_path, cfg, "wigner", extra);
  }
  return 0;
}

std::vector<std::pair<double, double>> read_pairs(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  std::vector<std::pair<double, double>> pairs;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double n, x;
    if (is >> n >> x) pairs.emplace_back(n, x);  // header lines fail to parse and are skipped
  }
  return pairs;
}

int cmd_fit(const RunConfig& cfg, const std::string& input, const std::vector<int>& sizes, double omega_tol) {
  std::vector<std::pair<double, double>> pairs;
  json points = json::array();
  if (!input.empty()) {
    pairs = read_pairs(input);
    for (const auto& [n, x] : pairs) points.push_back({{"n_atoms", n}, {"xi2_min", x}});
  } else {
    if (cfg.params.model != Model::Driven) throw ConfigError("fit scans the driven model");
    // Fail before minutes of scanning, not after.
    if (sizes.size() < 4) throw ConfigError("fit needs at least 4 sizes");
    for (int n : sizes) {
      const auto m = harness::min_xi2_over_omega(n, cfg.params.vx, cfg.params.gamma_c, omega_tol);
      std::cerr << "N=" << n << " omega*=" << m.omega << " xi2_min=" << m.xi2 << (m.flagged ? " (flagged)" : "")
                << '\n';
      pairs.emplace_back(n, m.xi2);
      points.push_back({{"n_atoms", n},
                        {"omega", m.omega},
                        {"xi2_min", m.xi2},
                        {"flagged", m.flagged},
                        {"note", m.note},
                        {"evaluations", m.evaluations}});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  const auto fit = harness::fit_powerlaw(pairs);
  json j;
  j["points"] = points;
  j["prefactor"] = fit.prefactor;
  j["exponent"] = fit.exponent;
  j["residual"] = fit.residual;
  // Sensitivity of the exponent to the smallest N included.
  json sens = json::array();
  for (std::size_t k = 0; pairs.size() - k >= 4; ++k) {
    const std::vector<std::pair<double, double>> sub(pairs.begin() + static_cast<long>(k), pairs.end());
    const auto f = harness::fit_powerlaw(sub);
    sens.push_back({{"min_n", sub.front().first}, {"prefactor", f.prefactor}, {"exponent", f.exponent}});
  }
  j["sensitivity"] = sens;
  emit(cfg, "fit", j.dump(2) + "\n");
  return 0;
}

int cmd_budget(const RunConfig& cfg, harness::BudgetInput in, const std::string& fit_json) {
  in.n_atoms = cfg.params.n_atoms;
  in.gamma_i = cfg.params.gamma_i;
  if (!fit_json.empty()) {
    std::ifstream f(fit_json);
    if (!f) throw ConfigError("cannot read '" + fit_json + "'");
    const auto j = json::parse(f, nullptr, false);
    if (j.is_discarded() || !j.contains("prefactor") || !j.contains("exponent"))
      throw ConfigError("'" + fit_json + "' is not a fit report");
    in.prefactor = j["prefactor"].get<double>();
    in.exponent = j["exponent"].get<double>();
  }
  const auto r = harness::budget(in);
  if (r.regime_warning) std::cerr << "warning: gamma_i * tau = " << r.gamma_i_tau << " > 0.1\n";
  emit(cfg, "budget", harness::to_json(in, r) + "\n");
  return 0;
}

int cmd_oracle(const RunConfig& cfg, const std::vector<int>& sizes) {
  // Parameter sets from a Weyl sequence: reproducible without any seed.
  const double alpha[] = {0.6180339887498949, 0.4142135623730951, 0.7320508075688772, 0.2360679774997897};
  json j = json::array();
  double worst = 0.0;
  for (int n : sizes) {
    if (n > lindblad::kMaxBruteForceAtoms) throw ConfigError("oracle-check supports N <= 8");
    for (int s = 1; s <= 5; ++s) {
      double u[4];
      for (int k = 0; k < 4; ++k) u[k] = std::fmod(s * alpha[k], 1.0);
      const auto pc = ModelParams::general(2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0, u[2], 0.5 + u[3], n);
      const auto pi = ModelParams::independent_xy(1.5 * u[0] - 0.2, 0.5 + u[3], n);
      const std::vector<double> times = obs::linspace(0.0, 4.0, 20);
      const ode::Tolerances tol{1e-11, 1e-13};
      auto compare = [&](const lindblad::Liouvillian& reduced, const ModelParams& p) {
        const auto full = lindblad::brute_force_liouvillian(n, p);
        const auto ra = lindblad::evolve(reduced, lindblad::DensityMatrix::ground(reduced.tag(), n), times, tol);
        const auto rb = lindblad::evolve(*full, lindblad::DensityMatrix::ground(lindblad::BasisTag::Full, n), times, tol);
        double d = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
          d = std::max(d, lindblad::trace_distance(lindblad::to_full(ra.states[i]), rb.states[i]));
        return d;
      };
      const double dd = compare(*lindblad::build_liouvillian_collective(spin::DickeBasis(n), pc), pc);
      const double dp = compare(*lindblad::build_liouvillian_independent(lindblad::PermBasis(n), pi), pi);
      worst = std::max({worst, dd, dp});
      j.push_back({{"n_atoms", n}, {"set", s}, {"dicke_vs_full", dd}, {"perm_vs_full", dp}});
    }
  }
  json out{{"cases", j}, {"max_trace_distance", worst}, {"threshold", 1e-8}, {"pass", worst < 1e-8}};
  emit(cfg, "oracle-check", out.dump(2) + "\n");
  return worst < 1e-8 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven-dissipative spin squeezing toolkit"};
  app.require_subcommand(1);

  Common c_mf, c_fl, c_st, c_sw, c_wi, c_fi, c_bu, c_or;
  auto* mf = app.add_subcommand("meanfield", "fixed points, stability and trajectories");
  add_common(mf, c_mf);
  std::string traj_path;
  mf->add_option("--trajectory", traj_path, "write the trajectory CSV (needs --t-max)");

  auto* fl = app.add_subcommand("fluct", "Gaussian fluctuations and closed-form squeezing");
  add_common(fl, c_fl);

  auto* st = app.add_subcommand("steady", "exact steady state and squeezing report");
  add_common(st, c_st);
  std::string state_path;
  st->add_option("--state", state_path, "write the steady state container");

  auto* sw = app.add_subcommand("sweep", "parameter sweep to CSV");
  add_common(sw, c_sw);

  auto* wi = app.add_subcommand("wigner", "Wigner function of the exact steady state");
  add_common(wi, c_wi);
  int n_theta = 91;
  std::string matrix_path;
  wi->add_option("--grid", n_theta, "theta points (phi gets 2n-1)");
  wi->add_option("--matrix", matrix_path, "also write the matrix text format");

  auto* fi = app.add_subcommand("fit", "power-law fit of the minimal squeezing versus N");
  add_common(fi, c_fi);
  std::string fit_input;
  std::vector<int> sizes{100, 200, 500, 1000, 2000};
  double omega_tol = 1e-3;
  fi->add_option("--input", fit_input, "CSV of N,xi2_min pairs instead of computing them");
  fi->add_option("--sizes", sizes, "atom numbers to scan")->delimiter(',');
  fi->add_option("--omega-tol", omega_tol, "search tolerance in units of gamma_c");

  auto* bu = app.add_subcommand("budget", "squeezing budget with independent decay");
  add_common(bu, c_bu);
  harness::BudgetInput bin;
  std::string fit_json;
  bu->add_option("--cooperativity", bin.cooperativity, "single-atom cooperativity")->required();
  bu->add_flag("--large-vx", bin.large_vx, "use the large-Vx relaxation rate");
  bu->add_option("--prefactor", bin.prefactor, "scaling-law prefactor");
  bu->add_option("--exponent", bin.exponent, "scaling-law exponent");
  bu->add_option("--fit", fit_json, "take the scaling law from a fit report");

  auto* orc = app.add_subcommand("oracle-check", "reduced backends against the full-space construction");
  add_common(orc, c_or);
  std::vector<int> oracle_sizes{2, 4, 6};
  orc->add_option("--sizes", oracle_sizes, "atom numbers")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (mf->parsed()) {
      auto cfg = resolve(c_mf);
      harness::validate(cfg);
      return cmd_meanfield(cfg, traj_path);
    }
    if (fl->parsed()) {
      auto cfg = resolve(c_fl);
      harness::validate(cfg);
      return cmd_fluct(cfg);
    }
    if (st->parsed()) {
      auto cfg = resolve(c_st);
      harness::validate(cfg);
      return cmd_steady(cfg, state_path);
    }
    if (sw->parsed()) return cmd_sweep(resolve(c_sw));
    if (wi->parsed()) {
      auto cfg = resolve(c_wi);
      harness::validate(cfg);
      return cmd_wigner(cfg, n_theta, matrix_path);
    }
    if (fi->parsed()) {
      auto cfg = resolve(c_fi);
      if (cfg.params.model == Model::General && cfg.params.vy == 0.0 && cfg.params.gamma_i == 0.0)
        cfg.params.model = Model::Driven;
      harness::validate(cfg);
      return cmd_fit(cfg, fit_input, sizes, omega_tol);
    }
    if (bu->parsed()) {
      auto cfg = resolve(c_bu);
      return cmd_budget(cfg, bin, fit_json);
    }
    if (orc->parsed()) {
      auto cfg = resolve(c_or);
      return cmd_oracle(cfg, oracle_sizes);
    }
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
