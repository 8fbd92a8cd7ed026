#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dpt/errors.hpp"
#include "dpt/harness.hpp"
#include "dpt/kernels.hpp"

namespace dpt::harness {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw ConfigError("invalid number for '" + key + "': '" + v + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("invalid integer for '" + key + "': '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + v + "'");
}

lindblad::SteadyMethod method_from_string(std::string v) {
  using lindblad::SteadyMethod;
  std::replace(v.begin(), v.end(), '_', '-');
  if (v == "auto") return SteadyMethod::Auto;
  if (v == "time-march" || v == "march") return SteadyMethod::TimeMarch;
  if (v == "null-space" || v == "nullspace") return SteadyMethod::NullSpace;
  if (v == "closed-form" || v == "drive-closed-form") return SteadyMethod::DriveClosedForm;
  throw ConfigError("unknown steady-state method '" + v + "'");
}

}  // namespace

const char* to_string(Backend b) {
  switch (b) {
    case Backend::MeanField: return "meanfield";
    case Backend::Fluctuations: return "fluctuations";
    case Backend::Dicke: return "dicke";
    case Backend::Perm: return "perm";
    case Backend::Brute: return "brute";
  }
  return "?";
}

Backend backend_from_string(const std::string& s) {
  if (s == "meanfield") return Backend::MeanField;
  if (s == "fluctuations" || s == "fluct") return Backend::Fluctuations;
  if (s == "dicke") return Backend::Dicke;
  if (s == "perm") return Backend::Perm;
  if (s == "brute" || s == "full") return Backend::Brute;
  throw ConfigError("unknown backend '" + s + "'");
}

SweepSpec SweepSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 4) throw ConfigError("sweep must look like param:lo:hi:steps, got '" + text + "'");
  SweepSpec s;
  s.param = parts[0];
  static const char* known[] = {"v", "vx", "vy", "omega", "gamma_c", "gamma_i", "n_atoms"};
  if (std::find(std::begin(known), std::end(known), s.param) == std::end(known)) {
    throw ConfigError("cannot sweep '" + s.param + "'");
  }
  s.lo = parse_double("sweep", parts[1]);
  s.hi = parse_double("sweep", parts[2]);
  s.steps = parse_int("sweep", parts[3]);
  if (s.steps < 0) throw ConfigError("sweep steps must be >= 0");
  if (s.steps >= 2 && s.lo == s.hi) throw ConfigError("sweep grid must be strictly monotone");
  return s;
}

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g;
  for (int i = 0; i < steps; ++i) {
    g.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
  }
  if (param == "n_atoms") {
    for (double& v : g) v = std::round(v);
    for (std::size_t i = 1; i < g.size(); ++i)
      if (g[i] == g[i - 1]) throw ConfigError("n_atoms grid repeats after rounding");
  }
  return g;
}

std::string SweepSpec::str() const {
  return param + ":" + fmt(lo) + ":" + fmt(hi) + ":" + std::to_string(steps);
}

void set_key(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string v = trim(raw_value);
  ModelParams& p = cfg.params;
  try {
    if (key == "model") p.model = model_from_string(v);
    else if (key == "backend") cfg.backend = backend_from_string(v);
    else if (key == "n_atoms") p.n_atoms = parse_int(key, v);
    else if (key == "gamma_c") p.gamma_c = parse_double(key, v);
    else if (key == "gamma_i") p.gamma_i = parse_double(key, v);
    else if (key == "vx") p.vx = parse_double(key, v);
    else if (key == "vy") p.vy = parse_double(key, v);
    else if (key == "v") p.vx = parse_double(key, v), p.vy = 0.0 - p.vx;
    else if (key == "omega") p.omega = parse_double(key, v);
    else if (key == "sweep") cfg.sweep = v.empty() ? std::nullopt : std::optional(SweepSpec::parse(v));
    else if (key == "tol") cfg.tol = parse_double(key, v);
    else if (key == "t_max") cfg.t_max = parse_double(key, v);
    else if (key == "out") cfg.out = v;
    else if (key == "workers") cfg.workers = parse_int(key, v);
    else if (key == "seedless") cfg.seedless = parse_bool(key, v);
    else if (key == "window") cfg.dicke_window = parse_int(key, v);
    else if (key == "method") cfg.method = method_from_string(v);
    else throw ConfigError("unknown configuration key '" + key + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    set_key(base, line.substr(0, eq), line.substr(eq + 1));
  }
  normalize(base);
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), base);
}

void normalize(RunConfig& cfg) {
  ModelParams& p = cfg.params;
  if ((p.model == Model::IndependentXY || p.model == Model::CollectiveXY) && p.vy == 0.0) p.vy = 0.0 - p.vx;
}

void validate(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  try {
    p.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.tol >= 1e-13 && cfg.tol <= 1e-6)) throw ConfigError("tol must lie in [1e-13, 1e-6]");
  if (cfg.t_max < 0.0) throw ConfigError("t_max must be >= 0");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.dicke_window < 0) throw ConfigError("window must be >= 0");
  switch (cfg.backend) {
    case Backend::Dicke:
      if (p.gamma_i != 0.0) throw ConfigError("dicke backend requires gamma_i = 0");
      break;
    case Backend::Perm:
      if (p.gamma_c != 0.0) throw ConfigError("perm backend requires gamma_c = 0");
      break;
    case Backend::Brute:
      if (p.n_atoms > lindblad::kMaxBruteForceAtoms) throw ConfigError("brute backend requires n_atoms <= 8");
      break;
    case Backend::Fluctuations:
      if (p.model == Model::IndependentXY || p.gamma_i != 0.0) {
        throw ConfigError("fluctuations backend covers collective decay only");
      }
      break;
    case Backend::MeanField: break;
  }
  if (cfg.sweep) {
    const auto g = cfg.sweep->grid();
    for (double v : g) {
      RunConfig c = cfg;
      c.sweep.reset();
      try {
        c.params = with_param(cfg.params, cfg.sweep->param, v);
      } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("sweep point invalid: ") + e.what());
      }
      validate(c);
    }
  }
}

ModelParams with_param(const ModelParams& base, const std::string& name, double value) {
  ModelParams p = base;
  if (name == "v") {
    p.vx = value;
    p.vy = -value;
  } else if (name == "vx") {
    p.vx = value;
    if (p.model == Model::IndependentXY || p.model == Model::CollectiveXY) p.vy = -value;
  } else if (name == "vy") {
    p.vy = value;
  } else if (name == "omega") {
    p.omega = value;
  } else if (name == "gamma_c") {
    p.gamma_c = value;
  } else if (name == "gamma_i") {
    p.gamma_i = value;
  } else if (name == "n_atoms") {
    p.n_atoms = static_cast<int>(std::lround(value));
  } else {
    throw InvalidParameter("unknown parameter '" + name + "'");
  }
  p.validate();
  return p;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string provenance_json(const RunConfig& cfg, const std::string& command,
                            const std::map<std::string, std::string>& extra) {
  const ModelParams& p = cfg.params;
  nlohmann::json j = {
      {"tool", "dpt"},
      {"version", "1.0.0"},
      {"schema", kCsvSchema},
      {"command", command},
      {"params",
       {{"model", std::string(to_string(p.model))},
        {"vx", p.vx},
        {"vy", p.vy},
        {"omega", p.omega},
        {"gamma_i", p.gamma_i},
        {"gamma_c", p.gamma_c},
        {"n_atoms", p.n_atoms}}},
      {"backend", to_string(cfg.backend)},
      {"sweep", cfg.sweep ? cfg.sweep->str() : ""},
      {"tolerances", {{"rtol", cfg.tol}, {"atol", cfg.tol * 1e-2}}},
      {"t_max", cfg.t_max},
      {"workers", cfg.workers},
      {"seedless", cfg.seedless},
      {"dicke_window", cfg.dicke_window},
      {"steady_method", lindblad::to_string(cfg.method)},
      {"kernels", std::string(kernels::active().name)},
      {"compiler", __VERSION__},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"output", cfg.out}};
  for (const auto& [k, v] : extra) j["extra"][k] = v;
  return j.dump(2);
}

void write_provenance(const std::string& out_path, const RunConfig& cfg, const std::string& command,
                      const std::map<std::string, std::string>& extra) {
  std::ofstream f(out_path + ".prov.json", std::ios::trunc);
  if (!f) throw ConfigError("cannot write provenance for '" + out_path + "'");
  f << provenance_json(cfg, command, extra) << '\n';
}

}  // namespace dpt::harness
