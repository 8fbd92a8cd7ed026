#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpt/lindblad.hpp"
#include "dpt/model.hpp"

namespace dpt::harness {

enum class Backend { MeanField, Fluctuations, Dicke, Perm, Brute };
const char* to_string(Backend b);
Backend backend_from_string(const std::string& s);

// "param:lo:hi:steps"; steps = 0 gives an empty grid.
struct SweepSpec {
  std::string param;
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;

  static SweepSpec parse(const std::string& text);
  std::vector<double> grid() const;
  std::string str() const;
};

struct RunConfig {
  ModelParams params;
  Backend backend = Backend::MeanField;
  std::optional<SweepSpec> sweep;
  double tol = 1e-10;
  double t_max = 0.0;  // 0: backend default
  std::string out;
  int workers = 1;
  bool seedless = true;
  int dicke_window = 0;
  lindblad::SteadyMethod method = lindblad::SteadyMethod::Auto;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);
// XY models given only vx get vy = -vx.
void normalize(RunConfig& cfg);
// Backend/model compatibility; throws ConfigError.
void validate(const RunConfig& cfg);

// Applies one swept value (v sets vx = v, vy = -v for the XY models).
ModelParams with_param(const ModelParams& p, const std::string& name, double value);

// 17 significant digits, locale independent.
std::string fmt(double v);

struct Row {
  std::size_t index = 0;
  double value = 0.0;  // swept parameter value
  ModelParams params;
  double x = 0.0, y = 0.0, z = 0.0;
  double xi2 = 0.0;
  double residual = 0.0;
  bool converged = true;
  std::string status = "ok";
  std::string method;
  double wall_time = 0.0;
};

extern const char* const kCsvHeader;
inline constexpr const char* kCsvSchema = "dpt-sweep/1";

std::string csv_line(const Row& r, const RunConfig& cfg);
// Rows from an existing sweep CSV, keyed by index. Malformed lines are skipped.
std::map<std::size_t, std::string> read_csv_rows(const std::string& path);

// One grid point with the configured backend. Never throws for numerical
// trouble; the row carries the status instead.
Row evaluate_point(const RunConfig& cfg, const ModelParams& p);

struct SweepResult {
  std::vector<Row> rows;       // index order
  std::vector<std::string> lines;  // CSV lines in index order (without header)
  std::size_t reused = 0;      // rows taken from an existing output
  bool any_nonconverged = false;
};

// Deterministic parallel sweep. With cfg.out set, completed rows are appended
// as they finish and the file is rewritten sorted at the end; a rerun keeps
// existing rows and computes only the missing ones.
SweepResult run_sweep(const RunConfig& cfg);

struct PowerLawFit {
  double prefactor = 0.0;
  double exponent = 0.0;
  double residual = 0.0;  // RMS of log residuals
};

// Least squares in log-log coordinates; needs >= 4 positive points.
PowerLawFit fit_powerlaw(const std::vector<std::pair<double, double>>& pairs);

struct MinXi2 {
  double omega = 0.0;
  double xi2 = 0.0;
  bool flagged = false;
  std::string note;
  int evaluations = 0;
};

// Golden-section search of the exact steady-state xi2 over Omega in (0, gamma_c/2]
// for the driven model (Dicke backend), tolerance 1e-3 gamma_c.
MinXi2 min_xi2_over_omega(int n_atoms, double vx, double gamma_c = 1.0, double omega_tol = 1e-3);
// Same search over an arbitrary objective on [lo, hi].
MinXi2 minimize_scan_golden(const std::function<double(double)>& f, double lo, double hi, double tol,
                            int coarse_points = 21);

struct BudgetInput {
  double n_atoms = 0.0;
  double cooperativity = 0.0;
  double gamma_i = 0.0;       // physical units allowed (e.g. rad/s)
  bool large_vx = false;      // use the Vx -> infinity relation for the relaxation rate
  double prefactor = 1.70;    // scaling law xi2_0 = prefactor * N^exponent
  double exponent = -0.29;
};

struct BudgetReport {
  double gamma_c = 0.0;
  double xi2_0 = 0.0;
  double xi2_total = 0.0;
  double correction = 0.0;  // 2 / (N C xi2_0)
  double tau = 0.0;
  double omega_c = 0.0;
  double gamma_i_tau = 0.0;
  bool regime_warning = false;  // gamma_i tau > 0.1
  double prefactor = 0.0, exponent = 0.0;
};

BudgetReport budget(const BudgetInput& in);
std::string to_json(const BudgetInput& in, const BudgetReport& r);

// Provenance sidecar written next to every output file, at out_path + ".prov.json".
std::string provenance_json(const RunConfig& cfg, const std::string& command,
                            const std::map<std::string, std::string>& extra = {});
void write_provenance(const std::string& out_path, const RunConfig& cfg, const std::string& command,
                      const std::map<std::string, std::string>& extra = {});

}  // namespace dpt::harness
