#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "dpt/errors.hpp"
#include "dpt/fluctuations.hpp"
#include "dpt/harness.hpp"
#include "dpt/meanfield.hpp"
#include "dpt/observables.hpp"

namespace dpt::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void meanfield_point(const RunConfig& cfg, const ModelParams& p, Row& row) {
  std::vector<meanfield::FixedPointReport> fps;
  try {
    fps = meanfield::fixed_points(p);
  } catch (const DomainError&) {
  }
  for (const auto& f : fps) {
    if (f.classification == meanfield::Stability::Stable) {
      row.x = f.point.x, row.y = f.point.y, row.z = f.point.z;
      const BlochVector d = meanfield::rhs(p, f.point);
      row.residual = d.norm();
      row.method = "fixed-point";
      row.xi2 = kNaN;
      return;
    }
  }
  // No attracting point: report the long-time average of a trajectory started near the pole.
  const double g = p.decay_rate() > 0.0 ? p.decay_rate() : 1.0;
  const double t_end = cfg.t_max > 0.0 ? cfg.t_max : 200.0 / g;
  const BlochVector init{0.1, 0.05, -std::sqrt(1.0 - 0.0125)};
  const auto traj = meanfield::integrate(p, init, t_end, cfg.tol);
  const BlochVector avg = meanfield::time_average(traj, 0.5);
  row.x = avg.x, row.y = avg.y, row.z = avg.z;
  row.residual = kNaN;
  row.xi2 = kNaN;
  row.method = "time-average";
}

void fluct_point(const ModelParams& p, Row& row) {
  row.method = "gaussian";
  row.residual = kNaN;
  try {
    const auto a = fluct::steady_angles(p);
    row.x = std::sin(a.theta) * std::cos(a.phi);
    row.y = std::sin(a.theta) * std::sin(a.phi);
    row.z = std::cos(a.theta);
    row.xi2 = fluct::xi2_analytic(p);
  } catch (const NoFixedPoint&) {
    row.x = row.y = row.z = row.xi2 = kNaN;
    row.status = "no-fixed-point";
  } catch (const CriticalDivergence&) {
    row.xi2 = kNaN;
    row.status = "critical";
  }
}

void exact_point(const RunConfig& cfg, const ModelParams& p, Row& row) {
  lindblad::LiouvillianPtr liou;
  switch (cfg.backend) {
    case Backend::Dicke:
      liou = lindblad::build_liouvillian_collective(spin::DickeBasis(p.n_atoms), p, cfg.dicke_window);
      break;
    case Backend::Perm:
      liou = lindblad::build_liouvillian_independent(lindblad::PermBasis(p.n_atoms), p);
      break;
    default:
      liou = lindblad::brute_force_liouvillian(p.n_atoms, p);
      break;
  }
  lindblad::SteadyOptions opts;
  opts.method = cfg.method;
  opts.t_max = cfg.t_max;
  opts.tol = {cfg.tol, cfg.tol * 1e-2};
  try {
    const auto res = lindblad::steady_state(*liou, opts);
    const auto b = obs::bloch_from_rho(res.rho);
    row.x = b.normalized.x, row.y = b.normalized.y, row.z = b.normalized.z;
    try {
      row.xi2 = obs::xi2_from_rho(res.rho).xi2;
    } catch (const UndefinedSqueezing&) {
      row.xi2 = kNaN;
    }
    row.residual = res.residual;
    row.method = lindblad::to_string(res.method);
  } catch (const NonConvergence& e) {
    row.converged = false;
    row.status = "nonconverged";
    row.residual = e.residual();
    row.x = row.y = row.z = row.xi2 = kNaN;
    row.method = lindblad::to_string(cfg.method);
  }
}

}  // namespace

Row evaluate_point(const RunConfig& cfg, const ModelParams& p) {
  Row row;
  row.params = p;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (cfg.backend) {
      case Backend::MeanField: meanfield_point(cfg, p, row); break;
      case Backend::Fluctuations: fluct_point(p, row); break;
      default: exact_point(cfg, p, row); break;
    }
  } catch (const StiffnessError& e) {
    row.converged = false;
    row.status = std::string("stiff: ") + e.what();
    row.x = row.y = row.z = row.xi2 = row.residual = kNaN;
  } catch (const Error& e) {
    row.status = std::string("error: ") + e.what();
    row.x = row.y = row.z = row.xi2 = row.residual = kNaN;
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

SweepResult run_sweep(const RunConfig& cfg) {
  validate(cfg);
  std::vector<double> grid;
  if (cfg.sweep) grid = cfg.sweep->grid();
  else grid.push_back(kNaN);
  const std::size_t n = grid.size();

  SweepResult result;
  result.rows.resize(n);
  result.lines.resize(n);
  std::vector<char> have(n, 0);

  if (!cfg.out.empty()) {
    // Keep rows of a previous run whose grid value still matches.
    for (auto& [idx, line] : read_csv_rows(cfg.out)) {
      if (idx >= n) continue;
      Row probe;
      probe.index = idx;
      probe.value = grid[idx];
      const std::string prefix = std::to_string(idx) + "," + (cfg.sweep ? cfg.sweep->param : "none") + "," +
                                 fmt(probe.value) + ",";
      if (line.compare(0, prefix.size(), prefix) != 0) continue;
      result.lines[idx] = line;
      have[idx] = 1;
      ++result.reused;
      if (line.find(",nonconverged,") != std::string::npos) result.any_nonconverged = true;
    }
  }

  std::ofstream out;
  std::mutex out_mutex;
  if (!cfg.out.empty()) {
    out.open(cfg.out, std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + cfg.out + "'");
    out << kCsvHeader << '\n';
    for (std::size_t i = 0; i < n; ++i)
      if (have[i]) out << result.lines[i] << '\n';
    out.flush();
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < n; ++i)
    if (!have[i]) todo.push_back(i);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      const std::size_t i = todo[t];
      const ModelParams p = cfg.sweep ? with_param(cfg.params, cfg.sweep->param, grid[i]) : cfg.params;
      Row row = evaluate_point(cfg, p);
      row.index = i;
      row.value = grid[i];
      const std::string line = csv_line(row, cfg);
      std::lock_guard<std::mutex> lock(out_mutex);
      result.rows[i] = row;
      result.lines[i] = line;
      if (!row.converged) result.any_nonconverged = true;
      if (out.is_open()) {
        out << line << '\n';
        out.flush();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(todo.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  if (out.is_open()) {
    out.close();
    std::ofstream sorted(cfg.out, std::ios::trunc);
    sorted << kCsvHeader << '\n';
    for (const auto& l : result.lines) sorted << l << '\n';
    if (!sorted) throw ConfigError("cannot write '" + cfg.out + "'");
  }
  return result;
}

}  // namespace dpt::harness
