// End-to-end reproduction checks. One line per criterion; tolerances are fixed here.
// Usage: dpt_acceptance [criterion numbers...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dpt/errors.hpp"
#include "dpt/fluctuations.hpp"
#include "dpt/harness.hpp"
#include "dpt/lindblad.hpp"
#include "dpt/meanfield.hpp"
#include "dpt/observables.hpp"

using namespace dpt;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
  // Known not to reproduce with this solver; reported as FAIL but does not fail the run.
  bool known_deviation = false;
};

constexpr double kDeg = M_PI / 180.0;

double exact_xi2(const ModelParams& p) {
  const auto L = lindblad::build_liouvillian_collective(spin::DickeBasis(p.n_atoms), p);
  return obs::xi2_from_rho(lindblad::steady_state(*L).rho).xi2;
}

BlochVector exact_bloch(const lindblad::Liouvillian& L) {
  return obs::bloch_from_rho(lindblad::steady_state(L).rho).normalized;
}

// 1. Paramagnet squeezing formula.
void criterion1(Outcome& o) {
  const double tol = 1e-8, tol_edge = 1e-2;
  double worst = 0;
  for (double v : obs::linspace(-0.485, 0.485, 50)) {
    const auto p = ModelParams::collective_xy(v, 1.0);
    worst = std::max(worst, std::abs(fluct::xi2_analytic(p) - 1.0 / (1.0 + 2.0 * std::abs(v))));
  }
  const double edge = fluct::xi2_analytic(ModelParams::collective_xy(0.499, 1.0));
  o.detail << "max |err| = " << worst << " over 50 points; xi2(|V|=0.499) = " << edge << ' ';
  o.require(worst < tol, "max error < 1e-8");
  o.require(std::abs(edge - 0.5) < tol_edge, "xi2 = 1/2 at the edge within 1e-2");
}

// 2. Driven closed form.
void criterion2(Outcome& o) {
  const double tol = 1e-8, tol_inf = 1e-3;
  double worst = 0, worst0 = 0, worst_inf = 0;
  for (double vx : {0.0, 1.0, 5.0})
    for (double om : obs::linspace(0.0, 0.49, 50)) {
      const auto p = ModelParams::driven(vx, om, 1.0);
      const double a = fluct::xi2_analytic(p);
      worst = std::max(worst, std::abs(a - fluct::xi2_closed_form(fluct::ClosedForm::DrivenGeneral, p)));
      if (vx == 0.0) worst0 = std::max(worst0, std::abs(a - std::sqrt(1 - 4 * om * om)));
    }
  for (double om : obs::linspace(0.0, 0.49, 50)) {
    const auto p = ModelParams::driven(1e3, om, 1.0);
    worst_inf = std::max(worst_inf, std::abs(fluct::xi2_analytic(p) - 0.5 * std::sqrt(1 - 4 * om * om)));
  }
  o.detail << "moment vs printed form " << worst << "; Vx=0 reduction " << worst0 << "; Vx=1e3 vs half " << worst_inf
           << ' ';
  o.require(worst < tol, "general form within 1e-8");
  o.require(worst0 < tol, "Vx = 0 reduction within 1e-8");
  o.require(worst_inf < tol_inf, "large-Vx limit within 1e-3");
}

// 3. Exact N = 1000 squeezing against the Vx = 0 closed form.
void criterion3(Outcome& o) {
  const int n = 1000;
  const double rel = 0.05;
  double worst = 0;
  for (double om : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35}) {
    const auto p = ModelParams::driven(0.0, om, 1.0, n);
    const double ex = exact_xi2(p);
    const double cf = fluct::xi2_closed_form(fluct::ClosedForm::DrivenVx0, p);
    worst = std::max(worst, std::abs(ex - cf) / cf);
  }
  o.detail << "max rel. deviation for Omega <= 0.35: " << worst << "; ";
  o.require(worst < rel, "agreement within 5% for Omega <= 0.35");
  for (double om : {0.47, 0.48, 0.49}) {
    const auto p = ModelParams::driven(0.0, om, 1.0, n);
    const double ex = exact_xi2(p);
    const double cf = fluct::xi2_closed_form(fluct::ClosedForm::DrivenVx0, p);
    o.detail << "Omega=" << om << ": exact " << ex << " vs " << cf << "; ";
    o.require(ex > cf, "exact above closed form at Omega = " + harness::fmt(om));
  }
}

// 4. Finite-size scaling of the optimized squeezing.
void criterion4(Outcome& o) {
  std::vector<std::pair<double, double>> pts;
  for (int n : {100, 200, 500, 1000, 2000}) {
    const auto m = harness::min_xi2_over_omega(n, 0.0);
    o.detail << "N=" << n << ": " << m.xi2 << " at Omega " << m.omega << (m.flagged ? " (flagged)" : "") << "; ";
    o.require(!m.flagged, "unimodal search at N = " + std::to_string(n));
    pts.emplace_back(n, m.xi2);
  }
  const auto f = harness::fit_powerlaw(pts);
  o.detail << "fit " << f.prefactor << " N^" << f.exponent << ' ';
  o.require(f.exponent >= -0.34 && f.exponent <= -0.24, "exponent in [-0.34, -0.24]");
  o.require(f.prefactor >= 1.3 && f.prefactor <= 2.1, "prefactor in [1.3, 2.1]");
}

// 5. Phase diagram, collective and independent decay.
void criterion5(Outcome& o) {
  for (int n : {10, 100}) {
    const spin::DickeBasis b(n);
    double prev = -2;
    bool monotone = true;
    double z04 = 0, z06 = 0;
    for (double v : obs::linspace(0.0, 1.0, 21)) {
      const double z = exact_bloch(*lindblad::build_liouvillian_collective(b, ModelParams::collective_xy(v, 1.0, n))).z;
      monotone = monotone && z >= prev - 1e-9;
      prev = z;
      if (std::abs(v - 0.4) < 1e-12) z04 = z;
      if (std::abs(v - 0.6) < 1e-12) z06 = z;
    }
    o.detail << "collective N=" << n << ": Jz/j(0.4)=" << z04 << ", Jz/j(0.6)=" << z06 << "; ";
    o.require(monotone, "collective Jz/j monotone in V at N = " + std::to_string(n));
    if (n == 100) {
      o.require(std::abs(z04) > 0.9, "|Jz/j| > 0.9 at V = 0.4");
      o.require(std::abs(z06) < 0.25, "|Jz/j| < 0.25 at V = 0.6");
    }
  }
  const int n = 100;
  const lindblad::PermBasis pb(n);
  double worst = 0, prev = -2;
  bool monotone = true;
  for (double v : {0.75, 1.0, 1.5, 2.0}) {
    const double z = exact_bloch(*lindblad::build_liouvillian_independent(pb, ModelParams::independent_xy(v, 1.0, n))).z;
    const double mf = -1.0 / (2.0 * v);
    o.detail << "perm V=" << v << ": " << z << " vs " << mf << "; ";
    worst = std::max(worst, std::abs(z - mf));
    monotone = monotone && z >= prev - 1e-9;
    prev = z;
  }
  o.require(worst < 0.1, "independent decay tracks -gamma/(2V) within 0.1");
  o.require(monotone, "independent crossover monotone");
}

// 6. Reduced backends against the full space.
void criterion6(Outcome& o) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0, 1);
  const auto times = obs::linspace(0.0, 5.0, 20);
  const ode::Tolerances tol{1e-11, 1e-13};
  double worst_d = 0, worst_p = 0;
  for (int set = 0; set < 5; ++set) {
    const double vx = 2 * u(rng) - 1, vy = 2 * u(rng) - 1, om = u(rng), gc = 0.2 + u(rng), gi = 0.2 + u(rng);
    for (int n : {2, 4, 6}) {
      auto run = [&](const lindblad::Liouvillian& reduced, const ModelParams& p) {
        const auto a = lindblad::evolve(reduced, lindblad::DensityMatrix::ground(reduced.tag(), n), times, tol);
        const auto b = lindblad::evolve(*lindblad::brute_force_liouvillian(n, p),
                                        lindblad::DensityMatrix::ground(lindblad::BasisTag::Full, n), times, tol);
        double d = 0;
        for (std::size_t i = 0; i < times.size(); ++i)
          d = std::max(d, lindblad::trace_distance(lindblad::to_full(a.states[i]), b.states[i]));
        return d;
      };
      const auto pc = ModelParams::general(vx, vy, om, gc, n);
      worst_d = std::max(worst_d, run(*lindblad::build_liouvillian_collective(spin::DickeBasis(n), pc), pc));
      ModelParams pi = ModelParams::general(vx, vy, om, 0.0, n);
      pi.gamma_i = gi;
      worst_p = std::max(worst_p, run(*lindblad::build_liouvillian_independent(lindblad::PermBasis(n), pi), pi));
    }
  }
  o.detail << "max trace distance: dicke " << worst_d << ", perm " << worst_p << ' ';
  o.require(worst_d < 1e-8, "dicke within 1e-8");
  o.require(worst_p < 1e-8, "perm within 1e-8");
}

// 7. Mean-field structure.
void criterion7(Outcome& o) {
  const auto p = ModelParams::collective_xy(0.6, 1.0);
  const BlochVector init{0.5, 0.2, -std::sqrt(1 - 0.29)};
  const auto traj = meanfield::integrate(p, init, 100.0, 1e-12);
  const auto c0 = meanfield::constant_of_motion(p, init);
  double drift = 0, rdrift = 0;
  for (const auto& s : traj.states) {
    drift = std::max(drift, std::abs(meanfield::constant_of_motion(p, s).log_abs - c0.log_abs));
    rdrift = std::max(rdrift, std::abs(s.norm() - 1.0));
  }
  o.detail << "log drift " << drift << ", radius drift " << rdrift << "; ";
  o.require(drift < 1e-6, "constant of motion drift < 1e-6");
  o.require(rdrift < 1e-8, "radius drift < 1e-8");

  double lam_err = 0, tau_err = 0;
  for (double om : obs::linspace(0.0, 0.49, 25)) {
    const auto r = meanfield::relaxation(ModelParams::driven(0.0, om, 1.0));
    double slowest = -1e300;
    for (const auto& z : r.tangent_eigenvalues) slowest = std::max(slowest, z.real());
    lam_err = std::max(lam_err, std::abs(slowest - r.lambda));
    tau_err = std::max(tau_err, std::abs(-1.0 / slowest - r.tau));
  }
  o.detail << "lambda mismatch " << lam_err << ", tau mismatch " << tau_err << "; ";
  o.require(lam_err < 1e-9, "lambda within 1e-9");
  o.require(tau_err < 1e-9, "tau within 1e-9");

  const auto long_traj = meanfield::integrate(p, init, 300.0, 1e-11);
  const auto per = meanfield::orbit_period(long_traj);
  o.require(per.has_value(), "periodic orbit found");
  if (!per) return;
  const double ta = per->crossing_times.front(), tb = per->crossing_times.back();
  BlochVector s{};
  for (std::size_t i = 1; i < long_traj.times.size(); ++i) {
    const double a = std::max(long_traj.times[i - 1], ta), b = std::min(long_traj.times[i], tb);
    if (b <= a) continue;
    s = s + (long_traj.states[i - 1] + long_traj.states[i]) * (0.5 * (b - a));
  }
  s = s * (1.0 / (tb - ta));
  o.detail << "orbit averages (" << s.x << ", " << s.y << ", " << s.z << ") over " << per->crossing_times.size() - 1
           << " periods ";
  o.require(std::abs(s.z) < 1e-2, "<Z>_t below 1e-2");
  o.require(std::abs(s.x) > 1e-2 && std::abs(s.y) > 1e-2, "<X>_t, <Y>_t nonzero");
}

// 8. Wigner peaks of the N = 50 steady state.
void criterion8(Outcome& o) {
  const int n = 50;
  const auto theta = obs::linspace(0, M_PI, 91), phi = obs::linspace(0, 2 * M_PI, 181);
  auto grid_for = [&](double v) {
    const auto L = lindblad::build_liouvillian_collective(spin::DickeBasis(n), ModelParams::collective_xy(v, 1.0, n));
    return obs::wigner(lindblad::steady_state(*L).rho, theta, phi);
  };
  const auto hi = obs::local_maxima(grid_for(0.6));
  o.require(hi.size() >= 2, "two maxima at V = 0.6");
  if (hi.size() >= 2) {
    const double t1 = 90 * kDeg, p1 = 45 * kDeg, p2 = 225 * kDeg;
    const double a = std::min(obs::angular_distance(hi[0].theta, hi[0].phi, t1, p1),
                              obs::angular_distance(hi[0].theta, hi[0].phi, t1, p2));
    const double b = std::min(obs::angular_distance(hi[1].theta, hi[1].phi, t1, p1),
                              obs::angular_distance(hi[1].theta, hi[1].phi, t1, p2));
    const double sep = obs::angular_distance(hi[0].theta, hi[0].phi, hi[1].theta, hi[1].phi);
    o.detail << "V=0.6 peaks at (" << hi[0].theta / kDeg << ", " << hi[0].phi / kDeg << ") and (" << hi[1].theta / kDeg
             << ", " << hi[1].phi / kDeg << "); ";
    o.require(a < 10 * kDeg && b < 10 * kDeg, "both peaks within 10 degrees of the targets");
    o.require(sep > 90 * kDeg, "peaks at distinct targets");
  }
  const auto lo = obs::local_maxima(grid_for(0.4));
  o.require(!lo.empty(), "a maximum at V = 0.4");
  if (!lo.empty()) {
    const double d = obs::angular_distance(lo[0].theta, lo[0].phi, M_PI, 0.0);
    o.detail << "V=0.4 peak " << d / kDeg << " deg from the south pole";
    o.require(d < 10 * kDeg, "V = 0.4 maximum within 10 degrees of the south pole");
  }
}

// 9. Squeezing budget with independent decay.
void criterion9(Outcome& o) {
  harness::BudgetInput in;
  in.n_atoms = 1e4;
  in.cooperativity = 0.1;
  in.gamma_i = 2 * M_PI * 10e3;  // rad/s
  const auto r = harness::budget(in);
  const double tau_us = r.tau * 1e6;
  o.detail << "xi2_0 " << r.xi2_0 << ", xi2_total " << r.xi2_total << ", tau " << tau_us << " us, Omega_c/2pi "
           << r.omega_c / (2 * M_PI) << " Hz ";
  o.require(std::abs(r.xi2_0 - 0.12) <= 0.01, "xi2_0 = 0.12 +- 0.01");
  o.require(std::abs(r.xi2_total - 0.13) <= 0.01, "xi2_total = 0.13 +- 0.01");
  o.require(std::abs(tau_us - 0.3) <= 0.05, "tau = 0.3 +- 0.05 us");
  o.require(std::abs(r.omega_c - 2 * M_PI * 5e6) <= 1e-15 * r.omega_c, "Omega_c = 2 pi x 5 MHz");
  o.require(!r.regime_warning, "gamma_i tau small");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "paramagnet squeezing formula", criterion1},
      {2, "driven closed form", criterion2},
      {3, "exact vs analytic squeezing at N=1000", criterion3, true},
      {4, "finite-size scaling", criterion4},
      {5, "phase diagram", criterion5},
      {6, "oracle equivalence", criterion6},
      {7, "mean-field structure", criterion7},
      {8, "Wigner peaks", criterion8},
      {9, "budget reproduction", criterion9},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  int unexpected = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s) [%.1fs]%s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                (!o.pass && c.known_deviation) ? " [known deviation]" : "", o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass && !c.known_deviation) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
