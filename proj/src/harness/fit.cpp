#include <algorithm>
#include <cmath>
#include <limits>

#include "dpt/errors.hpp"
#include "dpt/harness.hpp"
#include "dpt/observables.hpp"

namespace dpt::harness {

PowerLawFit fit_powerlaw(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 4) throw DomainError("power-law fit needs at least 4 points");
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pairs) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw DomainError("power-law fit needs positive finite data");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 1e-300)) throw DomainError("power-law fit needs distinct abscissae");
  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / den;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = std::exp(intercept);
  double ss = 0;
  for (const auto& [x, y] : pairs) {
    const double r = std::log(y) - intercept - fit.exponent * std::log(x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

MinXi2 minimize_scan_golden(const std::function<double(double)>& f, double lo, double hi, double tol,
                            int coarse_points) {
  if (!(hi > lo) || coarse_points < 3 || !(tol > 0.0)) throw InvalidParameter("bad search interval");
  MinXi2 out;
  auto eval = [&](double x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  const auto xs = obs::linspace(lo, hi, static_cast<std::size_t>(coarse_points));
  std::vector<double> ys;
  for (double x : xs) ys.push_back(eval(x));
  const std::size_t k = static_cast<std::size_t>(std::min_element(ys.begin(), ys.end()) - ys.begin());

  // Unimodal on the grid: non-increasing up to k, non-decreasing after.
  bool unimodal = std::isfinite(ys[k]);
  for (std::size_t i = 1; i <= k && unimodal; ++i) unimodal = ys[i] <= ys[i - 1];
  for (std::size_t i = k + 1; i < ys.size() && unimodal; ++i) unimodal = ys[i] >= ys[i - 1];
  if (!unimodal) {
    out.omega = xs[k];
    out.xi2 = ys[k];
    out.flagged = true;
    out.note = "objective not unimodal on the coarse grid; grid-scan minimum reported";
    return out;
  }

  double a = xs[k == 0 ? 0 : k - 1], b = xs[std::min(k + 1, xs.size() - 1)];
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a);
      fc = eval(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a);
      fd = eval(d);
    }
  }
  // Compare against the grid point too; the bracket ends may sit on the boundary.
  if (fc <= fd && fc < ys[k]) out.omega = c, out.xi2 = fc;
  else if (fd < fc && fd < ys[k]) out.omega = d, out.xi2 = fd;
  else out.omega = xs[k], out.xi2 = ys[k];
  return out;
}

MinXi2 min_xi2_over_omega(int n_atoms, double vx, double gamma_c, double omega_tol) {
  if (n_atoms < 1) throw InvalidParameter("n_atoms must be positive");
  const spin::DickeBasis basis(n_atoms);
  auto objective = [&](double omega) {
    const auto p = ModelParams::driven(vx, omega, gamma_c, n_atoms);
    const auto liou = lindblad::build_liouvillian_collective(basis, p);
    try {
      return obs::xi2_from_rho(lindblad::steady_state(*liou).rho).xi2;
    } catch (const UndefinedSqueezing&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  MinXi2 res = minimize_scan_golden(objective, 0.0, 0.5 * gamma_c, omega_tol * gamma_c);
  if (n_atoms == 1) {
    res.flagged = true;
    res.note = "single atom: no entanglement, xi2 >= 1";
  }
  return res;
}

}  // namespace dpt::harness
