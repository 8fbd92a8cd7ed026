#include <algorithm>
#include <cmath>

#include "dpt/errors.hpp"
#include "dpt/kernels.hpp"
#include "dpt/lindblad.hpp"

namespace dpt::lindblad {
namespace {

void check_compatible(const Liouvillian& liou, const DensityMatrix& rho) {
  if (rho.tag != liou.tag() || rho.n_atoms != liou.n_atoms() || rho.flat_size() != liou.size()) {
    throw BasisMismatch("initial state does not match the Liouvillian basis");
  }
}

ode::Rhs make_rhs(const Liouvillian& liou) {
  return [&liou](double, std::span<const double> y, std::span<double> dy) {
    liou.apply(reinterpret_cast<const cplx*>(y.data()), reinterpret_cast<cplx*>(dy.data()));
  };
}

}  // namespace

StateTrajectory evolve(const Liouvillian& liou, const DensityMatrix& rho0, const std::vector<double>& times,
                       ode::Tolerances tol) {
  check_compatible(liou, rho0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw InvalidParameter("sample times must be non-negative and strictly increasing");
    }
  }
  const std::size_t n = liou.size();
  std::vector<cplx> y(n);
  rho0.to_flat(y.data());
  ode::Options opts;
  opts.tol = tol;
  ode::DormandPrince solver(2 * n, make_rhs(liou), opts);
  std::span<double> view(reinterpret_cast<double*>(y.data()), 2 * n);

  StateTrajectory traj;
  traj.tolerances = tol;
  double t = 0.0;
  for (double ts : times) {
    if (ts > t) {
      solver.integrate(t, ts, view);
      t = ts;
    }
    DensityMatrix r = rho0;
    r.from_flat(y.data());
    traj.times.push_back(ts);
    traj.states.push_back(std::move(r));
  }
  traj.accepted_steps = solver.accepted_steps();
  traj.rejected_steps = solver.rejected_steps();
  return traj;
}

StateTrajectory evolve(const Liouvillian& liou, const DensityMatrix& rho0, double t_end,
                       std::size_t num_samples, ode::Tolerances tol) {
  if (!(t_end > 0.0) || num_samples < 2) throw InvalidParameter("need t_end > 0 and >= 2 samples");
  std::vector<double> times(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i) {
    times[i] = t_end * static_cast<double>(i) / static_cast<double>(num_samples - 1);
  }
  return evolve(liou, rho0, times, tol);
}

double residual_norm(const Liouvillian& liou, const DensityMatrix& rho) {
  check_compatible(liou, rho);
  std::vector<cplx> in(liou.size()), out(liou.size());
  rho.to_flat(in.data());
  liou.apply(in.data(), out.data());
  return std::sqrt(kernels::active().sumsq(2 * out.size(), reinterpret_cast<const double*>(out.data())));
}

}  // namespace dpt::lindblad
