#include <algorithm>
#include <cmath>

#include "dpt/errors.hpp"
#include "dpt/observables.hpp"

namespace dpt::obs {

Vec3 moment_rhs(const SpinMoments& m, const ModelParams& p) {
  const double n = p.n_atoms;
  const double g = p.gamma_c;
  const auto& s = m.second;  // s[a][b] = <{Ja,Jb}>/2
  const double ayz = 2.0 * s[1][2], axz = 2.0 * s[0][2], axy = 2.0 * s[0][1];
  return {
      p.vy / n * ayz + g / (2.0 * n) * (axz - m.mean[0]),
      -p.vx / n * axz - p.omega * m.mean[2] + g / (2.0 * n) * (ayz - m.mean[1]),
      (p.vx - p.vy) / n * axy + p.omega * m.mean[1] - g / n * (s[0][0] + s[1][1] + m.mean[2]),
  };
}

MomentResiduals moment_residuals(const lindblad::StateTrajectory& traj, const ModelParams& params) {
  if (params.gamma_i != 0.0) throw DomainError("the exact moment equations hold for collective decay only");
  const std::size_t n = traj.times.size();
  if (n < 5 || traj.states.size() != n) throw InvalidParameter("need at least 5 equally spaced samples");
  const double h = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(traj.times[i] - traj.times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw InvalidParameter("moment residuals need equally spaced samples");
    }
  }
  std::vector<SpinMoments> mom;
  mom.reserve(n);
  for (const auto& s : traj.states) mom.push_back(spin_moments(s));

  MomentResiduals r;
  double fd_gap = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const Vec3 exact = moment_rhs(mom[i], params);
    Vec3 res;
    for (int a = 0; a < 3; ++a) {
      const double fd4 = (-mom[i + 2].mean[a] + 8.0 * mom[i + 1].mean[a] - 8.0 * mom[i - 1].mean[a] +
                          mom[i - 2].mean[a]) / (12.0 * h);
      const double fd2 = (mom[i + 1].mean[a] - mom[i - 1].mean[a]) / (2.0 * h);
      res[a] = fd4 - exact[a];
      r.max_residual = std::max(r.max_residual, std::abs(res[a]));
      r.max_rate = std::max(r.max_rate, std::abs(exact[a]));
      fd_gap = std::max(fd_gap, std::abs(fd4 - fd2));
    }
    r.times.push_back(traj.times[i]);
    r.residuals.push_back(res);
  }
  // The second-order stencil should agree closely when the signal is resolved.
  r.aliasing_warning = fd_gap > 0.05 * std::max(r.max_rate, 1e-300);
  return r;
}

}  // namespace dpt::obs
