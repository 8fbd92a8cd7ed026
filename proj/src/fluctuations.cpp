#include "dpt/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "dpt/errors.hpp"

namespace dpt::fluct {
namespace {

using cplx = std::complex<double>;

// Damping below this fraction of the fastest rate counts as critical.
constexpr double kMinDampingRatio = 1e-12;

void require_collective(const ModelParams& p) {
  p.validate();
  if (p.model == Model::IndependentXY || p.gamma_i != 0.0) {
    throw DomainError("fluctuation theory covers collective decay only");
  }
  if (!(p.gamma_c > 0.0)) throw DomainError("fluctuation theory needs gamma_c > 0");
}

}  // namespace

SteadyAngles steady_angles(const ModelParams& p) {
  require_collective(p);
  const double gc = p.gamma_c;
  const double D = gc * gc + 4.0 * p.vx * p.vy;
  const double rad = D * D - 4.0 * p.omega * p.omega * (gc * gc + 4.0 * p.vy * p.vy);
  // Omega < Omega_c, with Omega_c <= 0 when D <= 0.
  if (!(D > 0.0) || !(rad > 0.0)) throw NoFixedPoint("Omega >= Omega_c: no stable fixed point");
  const double x = -4.0 * p.vy * p.omega / D;
  const double y = 2.0 * gc * p.omega / D;
  const double z = -std::sqrt(rad) / D;
  SteadyAngles a;
  a.theta = std::acos(std::clamp(z, -1.0, 1.0));
  a.phi = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
  if (a.phi == -std::numbers::pi) a.phi = std::numbers::pi;
  return a;
}

QuadraticCoeffs quad_coeffs(const ModelParams& p, const SteadyAngles& a) {
  const double ct = std::cos(a.theta), st = std::sin(a.theta);
  const double cp = std::cos(a.phi), sp = std::sin(a.phi);
  const cplx i(0.0, 1.0);
  const cplx u = ct * cp + i * sp;
  const cplx w = cp + i * ct * sp;
  QuadraticCoeffs q;
  q.b1 = std::exp(-2.0 * i * a.phi) / 4.0 * (p.vx * u * u - p.vy * w * w);
  q.b2 = (p.vx + p.vy + 3.0 * (p.vx + p.vy) * std::cos(2.0 * a.theta) - 8.0 * p.omega * st * cp +
          6.0 * (p.vy - p.vx) * st * st * std::cos(2.0 * a.phi)) /
         8.0;
  return q;
}

SecondMoments moment_steady_state(const ModelParams& p) {
  const SteadyAngles a = steady_angles(p);
  const QuadraticCoeffs q = quad_coeffs(p, a);
  const double gc = p.gamma_c;
  const double c4 = std::pow(std::cos(0.5 * a.theta), 4);
  const double s4 = std::pow(std::sin(0.5 * a.theta), 4);
  const double k = gc * (c4 - s4);
  const cplx i(0.0, 1.0);
  const cplx f = gc / 4.0 * std::exp(2.0 * i * a.phi) * std::pow(std::sin(a.theta), 2);
  const cplx m4 = -4.0 * i * std::conj(q.b1);
  const cplx rhs = 2.0 * i * std::conj(q.b1) - f;

  // Unknowns (Re<a^2>, Im<a^2>, <a^dag a>); d/dt x = M x - c.
  Eigen::Matrix3d M;
  M << k, 2.0 * q.b2, m4.real(),
      -2.0 * q.b2, k, m4.imag(),
      -4.0 * q.b1.imag(), -4.0 * q.b1.real(), k;
  const Eigen::Vector3d c(rhs.real(), rhs.imag(), -gc * c4);

  Eigen::EigenSolver<Eigen::Matrix3d> es(M, false);
  double slowest = std::numeric_limits<double>::infinity(), fastest = 0.0;
  for (int r = 0; r < 3; ++r) {
    if (!(es.eigenvalues()[r].real() < 0.0)) {
      throw CriticalDivergence("fluctuations are not damped at this point");
    }
    slowest = std::min(slowest, -es.eigenvalues()[r].real());
    fastest = std::max(fastest, std::abs(es.eigenvalues()[r]));
  }
  if (!(slowest > kMinDampingRatio * fastest)) {
    throw CriticalDivergence("moment system is singular (critical point)");
  }
  const Eigen::Vector3d x = M.partialPivLu().solve(c);
  SecondMoments m{cplx(x[0], x[1]), x[2]};
  if (m.n_occ < -1e-12 || !std::isfinite(m.n_occ)) {
    throw CriticalDivergence("negative occupation from the moment system");
  }
  return m;
}

double xi2_from_moments(const SecondMoments& m) { return 2.0 * m.n_occ + 1.0 - 2.0 * std::abs(m.a_sq); }

double xi2_analytic(const ModelParams& p) { return xi2_from_moments(moment_steady_state(p)); }

const char* to_string(ClosedForm v) {
  switch (v) {
    case ClosedForm::Paramagnet: return "pm";
    case ClosedForm::DrivenGeneral: return "driven";
    case ClosedForm::DrivenVx0: return "driven-vx0";
    case ClosedForm::DrivenVxInf: return "driven-vxinf";
  }
  return "?";
}

double xi2_closed_form(ClosedForm variant, const ModelParams& p) {
  p.validate();
  if (variant == ClosedForm::Paramagnet) {
    if (p.model != Model::IndependentXY && p.model != Model::CollectiveXY &&
        !(p.model == Model::General && p.vy == -p.vx)) {
      throw DomainError("paramagnet formula needs the XY coupling");
    }
    if (p.omega != 0.0) throw DomainError("paramagnet formula needs Omega = 0");
    const double g = p.model == Model::IndependentXY ? p.gamma_i : p.gamma_c;
    if (!(g > 0.0) || std::abs(p.vx) > 0.5 * g) throw DomainError("paramagnet formula needs |V| <= gamma/2");
    return g / (g + 2.0 * std::abs(p.vx));
  }
  if (p.model != Model::Driven) throw DomainError("driven formulas need the driven model");
  const double gc = p.gamma_c;
  if (!(gc > 0.0) || !(std::abs(p.omega) < 0.5 * gc)) throw DomainError("driven formulas need |Omega| < gamma_c/2");
  const double r0 = std::sqrt(1.0 - 4.0 * p.omega * p.omega / (gc * gc));
  switch (variant) {
    case ClosedForm::DrivenVx0: return r0;
    case ClosedForm::DrivenVxInf: return 0.5 * r0;
    case ClosedForm::DrivenGeneral: {
      const double vx = p.vx, om = p.omega;
      const double root =
          std::sqrt(gc * gc * vx * vx / 4.0 + vx * vx * vx * vx / 4.0 + om * om * om * om);
      return (gc * gc + vx * vx - 2.0 * om * om - 2.0 * root) / (gc * std::sqrt(gc * gc - 4.0 * om * om));
    }
    default: break;
  }
  return 0.0;
}

}  // namespace dpt::fluct
