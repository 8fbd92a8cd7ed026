#include "dpt/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "dpt/errors.hpp"

namespace dpt::meanfield {
namespace {

using cplx = std::complex<double>;

constexpr double kClassifyTol = 1e-9;

std::array<cplx, 2> eig2(double a, double b, double c, double d) {
  const double tr = a + d;
  // ((a-d)/2)^2 + bc instead of tr^2/4 - det: no cancellation for near-equal roots.
  const double h = 0.5 * (a - d);
  const cplx disc = std::sqrt(cplx(h * h + b * c, 0.0));
  return {cplx(0.5 * tr, 0.0) + disc, cplx(0.5 * tr, 0.0) - disc};
}

// Orthonormal tangent pair for a unit vector p: Gram-Schmidt against the
// Cartesian axis where |p| is smallest.
std::array<Eigen::Vector3d, 2> tangent_frame(const Eigen::Vector3d& p) {
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(p[k]) < std::abs(p[axis])) axis = k;
  }
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e[axis] = 1.0;
  Eigen::Vector3d e1 = e - p * p.dot(e);
  e1.normalize();
  Eigen::Vector3d e2 = p.cross(e1);
  return {e1, e2};
}

Eigen::Matrix3d jacobian_matrix(const ModelParams& p, const BlochVector& s) {
  const auto J = jacobian(p, s);
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = J[r][c];
  return m;
}

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

BlochVector rhs(const ModelParams& p, const BlochVector& s) {
  const double x = s.x, y = s.y, z = s.z;
  BlochVector d;
  d.x = p.vy * y * z;
  d.y = -p.vx * x * z - p.omega * z;
  d.z = (p.vx - p.vy) * x * y + p.omega * y;
  if (p.gamma_i != 0.0) {
    d.x -= 0.5 * p.gamma_i * x;
    d.y -= 0.5 * p.gamma_i * y;
    d.z -= p.gamma_i * (z + 1.0);
  }
  if (p.gamma_c != 0.0) {
    d.x += 0.5 * p.gamma_c * x * z;
    d.y += 0.5 * p.gamma_c * y * z;
    d.z -= 0.5 * p.gamma_c * (1.0 - z * z);
  }
  return d;
}

std::array<std::array<double, 3>, 3> jacobian(const ModelParams& p, const BlochVector& s) {
  const double x = s.x, y = s.y, z = s.z;
  const double gi = p.gamma_i, gc = p.gamma_c;
  return {{
      {0.5 * gc * z - 0.5 * gi, p.vy * z, p.vy * y + 0.5 * gc * x},
      {-p.vx * z, 0.5 * gc * z - 0.5 * gi, -p.vx * x - p.omega + 0.5 * gc * y},
      {(p.vx - p.vy) * y, (p.vx - p.vy) * x + p.omega, gc * z - gi},
  }};
}

Trajectory integrate(const ModelParams& params, const BlochVector& init, double t_end, double tol) {
  params.validate();
  if (!(tol >= 1e-13 && tol <= 1e-6)) throw InvalidParameter("tol must lie in [1e-13, 1e-6]");
  if (!(t_end > 0.0)) throw InvalidParameter("t_end must be positive");

  ode::Options opts;
  opts.tol = {tol, tol * 1e-2};
  ode::DormandPrince solver(
      3,
      [&params](double, std::span<const double> y, std::span<double> dy) {
        const BlochVector d = rhs(params, {y[0], y[1], y[2]});
        dy[0] = d.x;
        dy[1] = d.y;
        dy[2] = d.z;
      },
      opts);

  Trajectory traj;
  traj.params = params;
  traj.tolerances = opts.tol;
  traj.times.push_back(0.0);
  traj.states.push_back(init);
  std::array<double, 3> y = init.as_array();
  solver.integrate(0.0, t_end, y, [&traj](const ode::StepInfo& info) {
    traj.times.push_back(info.t);
    traj.states.push_back({info.y[0], info.y[1], info.y[2]});
    return true;
  });
  traj.accepted_steps = solver.accepted_steps();
  traj.rejected_steps = solver.rejected_steps();
  return traj;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Center: return "center";
    case Stability::Marginal: return "marginal";
  }
  return "marginal";
}

Stability classify(const std::vector<cplx>& eigenvalues) {
  bool any_positive = false;
  bool all_negative = true;
  bool all_negative_or_imag = true;
  bool has_imag_pair = false;
  for (const cplx& l : eigenvalues) {
    const double mag = std::abs(l);
    const bool imaginary = mag > kClassifyTol && std::abs(l.real()) < kClassifyTol * mag;
    if (l.real() > kClassifyTol && !imaginary) any_positive = true;
    if (!(l.real() < -kClassifyTol)) all_negative = false;
    if (imaginary) has_imag_pair = true;
    if (!(l.real() < -kClassifyTol) && !imaginary) all_negative_or_imag = false;
  }
  if (any_positive) return Stability::Unstable;
  if (all_negative) return Stability::Stable;
  if (has_imag_pair && all_negative_or_imag) return Stability::Center;
  return Stability::Marginal;
}

FixedPointReport analyze_point(const ModelParams& params, const BlochVector& point) {
  FixedPointReport rep;
  rep.point = point;
  const Eigen::Matrix3d J = jacobian_matrix(params, point);
  Eigen::EigenSolver<Eigen::Matrix3d> es(J, false);
  for (int k = 0; k < 3; ++k) rep.jacobian_eigenvalues[k] = es.eigenvalues()[k];
  std::sort(rep.jacobian_eigenvalues.begin(), rep.jacobian_eigenvalues.end(),
            [](const cplx& a, const cplx& b) {
              return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
            });

  if (params.sphere_constrained()) {
    // The tangent plane is invariant at a fixed point on the unit sphere; the
    // radial eigenvalue gamma_c * Z does not describe motion on the sphere.
    const Eigen::Vector3d p(point.x, point.y, point.z);
    const auto frame = tangent_frame(p.normalized());
    const double a = frame[0].dot(J * frame[0]);
    const double b = frame[0].dot(J * frame[1]);
    const double c = frame[1].dot(J * frame[0]);
    const double d = frame[1].dot(J * frame[1]);
    const auto t = eig2(a, b, c, d);
    rep.classifying_eigenvalues = {t[0], t[1]};
  } else {
    rep.classifying_eigenvalues.assign(rep.jacobian_eigenvalues.begin(),
                                       rep.jacobian_eigenvalues.end());
  }
  rep.classification = classify(rep.classifying_eigenvalues);
  return rep;
}

double critical_point(const ModelParams& params) {
  params.validate();
  switch (params.model) {
    case Model::IndependentXY: return 0.5 * params.gamma_i;
    case Model::CollectiveXY: return 0.5 * params.gamma_c;
    case Model::Driven:
    case Model::General: {
      const double g2 = params.gamma_c * params.gamma_c;
      const double denom = 2.0 * std::sqrt(g2 + 4.0 * params.vy * params.vy);
      if (denom == 0.0) throw DomainError("critical drive undefined for gamma_c = vy = 0");
      return (g2 + 4.0 * params.vx * params.vy) / denom;
    }
  }
  return 0.0;
}

namespace {

bool is_xy(const ModelParams& p) {
  return p.model == Model::IndependentXY || p.model == Model::CollectiveXY;
}

void append_equatorial(const ModelParams& p, std::vector<BlochVector>& out) {
  // Z = 0 kills dX/dt and dY/dt; dZ/dt = (vx - vy) cos s sin s + omega sin s - gamma_c/2.
  const double a = p.vx - p.vy;
  auto g = [&](double s) {
    return a * std::cos(s) * std::sin(s) + p.omega * std::sin(s) - 0.5 * p.gamma_c;
  };
  constexpr int kSamples = 4096;
  const double two_pi = 2.0 * std::numbers::pi;
  double s0 = 0.0;
  double g0 = g(s0);
  for (int i = 1; i <= kSamples; ++i) {
    const double s1 = two_pi * i / kSamples;
    const double g1 = g(s1);
    if (g0 == 0.0) {
      out.push_back({std::cos(s0), std::sin(s0), 0.0});
    } else if ((g0 < 0.0) != (g1 < 0.0) && g1 != 0.0) {
      double lo = s0, hi = s1, glo = g0;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double s = 0.5 * (lo + hi);
      out.push_back({std::cos(s), std::sin(s), 0.0});
    }
    s0 = s1;
    g0 = g1;
  }
}

}  // namespace

std::vector<FixedPointReport> fixed_points(const ModelParams& params) {
  params.validate();
  std::vector<BlochVector> points;
  const BlochVector pm{0.0, 0.0, -1.0};

  if (params.model == Model::IndependentXY) {
    points.push_back(pm);
    const double v = params.vx, g = params.gamma_i;
    if (std::abs(v) > 0.5 * g && g > 0.0) {
      const double s = std::sqrt(g * (2.0 * std::abs(v) - g));
      const double x = s / (2.0 * v);
      const double y = sgn(v) * s / (2.0 * v);
      const double z = -g / (2.0 * std::abs(v));
      points.push_back({x, y, z});
      points.push_back({-x, -y, z});
    }
  } else {
    if (!params.sphere_constrained()) {
      throw DomainError("fixed points of GENERAL need collective decay only (gamma_i = 0)");
    }
    const bool critical_xy =
        params.model == Model::CollectiveXY && std::abs(params.vx) == 0.5 * params.gamma_c;
    const double gc = params.gamma_c;
    const double D = gc * gc + 4.0 * params.vx * params.vy;
    if (params.omega == 0.0) {
      points.push_back(pm);
    } else if (D != 0.0) {
      const double rad = D * D - 4.0 * params.omega * params.omega * (gc * gc + 4.0 * params.vy * params.vy);
      if (rad >= 0.0) {
        points.push_back({-4.0 * params.vy * params.omega / D, 2.0 * gc * params.omega / D,
                          -std::sqrt(rad) / std::abs(D)});
      }
    }
    if (!critical_xy) append_equatorial(params, points);
  }

  std::vector<FixedPointReport> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back(analyze_point(params, pt));
  if (is_xy(params) && std::abs(params.vx) == 0.5 * params.decay_rate()) {
    out.front().classification = Stability::Marginal;
  }
  return out;
}

ConstantOfMotion constant_of_motion(const ModelParams& params, const BlochVector& s,
                                    double degenerate_eps) {
  if (params.model != Model::CollectiveXY) {
    throw DomainError("constant of motion exists for COLLECTIVE_XY only");
  }
  if (!(params.gamma_c > 0.0)) throw DomainError("constant of motion needs gamma_c > 0");
  const double sum = s.x + s.y;
  const double diff = s.x - s.y;
  if (std::abs(sum) <= degenerate_eps || std::abs(diff) <= degenerate_eps) {
    throw DegenerateInput("state lies on X = +-Y; C is zero or divergent");
  }
  const double r = 2.0 * params.vx / params.gamma_c;
  return {(r + 1.0) * std::log(std::abs(sum)) + (r - 1.0) * std::log(std::abs(diff)), sgn(sum),
          sgn(diff)};
}

BlochVector time_average(const Trajectory& traj, double discard_fraction) {
  if (traj.times.size() != traj.states.size()) throw InvalidParameter("malformed trajectory");
  if (traj.times.size() < 2) throw InvalidParameter("empty averaging window");
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw InvalidParameter("discard fraction must lie in [0, 1)");
  }
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  const double ts = t0 + discard_fraction * (t1 - t0);
  if (!(t1 > ts)) throw InvalidParameter("empty averaging window");

  std::size_t i = 0;
  while (i + 1 < traj.times.size() && traj.times[i + 1] <= ts) ++i;
  // Linear interpolation of the state at the window start.
  const double ta = traj.times[i], tb = traj.times[i + 1];
  const double w = tb > ta ? (ts - ta) / (tb - ta) : 0.0;
  BlochVector prev = traj.states[i] * (1.0 - w) + traj.states[i + 1] * w;
  double tprev = ts;
  BlochVector acc;
  for (std::size_t k = i + 1; k < traj.times.size(); ++k) {
    const double dt = traj.times[k] - tprev;
    acc = acc + (prev + traj.states[k]) * (0.5 * dt);
    prev = traj.states[k];
    tprev = traj.times[k];
  }
  return acc * (1.0 / (t1 - ts));
}

std::optional<OrbitPeriod> orbit_period(const Trajectory& traj, double discard_fraction) {
  const BlochVector mean = time_average(traj, discard_fraction);
  const double ts = traj.times.front() + discard_fraction * (traj.times.back() - traj.times.front());
  OrbitPeriod op;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    if (traj.times[k - 1] < ts) continue;
    const double za = traj.states[k - 1].z - mean.z;
    const double zb = traj.states[k].z - mean.z;
    if (za < 0.0 && zb >= 0.0) {
      const double f = za / (za - zb);
      op.crossing_times.push_back(traj.times[k - 1] + f * (traj.times[k] - traj.times[k - 1]));
    }
  }
  if (op.crossing_times.size() < 2) return std::nullopt;
  const std::size_t n = op.crossing_times.size() - 1;
  op.period = (op.crossing_times.back() - op.crossing_times.front()) / static_cast<double>(n);
  for (std::size_t k = 1; k < op.crossing_times.size(); ++k) {
    op.spread = std::max(op.spread,
                         std::abs(op.crossing_times[k] - op.crossing_times[k - 1] - op.period));
  }
  return op;
}

RelaxationReport relaxation(const ModelParams& params) {
  params.validate();
  if (params.model != Model::Driven) throw DomainError("relaxation is defined for the driven model");
  const double gc = params.gamma_c;
  if (!(gc > 0.0)) throw DomainError("relaxation needs gamma_c > 0");
  const double ratio = 2.0 * params.omega / gc;
  if (!(std::abs(ratio) < 1.0)) throw NoFixedPoint("Omega >= gamma_c/2: no stable fixed point");
  const double root = std::sqrt(1.0 - ratio * ratio);

  RelaxationReport rep;
  rep.lambda = -0.5 * gc * root;
  rep.tau = 2.0 / (gc * root);
  rep.fixed_point = {0.0, ratio, -root};
  const FixedPointReport fp = analyze_point(params, rep.fixed_point);
  rep.jacobian_eigenvalues = fp.jacobian_eigenvalues;
  rep.tangent_eigenvalues = {fp.classifying_eigenvalues[0], fp.classifying_eigenvalues[1]};
  return rep;
}

}  // namespace dpt::meanfield
