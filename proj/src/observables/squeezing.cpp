#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dpt/errors.hpp"
#include "dpt/observables.hpp"

namespace dpt::obs {
namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Unit vectors orthogonal to n, Gram-Schmidt against the axis where |n| is smallest.
std::array<Vec3, 2> tangent_frame(const Vec3& n) {
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
  Vec3 e{0.0, 0.0, 0.0};
  e[axis] = 1.0;
  const double p = dot(n, e);
  Vec3 e1{e[0] - p * n[0], e[1] - p * n[1], e[2] - p * n[2]};
  const double l = std::sqrt(dot(e1, e1));
  for (double& v : e1) v /= l;
  return {e1, cross(n, e1)};
}

// u^T C v for the 3x3 matrix C.
double form(const Mat3& c, const Vec3& u, const Vec3& v) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += u[a] * c[a][b] * v[b];
  return s;
}

struct Plane {
  Vec3 n;
  std::array<Vec3, 2> e;
  double length;
};

Plane plane_of(const SpinMoments& m, int n_atoms) {
  const double len = std::sqrt(dot(m.mean, m.mean));
  if (!(len > 1e-10 * n_atoms)) throw UndefinedSqueezing("|<J>| vanishes; squeezing is undefined");
  const Vec3 n{m.mean[0] / len, m.mean[1] / len, m.mean[2] / len};
  return {n, tangent_frame(n), len};
}

}  // namespace

SqueezingReport squeezing_from_moments(const SpinMoments& m, int n_atoms) {
  const Plane pl = plane_of(m, n_atoms);
  Mat3 cov;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) cov[a][b] = m.second[a][b] - m.mean[a] * m.mean[b];
  const double a = form(cov, pl.e[0], pl.e[0]);
  const double b = form(cov, pl.e[0], pl.e[1]);
  const double d = form(cov, pl.e[1], pl.e[1]);
  const double mid = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  const double lmin = mid - rad, lmax = mid + rad;
  // Eigenvector of [[a, b], [b, d]] for lmin, as an angle in the (e1, e2) plane.
  const double ang = 0.5 * std::atan2(-2.0 * b, d - a);
  const double c = std::cos(ang), s = std::sin(ang);

  SqueezingReport r;
  r.n_atoms = n_atoms;
  r.mean = m.mean;
  r.bloch_length = pl.length;
  r.covariance_eigenvalues = {lmin, lmax};
  for (int k = 0; k < 3; ++k) r.direction[k] = c * pl.e[0][k] + s * pl.e[1][k];
  r.xi2 = n_atoms * lmin / (pl.length * pl.length);
  return r;
}

SqueezingReport xi2_from_rho(const lindblad::DensityMatrix& rho) {
  return squeezing_from_moments(spin_moments(rho), rho.n_atoms);
}

double xi2_rotated_frame(const SpinMoments& m, int n_atoms) {
  const Plane pl = plane_of(m, n_atoms);
  const double xx = form(m.second, pl.e[0], pl.e[0]);
  const double yy = form(m.second, pl.e[1], pl.e[1]);
  const double xy2 = 2.0 * form(m.second, pl.e[0], pl.e[1]);
  return (xx + yy - std::hypot(xx - yy, xy2)) / (0.5 * n_atoms);
}

std::string to_json(const SqueezingReport& r) {
  const nlohmann::json j = {{"xi2", r.xi2},
                            {"bloch", {{"length", r.bloch_length}, {"mean", r.mean}}},
                            {"direction", r.direction},
                            {"eigenvalues", r.covariance_eigenvalues},
                            {"n_atoms", r.n_atoms}};
  return j.dump(2);
}

}  // namespace dpt::obs
