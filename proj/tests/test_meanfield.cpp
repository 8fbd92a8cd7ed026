#include <doctest.h>

#include <cmath>

#include "dpt/errors.hpp"
#include "dpt/meanfield.hpp"

using namespace dpt;
using namespace dpt::meanfield;

namespace {

// Central-difference Jacobian.
std::array<std::array<double, 3>, 3> fd_jacobian(const ModelParams& p, const BlochVector& s) {
  std::array<std::array<double, 3>, 3> J{};
  const double h = 1e-6;
  for (int c = 0; c < 3; ++c) {
    auto a = s.as_array(), b = s.as_array();
    a[c] += h, b[c] -= h;
    const auto fa = rhs(p, BlochVector::from_array(a)).as_array();
    const auto fb = rhs(p, BlochVector::from_array(b)).as_array();
    for (int r = 0; r < 3; ++r) J[r][c] = (fa[r] - fb[r]) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("analytic Jacobian matches finite differences for every model") {
  const BlochVector s{0.3, -0.4, -0.5};
  for (const auto& p : {ModelParams::independent_xy(0.7, 1.0), ModelParams::collective_xy(0.45, 1.0),
                        ModelParams::driven(2.0, 0.3, 1.0), ModelParams::general(0.8, -0.2, 0.35, 1.2)}) {
    const auto a = jacobian(p, s);
    const auto f = fd_jacobian(p, s);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) CHECK(a[r][c] == doctest::Approx(f[r][c]).epsilon(1e-7).scale(1));
  }
}

TEST_CASE("independent decay: paramagnet loses stability at V = gamma/2") {
  for (double v : {0.1, 0.3, 0.49}) {
    const auto fps = fixed_points(ModelParams::independent_xy(v, 1.0));
    REQUIRE(fps.size() == 1);
    CHECK(fps[0].classification == Stability::Stable);
    CHECK(fps[0].point.z == doctest::Approx(-1.0));
  }
  for (double v : {0.6, 1.0, -2.0}) {
    const auto p = ModelParams::independent_xy(v, 1.0);
    const auto fps = fixed_points(p);
    REQUIRE(fps.size() == 3);
    CHECK(fps[0].classification == Stability::Unstable);
    for (std::size_t k = 1; k < 3; ++k) {
      CHECK(fps[k].classification == Stability::Stable);
      CHECK(fps[k].point.z == doctest::Approx(-1.0 / (2 * std::abs(v))));
      CHECK(rhs(p, fps[k].point).norm() < 1e-12);
    }
  }
  CHECK(critical_point(ModelParams::independent_xy(0.2, 3.0)) == doctest::Approx(1.5));
}

TEST_CASE("every reported fixed point is stationary") {
  for (const auto& p : {ModelParams::collective_xy(0.3, 1.0), ModelParams::collective_xy(0.8, 1.0),
                        ModelParams::driven(0.0, 0.3, 1.0), ModelParams::driven(3.0, 0.45, 1.0),
                        ModelParams::general(0.8, -0.3, 0.2, 1.0)}) {
    for (const auto& f : fixed_points(p)) {
      CHECK(rhs(p, f.point).norm() < 1e-10);
      CHECK(f.point.norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("collective XY: oscillatory phase conserves the radius and the constant of motion") {
  const auto p = ModelParams::collective_xy(0.6, 1.0);
  const BlochVector init{0.5, 0.2, -std::sqrt(1 - 0.29)};
  const auto traj = integrate(p, init, 100.0, 1e-12);
  const auto c0 = constant_of_motion(p, init);
  double drift = 0, rdrift = 0;
  for (const auto& s : traj.states) {
    drift = std::max(drift, std::abs(constant_of_motion(p, s).log_abs - c0.log_abs));
    rdrift = std::max(rdrift, std::abs(s.norm() - 1.0));
  }
  CHECK(drift < 1e-6);
  CHECK(rdrift < 1e-8);
  const auto per = orbit_period(traj);
  REQUIRE(per.has_value());
  CHECK(per->period > 0);
  CHECK(per->spread < 1e-3 * per->period);
}

TEST_CASE("constant of motion rejects the degenerate lines") {
  const auto p = ModelParams::collective_xy(0.6, 1.0);
  CHECK_THROWS_AS(constant_of_motion(p, {0.3, 0.3, 0.1}), DegenerateInput);
  CHECK_THROWS_AS(constant_of_motion(ModelParams::driven(0, 0.1, 1), {0.3, 0.1, 0.1}), DomainError);
}

TEST_CASE("driven model: closed-form relaxation rate") {
  for (double om : {0.0, 0.1, 0.3, 0.45, 0.49}) {
    const auto p = ModelParams::driven(0.0, om, 1.0);
    const auto r = relaxation(p);
    CHECK(r.lambda == doctest::Approx(-0.5 * std::sqrt(1 - 4 * om * om)).epsilon(1e-12));
    CHECK(r.tau * std::abs(r.lambda) == doctest::Approx(1.0));
    double slowest = -1e300;
    for (const auto& z : r.tangent_eigenvalues) slowest = std::max(slowest, z.real());
    CHECK(std::abs(slowest - r.lambda) < 1e-9);
    CHECK(rhs(p, r.fixed_point).norm() < 1e-12);
  }
  CHECK_THROWS_AS(relaxation(ModelParams::driven(0.0, 0.5, 1.0)), NoFixedPoint);
  CHECK_THROWS_AS(relaxation(ModelParams::driven(0.0, 0.7, 1.0)), NoFixedPoint);
}

TEST_CASE("trajectories relax onto the stable fixed point") {
  const auto p = ModelParams::driven(1.0, 0.3, 1.0);
  const auto traj = integrate(p, {0.0, 0.0, -1.0}, 80.0, 1e-11);
  const auto fps = fixed_points(p);
  bool hit = false;
  for (const auto& f : fps)
    if (f.classification == Stability::Stable && max_abs_diff(f.point, traj.states.back()) < 1e-6) hit = true;
  CHECK(hit);
}

TEST_CASE("time averages and the equator") {
  const auto p = ModelParams::collective_xy(0.6, 1.0);
  const auto traj = integrate(p, {0.5, 0.2, -std::sqrt(1 - 0.29)}, 200.0, 1e-11);
  const auto per = orbit_period(traj);
  REQUIRE(per.has_value());
  // Average over an integer number of orbits.
  const double ta = per->crossing_times.front(), tb = per->crossing_times.back();
  double sz = 0, sx = 0;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double a = std::max(traj.times[i - 1], ta), b = std::min(traj.times[i], tb);
    if (b <= a) continue;
    sz += 0.5 * (traj.states[i - 1].z + traj.states[i].z) * (b - a);
    sx += 0.5 * (traj.states[i - 1].x + traj.states[i].x) * (b - a);
  }
  CHECK(std::abs(sz / (tb - ta)) < 1e-2);
  CHECK(std::abs(sx / (tb - ta)) > 0.1);
}

TEST_CASE("classification") {
  using c = std::complex<double>;
  CHECK(classify({c(-1, 0), c(-0.5, 2)}) == Stability::Stable);
  CHECK(classify({c(-1, 0), c(0.1, 0)}) == Stability::Unstable);
  CHECK(classify({c(0, 1), c(0, -1)}) == Stability::Center);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(integrate(ModelParams::collective_xy(0.6, 1.0), {0, 0, -1}, 1.0, 1e-3), InvalidParameter);
  ModelParams bad = ModelParams::collective_xy(0.6, 1.0);
  bad.vy = 0.2;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  CHECK_THROWS_AS(ModelParams::driven(0, 0.2, -1).validate(), InvalidParameter);
}

}  // TEST_SUITE
